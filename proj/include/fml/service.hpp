#pragma once

// Newline-delimited-JSON TCP service exposing assessment, recommendation,
// and knowledge-base reload. One JSON object per line in, one per line out,
// responses in request order per connection.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fml/fml_io.hpp"
#include "fml/inference.hpp"
#include "fml/recommend.hpp"

namespace fml {

struct ServiceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7855;  // 0 binds an ephemeral port
  int cog_samples = 1001;
  int default_grade = 4;
  std::size_t max_line_bytes = 1 << 20;
};

class AgentService {
 public:
  AgentService(FuzzySystem part1, FuzzySystem part2, ContentGraph graph,
               ServiceOptions opts = {})
      : opts_(std::move(opts)), graph_(std::move(graph)) {
    part1_ = std::make_shared<const Engine>(std::move(part1), opts_.cog_samples);
    part2_ = std::make_shared<const Engine>(std::move(part2), opts_.cog_samples);
  }

  ~AgentService() { stop(); }

  /// Bind, listen, and serve on a background thread. Throws ServiceError if
  /// the address cannot be bound.
  void start() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw ServiceError("socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(opts_.port);
    if (::inet_pton(AF_INET, opts_.host.c_str(), &addr.sin_addr) != 1) {
      close_listener();
      throw ServiceError("bad bind address '" + opts_.host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      close_listener();
      throw ServiceError("cannot bind " + opts_.host + ":" + std::to_string(opts_.port));
    }
    if (::listen(listen_fd_, 64) != 0) {
      close_listener();
      throw ServiceError("listen() failed");
    }

    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
    bound_port_ = ntohs(bound.sin_port);

    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  void stop() {
    if (!running_.exchange(false)) return;
    close_listener();
    {
      std::lock_guard<std::mutex> lock(conn_mutex_);
      for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    for (auto& t : conn_threads_)
      if (t.joinable()) t.join();
    conn_threads_.clear();
  }

  std::uint16_t port() const { return bound_port_; }
  const std::string& host() const { return opts_.host; }

  /// Process one request line; public so in-process callers and tests can
  /// use the exact wire behavior.
  std::string handle_line(const std::string& line) const {
    nlohmann::json req;
    try {
      req = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      return error_response("", std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object()) return error_response("", "request must be a JSON object");

    std::string request_id;
    if (req.contains("requestId") && req["requestId"].is_string())
      request_id = req["requestId"].get<std::string>();

    if (!req.contains("op") || !req["op"].is_string())
      return error_response(request_id, "missing op");
    const std::string op = req["op"].get<std::string>();
    try {
      if (op == "assess") return handle_assess(req, request_id);
      if (op == "recommend") return handle_recommend(req, request_id);
      if (op == "reload") return handle_reload(req, request_id);
    } catch (const std::exception& e) {
      return error_response(request_id, e.what());
    }
    return error_response(request_id, "unknown op '" + op + "'");
  }

 private:
  struct Engine {
    FuzzySystem system;
    Evaluator evaluator;

    Engine(FuzzySystem sys, int cog_samples)
        : system(std::move(sys)), evaluator(system, InferenceOptions{cog_samples}) {}
  };

  using EnginePtr = std::shared_ptr<const Engine>;

  EnginePtr snapshot(bool part1) const {
    std::lock_guard<std::mutex> lock(engine_mutex_);
    return part1 ? part1_ : part2_;
  }

  static std::string error_response(const std::string& request_id, const std::string& msg) {
    return nlohmann::json{{"requestId", request_id}, {"status", "error"}, {"message", msg}}
        .dump();
  }

  static double number_field(const nlohmann::json& req, const char* key) {
    if (!req.contains(key) || !req[key].is_number())
      throw ServiceError(std::string("missing numeric field '") + key + "'");
    return req[key].get<double>();
  }

  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  InferenceResult run_inference(const EnginePtr& engine, const nlohmann::json& req) const {
    CrispInput input;
    for (const auto& name : engine->evaluator.input_names())
      input[name] = number_field(req, lower(name).c_str());
    return engine->evaluator.infer(input);
  }

  std::string handle_assess(const nlohmann::json& req, const std::string& request_id) const {
    const EnginePtr engine = snapshot(true);
    const InferenceResult res = run_inference(engine, req);
    nlohmann::json result{{"slp", res.crisp_value}, {"label", res.winning_term}};
    if (res.clamped) result["clamped"] = true;
    nlohmann::json out{{"requestId", request_id}, {"status", "ok"}, {"result", result}};
    if (res.clamped) out["message"] = "input outside domain was clamped";
    return out.dump();
  }

  std::string handle_recommend(const nlohmann::json& req,
                               const std::string& request_id) const {
    const EnginePtr engine = snapshot(false);
    const InferenceResult res = run_inference(engine, req);
    const RankLevel level = rank_to_level(res.crisp_value);
    int grade = opts_.default_grade;
    if (req.contains("grade") && req["grade"].is_number_integer())
      grade = req["grade"].get<int>();

    nlohmann::json contents = nlohmann::json::array();
    std::string warning;
    try {
      for (const auto& node : recommend_contents(graph_, level, grade))
        contents.push_back({{"id", node.id},
                            {"title", node.title},
                            {"grade", node.grade},
                            {"level", content_level_name(node.level)}});
    } catch (const UnknownGrade& e) {
      warning = e.what();
    }

    nlohmann::json result{{"rlcr", res.crisp_value},
                          {"level", rank_name(level)},
                          {"contents", contents}};
    if (res.clamped) result["clamped"] = true;
    nlohmann::json out{{"requestId", request_id}, {"status", "ok"}, {"result", result}};
    if (!warning.empty()) out["message"] = warning;
    return out.dump();
  }

  std::string handle_reload(const nlohmann::json& req, const std::string& request_id) const {
    if (!req.contains("path") || !req["path"].is_string())
      return error_response(request_id, "reload needs a 'path' string");
    const std::string path = req["path"].get<std::string>();
    std::string target = "part1";
    if (req.contains("target") && req["target"].is_string())
      target = req["target"].get<std::string>();
    if (target != "part1" && target != "part2")
      return error_response(request_id, "reload target must be part1 or part2");

    std::ifstream in(path, std::ios::binary);
    if (!in) return error_response(request_id, "cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();

    try {
      FuzzySystem sys = parse_fml(buf.str());
      auto engine = std::make_shared<const Engine>(std::move(sys), opts_.cog_samples);
      {
        std::lock_guard<std::mutex> lock(engine_mutex_);
        (target == "part1" ? part1_ : part2_) = std::move(engine);
      }
    } catch (const std::exception& e) {
      // Old knowledge base stays active.
      return error_response(request_id, std::string("reload failed: ") + e.what());
    }
    return nlohmann::json{{"requestId", request_id},
                          {"status", "ok"},
                          {"result", {{"target", target}, {"path", path}}}}
        .dump();
  }

  void close_listener() {
    if (listen_fd_ >= 0) {
      ::close(listen_fd_);
      listen_fd_ = -1;
    }
  }

  void accept_loop() {
    while (running_) {
      pollfd pfd{listen_fd_, POLLIN, 0};
      const int rc = ::poll(&pfd, 1, 100);
      if (!running_) break;
      if (rc <= 0) continue;
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) continue;
      {
        std::lock_guard<std::mutex> lock(conn_mutex_);
        conn_fds_.insert(fd);
        conn_threads_.emplace_back([this, fd] { serve_connection(fd); });
      }
    }
  }

  void serve_connection(int fd) {
    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open) {
      const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));

      std::size_t start = 0;
      for (;;) {
        const std::size_t nl = buffer.find('\n', start);
        if (nl == std::string::npos) break;
        std::string line = buffer.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        start = nl + 1;
        if (!line.empty() && !send_all(fd, handle_line(line) + "\n")) {
          open = false;  // peer gone
          break;
        }
      }
      buffer.erase(0, start);

      if (open && buffer.size() > opts_.max_line_bytes) {
        send_all(fd, error_response("", "line too long") + "\n");
        break;
      }
    }
    ::close(fd);
    std::lock_guard<std::mutex> lock(conn_mutex_);
    conn_fds_.erase(fd);
  }

  static bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
      const ssize_t n =
          ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) return false;
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  ServiceOptions opts_;
  ContentGraph graph_;

  mutable std::mutex engine_mutex_;
  mutable EnginePtr part1_;
  mutable EnginePtr part2_;

  std::atomic<bool> running_{false};
  int listen_fd_ = -1;
  std::uint16_t bound_port_ = 0;
  std::thread accept_thread_;
  std::mutex conn_mutex_;
  std::set<int> conn_fds_;
  std::vector<std::thread> conn_threads_;
};

}  // namespace fml
