// Command-line front end: dataset generation, the two experiment stages,
// one-shot inference, and the TCP agent service.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fml/csv.hpp"
#include "fml/dataset.hpp"
#include "fml/fml_io.hpp"
#include "fml/inference.hpp"
#include "fml/learn.hpp"
#include "fml/recommend.hpp"
#include "fml/report_json.hpp"
#include "fml/rulegen.hpp"
#include "fml/service.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

fml::FuzzySystem load_system(const std::string& spec) {
  if (spec == "baseline") return fml::baseline_part1_system();
  return fml::parse_fml(read_file(spec));
}

volatile std::sig_atomic_t g_stop = 0;
void on_signal(int) { g_stop = 1; }

struct Part1Args {
  std::string method = "ga";
  int generations = 300;
  int population = 0;  // 0 = method default
  std::uint64_t seed = 42;
  int folds = 5;
  int threads = 1;
  int cog_samples = 1001;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  std::string data;
  std::string rules;  // optional rule-base override file
  std::string out_dir = ".";
  bool paper_scale = false;
};

fml::LearnConfig make_config(const Part1Args& a) {
  fml::LearnConfig cfg = a.method == "pso" ? fml::LearnConfig::pso_defaults()
                                           : fml::LearnConfig::ga_defaults();
  cfg.generations = a.generations;
  if (a.population > 0) cfg.population_size = a.population;
  cfg.seed = a.seed;
  cfg.folds = a.folds;
  cfg.threads = a.threads;
  cfg.cog_samples = a.cog_samples;
  cfg.crossover_rate = a.crossover_rate;
  cfg.mutation_rate = a.mutation_rate;
  if (!a.rules.empty()) {
    fml::FuzzySystem base = fml::baseline_part1_system();
    base.rules = fml::parse_fml_rulebase(read_file(a.rules));
    if (auto violations = fml::validate(base); !violations.empty())
      throw std::runtime_error("rule override is invalid: " + violations.front());
    cfg.base_system = std::move(base);
  }
  return cfg;
}

void write_history_csv(const fml::LearnReport& report, const std::string& path) {
  std::ostringstream out;
  out << "generation";
  for (std::size_t f = 0; f < report.fold_histories.size(); ++f) out << ",fold" << f;
  out << ",mean\n";
  for (std::size_t g = 0; g < report.history_best_mse.size(); ++g) {
    out << g;
    for (const auto& h : report.fold_histories) out << ',' << h[g];
    out << ',' << report.history_best_mse[g] << '\n';
  }
  write_file(path, out.str());
}

int run_part1(const Part1Args& args) {
  namespace fs = std::filesystem;
  const fml::Dataset data = fml::read_csv_dataset(args.data);
  fs::create_directories(args.out_dir);

  std::vector<int> scales = {args.generations};
  if (args.paper_scale) scales = {1000, 2000, 3000};

  for (int generations : scales) {
    Part1Args scaled = args;
    scaled.generations = generations;
    const fml::LearnConfig cfg = make_config(scaled);
    const fml::LearnReport report = fml::cross_validate(data, cfg);

    const std::string suffix =
        args.paper_scale ? "_" + std::to_string(generations) : std::string{};
    const fs::path dir(args.out_dir);
    write_file((dir / ("report" + suffix + ".json")).string(),
               fml::report_to_json(report).dump(2) + "\n");
    write_file((dir / ("learned_" + args.method + suffix + ".fml")).string(),
               fml::serialize_fml(report.best_system));
    write_history_csv(report, (dir / ("mse_history" + suffix + ".csv")).string());

    std::printf("%s generations=%d beforeMse=%.6f meanTestMse=%.6f meanTrainMse=%.6f\n",
                args.method.c_str(), generations, report.baseline_mse,
                report.mean_test_mse, report.mean_train_mse);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy assessment and content-recommendation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset CSV");
  std::string gen_stage = "part1";
  int gen_n = 400;
  std::uint64_t gen_seed = 42;
  double gen_noise = 0.02;
  bool gen_paper_rows = false;
  std::string gen_out;
  gen->add_option("--stage", gen_stage, "part1 or part2")
      ->check(CLI::IsMember({"part1", "part2"}));
  gen->add_option("--n", gen_n, "record count")->check(CLI::Range(1, 100000000));
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--noise-sigma", gen_noise, "Gaussian noise sigma (part1 only)");
  gen->add_flag("--include-paper-rows", gen_paper_rows,
                "embed the published fixture rows as a prefix (part2 only)");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // part1
  auto* part1 = app.add_subcommand("part1", "Optimize the assessment knowledge base");
  Part1Args part1_args;
  part1->add_option("--method", part1_args.method, "ga or pso")
      ->check(CLI::IsMember({"ga", "pso"}));
  part1->add_option("--generations", part1_args.generations)->check(CLI::Range(1, 100000000));
  part1->add_option("--population", part1_args.population,
                    "population / swarm size (default 50 for ga, 84 for pso)");
  part1->add_option("--seed", part1_args.seed);
  part1->add_option("--folds", part1_args.folds)->check(CLI::Range(2, 100));
  part1->add_option("--threads", part1_args.threads)->check(CLI::PositiveNumber);
  part1->add_option("--cog-samples", part1_args.cog_samples)->check(CLI::PositiveNumber);
  part1->add_option("--crossover-rate", part1_args.crossover_rate)->check(CLI::Range(0.0, 1.0));
  part1->add_option("--mutation-rate", part1_args.mutation_rate)->check(CLI::Range(0.0, 1.0));
  part1->add_option("--data", part1_args.data, "training CSV")->required();
  part1->add_option("--rules", part1_args.rules, "FML rule-base override file");
  part1->add_option("--out-dir", part1_args.out_dir);
  part1->add_flag("--paper-scale", part1_args.paper_scale,
                  "sweep 1000/2000/3000 generations");

  // part2
  auto* part2 = app.add_subcommand("part2", "Score content-rank recommendation accuracy");
  std::string part2_kb = "before";
  std::string part2_data;
  double part2_threshold = 1.0;
  int part2_cog = 1001;
  std::string part2_out_dir = ".";
  part2->add_option("--part1-kb", part2_kb, "'before' or a learned FML path");
  part2->add_option("--data", part2_data, "evaluation CSV")->required();
  part2->add_option("--threshold", part2_threshold, "|error| tolerance")
      ->check(CLI::NonNegativeNumber);
  part2->add_option("--cog-samples", part2_cog)->check(CLI::PositiveNumber);
  part2->add_option("--out-dir", part2_out_dir);

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "One-shot assessment inference");
  std::string infer_kb = "baseline";
  double in_sa = 0, in_lcd = 0, in_scl = 0, in_sts = 0;
  int infer_cog = 1001;
  infer_cmd->add_option("--kb", infer_kb, "'baseline' or an FML path");
  infer_cmd->add_option("--sa", in_sa)->required();
  infer_cmd->add_option("--lcd", in_lcd)->required();
  infer_cmd->add_option("--scl", in_scl)->required();
  infer_cmd->add_option("--sts", in_sts)->required();
  infer_cmd->add_option("--cog-samples", infer_cog)->check(CLI::PositiveNumber);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the TCP agent service");
  std::string bind_addr = "127.0.0.1:7855";
  std::string serve_part1 = "baseline";
  std::string serve_part2;
  std::string serve_graph;
  serve->add_option("--bind", bind_addr, "host:port");
  serve->add_option("--part1-kb", serve_part1, "'baseline' or an FML path");
  serve->add_option("--part2-kb", serve_part2,
                    "FML path (default: derived from the part1 KB)");
  serve->add_option("--content-graph", serve_graph, "content graph JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      const fml::Dataset ds = gen_stage == "part1"
                                  ? fml::gen_slp_dataset(gen_n, gen_seed, gen_noise)
                                  : fml::gen_rlcr_dataset(gen_n, gen_seed, gen_paper_rows);
      fml::write_csv_dataset(ds, gen_out);
      std::printf("wrote %zu records to %s\n", ds.records.size(), gen_out.c_str());
      return 0;
    }

    if (part1->parsed()) return run_part1(part1_args);

    if (part2->parsed()) {
      namespace fs = std::filesystem;
      const fml::FuzzySystem part1_sys = load_system(part2_kb == "before" ? "baseline" : part2_kb);
      const fml::FuzzySystem sys = fml::build_part2_system(part1_sys);
      const fml::Dataset data = fml::read_csv_dataset(part2_data);
      const double acc = fml::accuracy(sys, data, part2_threshold, part2_cog);

      fs::create_directories(part2_out_dir);
      const fml::Evaluator ev(sys, fml::InferenceOptions{part2_cog});
      std::ostringstream csv;
      csv << "sa,slp,inferred,desired,level\n";
      fml::Evaluator::Scratch scratch;
      for (const auto& r : data.records) {
        const double inferred = ev.infer_crisp(r.inputs, scratch);
        csv << r.inputs[0] << ',' << r.inputs[1] << ',' << inferred << ',' << r.desired
            << ',' << fml::rank_name(fml::rank_to_level(inferred)) << '\n';
      }
      const fs::path dir(part2_out_dir);
      write_file((dir / "part2_records.csv").string(), csv.str());
      const nlohmann::json report{{"kb", part2_kb},
                                  {"threshold", part2_threshold},
                                  {"records", data.records.size()},
                                  {"accuracy", acc}};
      write_file((dir / "accuracy.json").string(), report.dump(2) + "\n");
      std::printf("accuracy=%.6f over %zu records (threshold %.3f)\n", acc,
                  data.records.size(), part2_threshold);
      return 0;
    }

    if (infer_cmd->parsed()) {
      const fml::FuzzySystem sys = load_system(infer_kb);
      const fml::InferenceResult res =
          fml::infer(sys, {{"SA", in_sa}, {"LCD", in_lcd}, {"SCL", in_scl}, {"STS", in_sts}},
                     fml::InferenceOptions{infer_cog});
      if (res.clamped)
        std::fprintf(stderr, "warning: input outside domain was clamped\n");
      std::printf("%.12f %s\n", res.crisp_value, res.winning_term.c_str());
      return 0;
    }

    if (serve->parsed()) {
      const auto colon = bind_addr.rfind(':');
      if (colon == std::string::npos)
        throw std::runtime_error("--bind must look like host:port");
      const std::string host = bind_addr.substr(0, colon);
      const int port = std::stoi(bind_addr.substr(colon + 1));
      if (port < 0 || port > 65535) throw std::runtime_error("port out of range");

      fml::FuzzySystem part1_sys = load_system(serve_part1);
      fml::FuzzySystem part2_sys = serve_part2.empty()
                                       ? fml::build_part2_system(part1_sys)
                                       : fml::parse_fml(read_file(serve_part2));
      fml::ContentGraph graph =
          serve_graph.empty()
              ? fml::sample_content_graph()
              : fml::content_graph_from_json(nlohmann::json::parse(read_file(serve_graph)));

      fml::ServiceOptions opts;
      opts.host = host;
      opts.port = static_cast<std::uint16_t>(port);
      fml::AgentService service(std::move(part1_sys), std::move(part2_sys),
                                std::move(graph), opts);
      service.start();
      std::printf("listening on %s:%u\n", service.host().c_str(), service.port());
      std::fflush(stdout);

      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) {
        timespec ts{0, 100 * 1000 * 1000};
        nanosleep(&ts, nullptr);
      }
      service.stop();
      std::printf("shut down\n");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
