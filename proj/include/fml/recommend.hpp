#pragma once

// Recommendation stage: assemble the two-input content-rank system from an
// assessment knowledge base, map crisp ranks onto the eight grade/level
// bins, walk the prerequisite graph, and score accuracy.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fml/inference.hpp"
#include "fml/learn.hpp"
#include "fml/model.hpp"
#include "fml/rulegen.hpp"

namespace fml {

struct UnknownGrade : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The eight content ranks, ordered from last-grade-high-intermediate up to
/// next-grade-intermediate.
enum class RankLevel { LGHIL, LGAL, CGEL, CGIL, CGHIL, CGAL, NGEL, NGIL };

inline const char* rank_name(RankLevel r) {
  return kRlcrTerms[static_cast<std::size_t>(r)];
}

enum class ContentLevel { Elementary, Intermediate, HighIntermediate, Advanced };

inline const char* content_level_name(ContentLevel l) {
  switch (l) {
    case ContentLevel::Elementary: return "Elementary";
    case ContentLevel::Intermediate: return "Intermediate";
    case ContentLevel::HighIntermediate: return "HighIntermediate";
    case ContentLevel::Advanced: return "Advanced";
  }
  return "?";
}

struct ContentNode {
  std::string id;
  std::string title;
  std::string category;
  int grade = 0;
  ContentLevel level = ContentLevel::Elementary;
  std::vector<std::string> prerequisites;
  std::string area;
  std::string subject;

  friend bool operator==(const ContentNode&, const ContentNode&) = default;
};

/// Acyclic prerequisite graph of learning contents, indexed by node id.
class ContentGraph {
 public:
  ContentGraph() = default;

  explicit ContentGraph(std::vector<ContentNode> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (index_.count(nodes_[i].id))
        throw GraphError("duplicate content id '" + nodes_[i].id + "'");
      index_[nodes_[i].id] = i;
    }
    for (const auto& n : nodes_)
      for (const auto& p : n.prerequisites)
        if (!index_.count(p))
          throw GraphError("content '" + n.id + "' requires unknown '" + p + "'");
    check_acyclic();
  }

  const std::vector<ContentNode>& nodes() const { return nodes_; }

  const ContentNode* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
  }

 private:
  void check_acyclic() const {
    std::map<std::string, int> state;  // 0 new, 1 visiting, 2 done
    for (const auto& n : nodes_) visit(n.id, state);
  }

  void visit(const std::string& id, std::map<std::string, int>& state) const {
    int& s = state[id];
    if (s == 2) return;
    if (s == 1) throw GraphError("prerequisite cycle through '" + id + "'");
    s = 1;
    for (const auto& p : find(id)->prerequisites) visit(p, state);
    s = 2;
  }

  std::vector<ContentNode> nodes_;
  std::map<std::string, std::size_t> index_;
};

/// Build the recommendation system: SA terms taken from the assessment
/// system's SA input, SLP terms taken from its output and re-typed as an
/// input, and the RLCR output partitioned into eight overlapping trapezoids
/// centered at -3.5 .. +3.5.
inline FuzzySystem build_part2_system(const FuzzySystem& part1) {
  const FuzzyVariable* sa = part1.find_variable("SA");
  const FuzzyVariable* slp = part1.output_variable();
  if (!sa || sa->kind != VariableKind::Input)
    throw ShapeMismatch("assessment system has no SA input variable");
  if (!slp || slp->name != "SLP")
    throw ShapeMismatch("assessment system has no SLP output variable");
  if (slp->terms.size() != 5)
    throw ShapeMismatch("SLP must carry 5 terms");

  FuzzySystem sys;
  sys.name = "RLCRSystemRB";
  sys.network_address = part1.network_address;

  FuzzyVariable sa_in = *sa;
  sa_in.kind = VariableKind::Input;
  sys.variables.push_back(std::move(sa_in));

  FuzzyVariable slp_in = *slp;
  slp_in.kind = VariableKind::Input;
  slp_in.domain_left = 0.0;
  slp_in.domain_right = 1.0;
  sys.variables.push_back(std::move(slp_in));

  FuzzyVariable rlcr;
  rlcr.name = "RLCR";
  rlcr.domain_left = -4.0;
  rlcr.domain_right = 4.0;
  rlcr.kind = VariableKind::Output;
  rlcr.default_value = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double center = -3.5 + i;
    FuzzyTerm t;
    t.name = kRlcrTerms[static_cast<std::size_t>(i)];
    t.shape = {std::max(-4.0, center - 0.75), center - 0.25, center + 0.25,
               std::min(4.0, center + 0.75)};
    rlcr.terms.push_back(std::move(t));
  }
  sys.variables.push_back(std::move(rlcr));

  sys.rules = build_rlcr_rulebase();
  return sys;
}

/// Eight equal bins of width 1 ascending from -4; the last bin is closed.
/// Out-of-range values clamp into the scale.
inline RankLevel rank_to_level(double rlcr) {
  const double x = std::clamp(rlcr, -4.0, 4.0);
  int bin = static_cast<int>(std::floor(x + 4.0));
  bin = std::clamp(bin, 0, 7);
  return static_cast<RankLevel>(bin);
}

namespace recommend_detail {

struct Target {
  int grade;
  ContentLevel level;
};

inline Target decode_rank(RankLevel rank, int current_grade) {
  switch (rank) {
    case RankLevel::LGHIL: return {current_grade - 1, ContentLevel::HighIntermediate};
    case RankLevel::LGAL: return {current_grade - 1, ContentLevel::Advanced};
    case RankLevel::CGEL: return {current_grade, ContentLevel::Elementary};
    case RankLevel::CGIL: return {current_grade, ContentLevel::Intermediate};
    case RankLevel::CGHIL: return {current_grade, ContentLevel::HighIntermediate};
    case RankLevel::CGAL: return {current_grade, ContentLevel::Advanced};
    case RankLevel::NGEL: return {current_grade + 1, ContentLevel::Elementary};
    case RankLevel::NGIL: return {current_grade + 1, ContentLevel::Intermediate};
  }
  throw std::logic_error("unreachable rank");
}

inline void add_with_prerequisites(const ContentGraph& graph, const ContentNode& node,
                                   std::set<std::string>& seen,
                                   std::vector<const ContentNode*>& out) {
  if (seen.count(node.id)) return;
  seen.insert(node.id);
  for (const auto& p : node.prerequisites)
    add_with_prerequisites(graph, *graph.find(p), seen, out);
  out.push_back(&node);
}

}  // namespace recommend_detail

/// Contents matching the rank's (grade, level) target, each preceded by its
/// prerequisite closure in topological order, without duplicates.
inline std::vector<ContentNode> recommend_contents(const ContentGraph& graph,
                                                   RankLevel rank, int current_grade) {
  const auto target = recommend_detail::decode_rank(rank, current_grade);

  std::vector<const ContentNode*> selected;
  for (const auto& n : graph.nodes())
    if (n.grade == target.grade && n.level == target.level) selected.push_back(&n);
  if (selected.empty())
    throw UnknownGrade("no contents for grade " + std::to_string(target.grade) + " at " +
                       content_level_name(target.level));

  std::set<std::string> seen;
  std::vector<const ContentNode*> ordered;
  for (const auto* n : selected)
    recommend_detail::add_with_prerequisites(graph, *n, seen, ordered);

  std::vector<ContentNode> out;
  out.reserve(ordered.size());
  for (const auto* n : ordered) out.push_back(*n);
  return out;
}

/// Fraction of records whose inferred output lies within `threshold` of the
/// desired output.
inline double accuracy(const FuzzySystem& sys, const Dataset& ds, double threshold = 1.0,
                       int cog_samples = 1001) {
  if (ds.records.empty()) throw EmptyDataset("accuracy: dataset is empty");
  Evaluator ev(sys, InferenceOptions{cog_samples});
  const auto perm = learn_detail::input_permutation(ev, ds);
  Evaluator::Scratch scratch;
  std::vector<double> inputs(perm.size());
  std::size_t hits = 0;
  for (const auto& r : ds.records) {
    for (std::size_t i = 0; i < perm.size(); ++i) inputs[i] = r.inputs[perm[i]];
    if (std::abs(ev.infer_crisp(inputs, scratch) - r.desired) <= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ds.records.size());
}

// --- graph JSON ------------------------------------------------------------

inline ContentLevel content_level_from(const std::string& s) {
  if (s == "Elementary") return ContentLevel::Elementary;
  if (s == "Intermediate") return ContentLevel::Intermediate;
  if (s == "HighIntermediate") return ContentLevel::HighIntermediate;
  if (s == "Advanced") return ContentLevel::Advanced;
  throw GraphError("unknown content level '" + s + "'");
}

inline ContentGraph content_graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array())
    throw GraphError("content graph JSON must be an object with a 'nodes' array");
  std::vector<ContentNode> nodes;
  for (const auto& nj : j["nodes"]) {
    ContentNode n;
    n.id = nj.at("id").get<std::string>();
    n.title = nj.value("title", n.id);
    n.category = nj.value("category", "");
    n.grade = nj.at("grade").get<int>();
    n.level = content_level_from(nj.at("level").get<std::string>());
    if (nj.contains("prerequisites"))
      n.prerequisites = nj["prerequisites"].get<std::vector<std::string>>();
    n.area = nj.value("area", "");
    n.subject = nj.value("subject", "");
    nodes.push_back(std::move(n));
  }
  return ContentGraph(std::move(nodes));
}

inline nlohmann::json content_graph_to_json(const ContentGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : graph.nodes()) {
    nodes.push_back({{"id", n.id},
                     {"title", n.title},
                     {"category", n.category},
                     {"grade", n.grade},
                     {"level", content_level_name(n.level)},
                     {"prerequisites", n.prerequisites},
                     {"area", n.area},
                     {"subject", n.subject}});
  }
  return nlohmann::json{{"nodes", nodes}};
}

/// Bundled fourth-grade mathematics fragment: number line and groups of
/// numbers, with prerequisite chains across grades 3-5.
inline ContentGraph sample_content_graph() {
  auto node = [](std::string id, std::string title, std::string category, int grade,
                 ContentLevel level, std::vector<std::string> prereqs) {
    ContentNode n;
    n.id = std::move(id);
    n.title = std::move(title);
    n.category = std::move(category);
    n.grade = grade;
    n.level = level;
    n.prerequisites = std::move(prereqs);
    n.area = "Mathematics";
    n.subject = "Numbers";
    return n;
  };
  const std::string num = "Number and Calculation";
  const std::string qty = "Quantity and Measurement";
  std::vector<ContentNode> nodes = {
      node("counting-numbers", "Counting Numbers", num, 3, ContentLevel::Elementary, {}),
      node("positive-integer", "Positive Integer", num, 3, ContentLevel::Intermediate,
           {"counting-numbers"}),
      node("number-comparison", "Comparing Numbers", num, 3, ContentLevel::HighIntermediate,
           {"positive-integer"}),
      node("addition-subtraction", "Addition and Subtraction", num, 3, ContentLevel::Advanced,
           {"number-comparison"}),
      node("positive-number", "Positive Number", num, 4, ContentLevel::Elementary,
           {"positive-integer"}),
      node("number-line", "Number Line", num, 4, ContentLevel::Intermediate,
           {"positive-number"}),
      node("measurement-length", "Measuring Length", qty, 4, ContentLevel::Elementary, {}),
      node("number-line-distance", "Distance on the Number Line", qty, 4,
           ContentLevel::HighIntermediate, {"number-line", "measurement-length"}),
      node("four-operations", "Four Fundamental Operations", num, 4, ContentLevel::Advanced,
           {"number-line", "addition-subtraction"}),
      node("fractions-intro", "Introducing Fractions", num, 5, ContentLevel::Elementary,
           {"four-operations"}),
      node("decimals-number-line", "Decimals on the Number Line", num, 5,
           ContentLevel::Intermediate, {"number-line-distance", "fractions-intro"}),
      node("negative-numbers", "Negative Numbers", num, 5, ContentLevel::HighIntermediate,
           {"number-line"}),
      node("groups-of-numbers", "Groups of Numbers", num, 5, ContentLevel::Advanced,
           {"negative-numbers", "decimals-number-line"}),
      node("quantity-estimation", "Estimating Quantities", qty, 3, ContentLevel::Elementary,
           {}),
      node("mixed-numbers", "Mixed Numbers", num, 5, ContentLevel::Advanced,
           {"fractions-intro"}),
  };
  return ContentGraph(std::move(nodes));
}

}  // namespace fml
