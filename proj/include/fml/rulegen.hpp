#pragma once

// Rule-base construction: the 256-rule student-performance base (SA, LCD,
// SCL, STS -> SLP), the 20-rule content-recommendation base (SA, SLP -> RLCR),
// and the baseline knowledge base both are anchored to.

#include <array>
#include <cstdlib>
#include <string>
#include <vector>

#include "fml/model.hpp"

namespace fml {

/// Index of a linguistic term per input variable, 0..3 each.
struct TermIndexTuple {
  int sa = 0;
  int lcd = 0;
  int scl = 0;
  int sts = 0;
};

inline constexpr std::array<const char*, 4> kSaTerms = {"BelowBasic", "Basic",
                                                        "Proficient", "Advanced"};
inline constexpr std::array<const char*, 4> kLcdTerms = {"VeryEasy", "Easy", "Average",
                                                         "Hard"};
inline constexpr std::array<const char*, 4> kSclTerms = {"Distracted", "Nonfocused",
                                                         "Focused", "Absorbed"};
inline constexpr std::array<const char*, 4> kStsTerms = {"Passive", "Normal",
                                                         "Initiative", "Positive"};
inline constexpr std::array<const char*, 5> kSlpTerms = {"FallBehind", "Insufficient",
                                                         "Basic", "Good", "Excellent"};
inline constexpr std::array<const char*, 8> kRlcrTerms = {"LGHIL", "LGAL", "CGEL",
                                                          "CGIL",  "CGHIL", "CGAL",
                                                          "NGEL",  "NGIL"};

/// Performance category index (0=FallBehind .. 4=Excellent) for a term-index
/// combination. Monotone integer score: ability counts four times, content
/// difficulty counts against, concentration and teamwork count once each.
inline int slp_category(const TermIndexTuple& t) {
  const int s = 4 * t.sa - t.lcd + t.scl + t.sts;
  if (s <= 3) return 0;
  if (s <= 6) return 1;
  if (s <= 9) return 2;
  if (s <= 11) return 3;
  return 4;
}

/// Decode rule number k (1-based, SA outermost / STS innermost) into term
/// indices: k-1 written in base 4.
inline TermIndexTuple slp_rule_indices(int rule_number) {
  const int idx = rule_number - 1;
  return TermIndexTuple{idx / 64, (idx / 16) % 4, (idx / 4) % 4, idx % 4};
}

/// All 256 rules of the performance rule base, weights 1.0.
inline std::vector<Rule> build_slp_rulebase() {
  std::vector<Rule> rules;
  rules.reserve(256);
  for (int k = 1; k <= 256; ++k) {
    const TermIndexTuple t = slp_rule_indices(k);
    Rule r;
    r.name = "rule-" + std::to_string(k);
    r.antecedent = {{"SA", kSaTerms[static_cast<std::size_t>(t.sa)]},
                    {"LCD", kLcdTerms[static_cast<std::size_t>(t.lcd)]},
                    {"SCL", kSclTerms[static_cast<std::size_t>(t.scl)]},
                    {"STS", kStsTerms[static_cast<std::size_t>(t.sts)]}};
    r.consequent = {"SLP", kSlpTerms[static_cast<std::size_t>(slp_category(t))]};
    rules.push_back(std::move(r));
  }
  return rules;
}

/// The 20 recommendation rules (SA-term, SLP-term) -> RLCR-term, weights 1.0.
inline std::vector<Rule> build_rlcr_rulebase() {
  // Row-major over SA (outer) and SLP (inner), consequent by rank name.
  static constexpr std::array<const char*, 20> kConsequents = {
      "LGHIL", "LGAL", "LGAL", "CGEL", "CGIL",   // BelowBasic
      "LGAL",  "CGEL", "CGIL", "CGHIL", "CGAL",  // Basic
      "CGIL",  "CGHIL", "CGAL", "CGAL", "NGEL",  // Proficient
      "CGAL",  "CGAL", "NGEL", "NGIL", "NGIL"};  // Advanced
  std::vector<Rule> rules;
  rules.reserve(20);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 5; ++j) {
      const int k = i * 5 + j;
      Rule r;
      r.name = "rule-" + std::to_string(k + 1);
      r.antecedent = {{"SA", kSaTerms[static_cast<std::size_t>(i)]},
                      {"SLP", kSlpTerms[static_cast<std::size_t>(j)]}};
      r.consequent = {"RLCR", kConsequents[static_cast<std::size_t>(k)]};
      rules.push_back(std::move(r));
    }
  }
  return rules;
}

namespace detail {

inline FuzzyVariable make_variable(std::string name, double left, double right,
                                   VariableKind kind,
                                   const std::vector<std::pair<const char*, TrapezoidShape>>& terms) {
  FuzzyVariable v;
  v.name = std::move(name);
  v.domain_left = left;
  v.domain_right = right;
  v.kind = kind;
  v.default_value = 0.0;
  for (const auto& [term_name, shape] : terms) {
    FuzzyTerm t;
    t.name = term_name;
    t.shape = shape;
    v.terms.push_back(std::move(t));
  }
  return v;
}

}  // namespace detail

/// The hand-authored assessment knowledge base: four inputs with four terms
/// each, the five-term performance output, and the full 256-rule base.
inline FuzzySystem baseline_part1_system() {
  FuzzySystem sys;
  sys.name = "SLFSystemRB";
  sys.network_address = "127.0.0.1";

  const std::vector<std::pair<const char*, TrapezoidShape>> ability_shapes = {
      {"", {-4, -4, -1.11, -0.6}},
      {"", {-1.11, -0.6, 0.05, 0.4}},
      {"", {0.05, 0.4, 0.95, 1.5}},
      {"", {0.95, 1.5, 4, 4}}};
  const std::vector<std::pair<const char*, TrapezoidShape>> level_shapes = {
      {"", {0, 0, 2, 3}}, {"", {2, 3, 4, 5}}, {"", {4, 5, 6, 7}}, {"", {6, 7, 10, 10}}};

  auto with_names = [](std::vector<std::pair<const char*, TrapezoidShape>> shapes,
                       const auto& names) {
    for (std::size_t i = 0; i < shapes.size(); ++i) shapes[i].first = names[i];
    return shapes;
  };

  sys.variables.push_back(detail::make_variable("SA", -4, 4, VariableKind::Input,
                                                with_names(ability_shapes, kSaTerms)));
  sys.variables.push_back(detail::make_variable("LCD", -4, 4, VariableKind::Input,
                                                with_names(ability_shapes, kLcdTerms)));
  sys.variables.push_back(detail::make_variable("SCL", 0, 10, VariableKind::Input,
                                                with_names(level_shapes, kSclTerms)));
  sys.variables.push_back(detail::make_variable("STS", 0, 10, VariableKind::Input,
                                                with_names(level_shapes, kStsTerms)));
  sys.variables.push_back(detail::make_variable(
      "SLP", 0, 1, VariableKind::Output,
      {{"FallBehind", {0.0, 0.0, 0.2, 0.3}},
       {"Insufficient", {0.2, 0.3, 0.4, 0.5}},
       {"Basic", {0.4, 0.5, 0.6, 0.7}},
       {"Good", {0.6, 0.7, 0.8, 0.9}},
       {"Excellent", {0.8, 0.9, 1.0, 1.0}}}));

  sys.rules = build_slp_rulebase();
  return sys;
}

}  // namespace fml
