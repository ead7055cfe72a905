#pragma once

// Mamdani inference: trapezoid fuzzification with hedges, MIN rule
// activation, MAX accumulation, and discretized centroid defuzzification.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fml/model.hpp"

namespace fml {

struct MissingInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroArea : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Piecewise-linear trapezoid membership: 0 outside [a,d], 1 on [b,c],
/// linear ramps between. A degenerate point shape (a=b=c=d) is 1 exactly at
/// a and 0 elsewhere.
inline double membership(const TrapezoidShape& s, double x) {
  if (x < s.a || x > s.d) return 0.0;
  if (x < s.b) return (x - s.a) / (s.b - s.a);
  if (x <= s.c) return 1.0;
  return (s.d - x) / (s.d - s.c);
}

inline double apply_hedge(double degree, Hedge h) {
  switch (h) {
    case Hedge::Very:
      return degree * degree;
    case Hedge::MoreOrLess:
      return std::sqrt(degree);
    case Hedge::None:
      break;
  }
  return degree;
}

/// Membership of a configured term: shape, then complement, then hedge.
inline double term_membership(const FuzzyTerm& t, double x) {
  double m = membership(t.shape, x);
  if (t.complement) m = 1.0 - m;
  return apply_hedge(m, t.hedge);
}

using CrispInput = std::map<std::string, double>;

struct InferenceResult {
  double crisp_value = 0.0;
  std::string winning_term;
  std::map<std::string, double> term_degrees;  // output-term membership at crisp_value
  bool clamped = false;                        // some input fell outside its domain
};

struct InferenceOptions {
  int cog_samples = 1001;
};

/// Discretized centroid over [left,right]: sum(x*mu(x)) / sum(mu(x)) on
/// `samples` uniformly spaced points including both endpoints. Throws
/// ZeroArea when the membership is identically zero on the grid.
template <class MembershipFn>
double defuzzify_cog(MembershipFn&& mu, double left, double right, int samples = 1001) {
  if (samples < 2) throw std::invalid_argument("defuzzify_cog: samples must be >= 2");
  const double step = (right - left) / static_cast<double>(samples - 1);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = (i == samples - 1) ? right : left + step * static_cast<double>(i);
    const double m = mu(x);
    num += x * m;
    den += m;
  }
  if (den == 0.0) throw ZeroArea("defuzzify_cog: membership is identically zero");
  return num / den;
}

/// Antecedent strength of one rule at a crisp input: weight times the MIN
/// over clauses of the hedged (and complemented, if flagged) membership.
inline double rule_strength(const FuzzySystem& sys, const Rule& rule,
                            const CrispInput& input) {
  double m = 1.0;
  for (const auto& cl : rule.antecedent) {
    const FuzzyVariable* v = sys.find_variable(cl.variable);
    if (!v) throw InvalidSystem("rule references unknown variable '" + cl.variable + "'");
    const FuzzyTerm* t = v->find_term(cl.term);
    if (!t) throw InvalidSystem("rule references unknown term '" + cl.term + "'");
    auto it = input.find(cl.variable);
    if (it == input.end())
      throw MissingInput("no value for input variable '" + cl.variable + "'");
    m = std::min(m, term_membership(*t, it->second));
  }
  return rule.weight * m;
}

/// Compiled form of a validate-clean system for repeated evaluation. All data
/// is copied in; the evaluator is immutable and safe to share across threads.
class Evaluator {
 public:
  struct Scratch {
    std::vector<double> aggregated;
  };

  explicit Evaluator(const FuzzySystem& sys, InferenceOptions opts = {})
      : opts_(opts) {
    if (auto violations = validate(sys); !violations.empty())
      throw InvalidSystem("cannot evaluate invalid system: " + violations.front());

    for (const auto& v : sys.variables) {
      if (v.kind != VariableKind::Input) continue;
      InputVar in;
      in.name = v.name;
      in.left = v.domain_left;
      in.right = v.domain_right;
      for (const auto& t : v.terms) in.terms.push_back(compile_term(t));
      inputs_.push_back(std::move(in));
      input_names_.push_back(v.name);
    }

    const FuzzyVariable& out = *sys.output_variable();
    out_name_ = out.name;
    out_left_ = out.domain_left;
    out_right_ = out.domain_right;
    out_default_ = out.default_value;
    for (const auto& t : out.terms) {
      out_terms_.push_back(compile_term(t));
      out_term_names_.push_back(t.name);
    }

    for (const auto& r : sys.rules) {
      CompiledRule cr;
      cr.weight = r.weight;
      for (const auto& cl : r.antecedent) {
        int slot = -1;
        for (std::size_t i = 0; i < inputs_.size(); ++i)
          if (inputs_[i].name == cl.variable) slot = static_cast<int>(i);
        const FuzzyVariable* v = sys.find_variable(cl.variable);
        cr.clauses.push_back({slot, v->term_index(cl.term)});
      }
      cr.consequent_term = out.term_index(r.consequent.term);
      rules_.push_back(std::move(cr));
    }

    build_output_grid();
  }

  const std::vector<std::string>& input_names() const { return input_names_; }
  std::size_t input_count() const { return inputs_.size(); }
  const std::string& output_name() const { return out_name_; }
  int cog_samples() const { return opts_.cog_samples; }

  /// Crisp output for inputs given in input-variable order. Out-of-domain
  /// values are clamped; `clamped`, when non-null, reports that it happened.
  double infer_crisp(std::span<const double> inputs, Scratch& scratch,
                     bool* clamped = nullptr) const {
    if (inputs.size() != inputs_.size())
      throw MissingInput("expected " + std::to_string(inputs_.size()) +
                         " input values, got " + std::to_string(inputs.size()));

    // Hedged membership of every input term.
    double memberships[kMaxInputTerms];
    for (std::size_t i = 0; i < inputs_.size(); ++i) {
      const InputVar& v = inputs_[i];
      double x = inputs[i];
      if (x < v.left || x > v.right) {
        x = std::clamp(x, v.left, v.right);
        if (clamped) *clamped = true;
      }
      for (std::size_t t = 0; t < v.terms.size(); ++t)
        memberships[i * kMaxTermsPerVar + t] = eval_term(v.terms[t], x);
    }

    // MIN activation per rule, MAX accumulation per consequent term.
    std::vector<double> strength(out_terms_.size(), 0.0);
    for (const CompiledRule& r : rules_) {
      double m = 1.0;
      for (const auto& [slot, term] : r.clauses) {
        m = std::min(m, memberships[static_cast<std::size_t>(slot) * kMaxTermsPerVar +
                                    static_cast<std::size_t>(term)]);
        if (m == 0.0) break;
      }
      const double s = r.weight * m;
      if (s > strength[static_cast<std::size_t>(r.consequent_term)])
        strength[static_cast<std::size_t>(r.consequent_term)] = s;
    }

    // Output hedge applies to the clipped consequent membership; for a
    // monotone hedge h, h(min(s, mu)) == min(h(s), h(mu)), so the grid holds
    // hedged memberships and the clip level is hedged here.
    bool any = false;
    double levels[kMaxOutTerms];
    for (std::size_t t = 0; t < out_terms_.size(); ++t) {
      levels[t] = apply_hedge(strength[t], out_terms_[t].hedge);
      any = any || levels[t] > 0.0;
    }
    if (!any) return out_default_;  // no rule fires

    const int n = opts_.cog_samples;
    auto& agg = scratch.aggregated;
    agg.assign(static_cast<std::size_t>(n), 0.0);
    for (std::size_t t = 0; t < out_terms_.size(); ++t) {
      const double level = levels[t];
      if (level <= 0.0) continue;
      const OutputGridRow& row = grid_[t];
      for (int i = row.lo; i <= row.hi; ++i) {
        const double m = std::min(level, row.values[static_cast<std::size_t>(i)]);
        if (m > agg[static_cast<std::size_t>(i)]) agg[static_cast<std::size_t>(i)] = m;
      }
    }

    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
      num += xs_[static_cast<std::size_t>(i)] * agg[static_cast<std::size_t>(i)];
      den += agg[static_cast<std::size_t>(i)];
    }
    if (den == 0.0) return out_default_;  // ZeroArea: substitute default
    return num / den;
  }

  InferenceResult infer(std::span<const double> inputs) const {
    Scratch scratch;
    InferenceResult res;
    res.crisp_value = infer_crisp(inputs, scratch, &res.clamped);
    fill_term_degrees(res);
    return res;
  }

  InferenceResult infer(const CrispInput& input) const {
    std::vector<double> values;
    values.reserve(inputs_.size());
    for (const auto& v : inputs_) {
      auto it = input.find(v.name);
      if (it == input.end())
        throw MissingInput("no value for input variable '" + v.name + "'");
      values.push_back(it->second);
    }
    return infer(values);
  }

 private:
  static constexpr std::size_t kMaxTermsPerVar = 16;
  static constexpr std::size_t kMaxInputTerms = 16 * kMaxTermsPerVar;
  static constexpr std::size_t kMaxOutTerms = 64;

  struct CompiledTerm {
    TrapezoidShape shape;
    bool complement;
    Hedge hedge;
  };

  struct InputVar {
    std::string name;
    double left, right;
    std::vector<CompiledTerm> terms;
  };

  struct CompiledRule {
    std::vector<std::pair<int, int>> clauses;  // (input slot, term index)
    int consequent_term;
    double weight;
  };

  struct OutputGridRow {
    std::vector<double> values;  // hedged membership at each sample
    int lo = 0, hi = -1;         // first/last sample with positive membership
  };

  static CompiledTerm compile_term(const FuzzyTerm& t) {
    return CompiledTerm{t.shape, t.complement, t.hedge};
  }

  static double eval_term(const CompiledTerm& t, double x) {
    double m = membership(t.shape, x);
    if (t.complement) m = 1.0 - m;
    return apply_hedge(m, t.hedge);
  }

  void build_output_grid() {
    if (opts_.cog_samples < 2)
      throw std::invalid_argument("cog_samples must be >= 2");
    if (inputs_.empty()) throw InvalidSystem("system has no input variables");
    if (inputs_.size() > 16 || out_terms_.size() > kMaxOutTerms)
      throw InvalidSystem("system too large for evaluator");
    for (const auto& v : inputs_)
      if (v.terms.size() > kMaxTermsPerVar)
        throw InvalidSystem("too many terms per variable for evaluator");

    const int n = opts_.cog_samples;
    const double step = (out_right_ - out_left_) / static_cast<double>(n - 1);
    xs_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      xs_[static_cast<std::size_t>(i)] =
          (i == n - 1) ? out_right_ : out_left_ + step * static_cast<double>(i);

    grid_.resize(out_terms_.size());
    for (std::size_t t = 0; t < out_terms_.size(); ++t) {
      OutputGridRow& row = grid_[t];
      row.values.resize(static_cast<std::size_t>(n));
      row.lo = n;
      row.hi = -1;
      for (int i = 0; i < n; ++i) {
        const double m = eval_term(out_terms_[t], xs_[static_cast<std::size_t>(i)]);
        row.values[static_cast<std::size_t>(i)] = m;
        if (m > 0.0) {
          row.lo = std::min(row.lo, i);
          row.hi = std::max(row.hi, i);
        }
      }
      if (row.hi < row.lo) {  // term never positive on the grid
        row.lo = 0;
        row.hi = -1;
      }
    }
  }

  void fill_term_degrees(InferenceResult& res) const {
    double best = -1.0;
    std::size_t best_idx = 0;
    for (std::size_t t = 0; t < out_terms_.size(); ++t) {
      const double m = eval_term(out_terms_[t], res.crisp_value);
      res.term_degrees[out_term_names_[t]] = m;
      if (m > best) {
        best = m;
        best_idx = t;
      }
    }
    res.winning_term = out_term_names_[best_idx];
  }

  InferenceOptions opts_;
  std::vector<InputVar> inputs_;
  std::vector<CompiledRule> rules_;
  std::string out_name_;
  double out_left_ = 0, out_right_ = 1, out_default_ = 0;
  std::vector<CompiledTerm> out_terms_;
  std::vector<std::string> out_term_names_;
  std::vector<double> xs_;
  std::vector<OutputGridRow> grid_;
  std::vector<std::string> input_names_;
};

/// One-shot Mamdani inference. For repeated evaluation construct an
/// Evaluator once and reuse it.
inline InferenceResult infer(const FuzzySystem& sys, const CrispInput& input,
                             InferenceOptions opts = {}) {
  return Evaluator(sys, opts).infer(input);
}

}  // namespace fml
