#pragma once

// Core domain types of the fuzzy knowledge base: trapezoidal terms,
// linguistic variables, Mamdani rules, and the assembled system.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fml {

struct TrapezoidShape {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  bool ordered() const { return a <= b && b <= c && c <= d; }

  friend bool operator==(const TrapezoidShape&, const TrapezoidShape&) = default;
};

enum class Hedge { None, Very, MoreOrLess };

enum class VariableKind { Input, Output };
enum class Accumulation { Max };
enum class Defuzzifier { Cog };
enum class Connector { And, Or };  // Or is parseable but rejected by validate()
enum class AndMethod { Min };
enum class OrMethod { Max };

/// Optional ontology attributes attached to a linguistic concept.
struct TermMeta {
  std::optional<std::string> area;
  std::optional<std::string> grade;
  std::optional<std::string> subject;

  friend bool operator==(const TermMeta&, const TermMeta&) = default;
};

struct FuzzyTerm {
  std::string name;
  TrapezoidShape shape;
  bool complement = false;
  Hedge hedge = Hedge::None;
  std::optional<TermMeta> meta;

  friend bool operator==(const FuzzyTerm&, const FuzzyTerm&) = default;
};

struct FuzzyVariable {
  std::string name;
  double domain_left = 0.0;
  double domain_right = 1.0;
  VariableKind kind = VariableKind::Input;
  Accumulation accumulation = Accumulation::Max;
  Defuzzifier defuzzifier = Defuzzifier::Cog;
  double default_value = 0.0;
  std::vector<FuzzyTerm> terms;

  double domain_width() const { return domain_right - domain_left; }

  const FuzzyTerm* find_term(std::string_view term_name) const {
    for (const auto& t : terms)
      if (t.name == term_name) return &t;
    return nullptr;
  }

  int term_index(std::string_view term_name) const {
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (terms[i].name == term_name) return static_cast<int>(i);
    return -1;
  }

  friend bool operator==(const FuzzyVariable&, const FuzzyVariable&) = default;
};

struct RuleClause {
  std::string variable;
  std::string term;

  friend bool operator==(const RuleClause&, const RuleClause&) = default;
};

struct Rule {
  std::string name;
  std::vector<RuleClause> antecedent;
  RuleClause consequent;
  Connector connector = Connector::And;
  double weight = 1.0;
  AndMethod and_method = AndMethod::Min;
  OrMethod or_method = OrMethod::Max;

  friend bool operator==(const Rule&, const Rule&) = default;
};

struct FuzzySystem {
  std::string name;
  std::vector<FuzzyVariable> variables;
  std::vector<Rule> rules;
  std::string network_address = "127.0.0.1";  // re-emitted verbatim, never interpreted

  const FuzzyVariable* find_variable(std::string_view var_name) const {
    for (const auto& v : variables)
      if (v.name == var_name) return &v;
    return nullptr;
  }

  const FuzzyVariable* output_variable() const {
    for (const auto& v : variables)
      if (v.kind == VariableKind::Output) return &v;
    return nullptr;
  }

  std::vector<const FuzzyVariable*> input_variables() const {
    std::vector<const FuzzyVariable*> out;
    for (const auto& v : variables)
      if (v.kind == VariableKind::Input) out.push_back(&v);
    return out;
  }

  friend bool operator==(const FuzzySystem&, const FuzzySystem&) = default;
};

/// Structural checks over a system. Returns one human-readable violation per
/// problem; an empty list means the system is well-formed. Violations are
/// data, not failures.
inline std::vector<std::string> validate(const FuzzySystem& sys) {
  std::vector<std::string> out;
  auto bad = [&out](std::string msg) { out.push_back(std::move(msg)); };

  int output_count = 0;
  for (const auto& v : sys.variables)
    if (v.kind == VariableKind::Output) ++output_count;
  if (output_count != 1)
    bad("system '" + sys.name + "' must have exactly one Output variable, has " +
        std::to_string(output_count));

  for (std::size_t i = 0; i < sys.variables.size(); ++i) {
    const auto& v = sys.variables[i];
    for (std::size_t j = i + 1; j < sys.variables.size(); ++j)
      if (sys.variables[j].name == v.name)
        bad("duplicate variable name '" + v.name + "'");

    if (!(v.domain_left < v.domain_right))
      bad("variable '" + v.name + "': domainLeft must be < domainRight");
    if (v.terms.size() < 2)
      bad("variable '" + v.name + "': needs at least 2 terms");
    if (v.default_value < v.domain_left || v.default_value > v.domain_right)
      bad("variable '" + v.name + "': defaultValue outside domain");

    for (std::size_t t = 0; t < v.terms.size(); ++t) {
      const auto& term = v.terms[t];
      for (std::size_t u = t + 1; u < v.terms.size(); ++u)
        if (v.terms[u].name == term.name)
          bad("variable '" + v.name + "': duplicate term name '" + term.name + "'");
      if (!term.shape.ordered())
        bad("term '" + v.name + "." + term.name + "': shape parameters not ascending");
      if (term.shape.a < v.domain_left || term.shape.d > v.domain_right)
        bad("term '" + v.name + "." + term.name + "': shape outside variable domain");
      if (term.meta) {
        auto check = [&](const std::optional<std::string>& f, const char* what) {
          if (f && f->empty())
            bad("term '" + v.name + "." + term.name + "': empty " + what + " attribute");
        };
        check(term.meta->area, "area");
        check(term.meta->grade, "grade");
        check(term.meta->subject, "subject");
      }
    }
  }

  const FuzzyVariable* output = sys.output_variable();
  for (const auto& r : sys.rules) {
    if (r.weight < 0.0 || r.weight > 1.0)
      bad("rule '" + r.name + "': weight outside [0,1]");
    if (r.connector != Connector::And)
      bad("rule '" + r.name + "': only AND connectors are supported");
    if (r.antecedent.empty())
      bad("rule '" + r.name + "': empty antecedent");
    auto check_clause = [&](const RuleClause& cl, const char* where) {
      const FuzzyVariable* v = sys.find_variable(cl.variable);
      if (!v) {
        bad("rule '" + r.name + "': " + where + " references unknown variable '" +
            cl.variable + "'");
        return;
      }
      if (!v->find_term(cl.term))
        bad("rule '" + r.name + "': " + where + " references unknown term '" +
            cl.variable + "." + cl.term + "'");
    };
    for (const auto& cl : r.antecedent) check_clause(cl, "antecedent");
    check_clause(r.consequent, "consequent");
    if (output && r.consequent.variable != output->name)
      bad("rule '" + r.name + "': consequent does not target the output variable");
  }

  return out;
}

}  // namespace fml
