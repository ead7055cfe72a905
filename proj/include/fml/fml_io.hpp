#pragma once

// Reader and writer for the FML XML dialect: a fuzzySystem element holding a
// knowledgeBase of trapezoid variables and a Mamdani rule base with
// clause-style rules. The writer emits a canonical form; the reader also
// accepts the corpus quirks (lower-case domain attributes, the
// `mandaniRuleBase` spelling).

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fml/model.hpp"
#include "fml/xml.hpp"

namespace fml {

enum class FmlErrorKind {
  MalformedXml,
  UnknownShape,
  UnknownElement,
  DanglingReference,
  MissingAttribute,
  UnsupportedValue,
  InvalidSystemError,
};

class FmlError : public std::runtime_error {
 public:
  FmlError(FmlErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  FmlErrorKind kind() const { return kind_; }

 private:
  FmlErrorKind kind_;
};

enum class ParseMode { Strict, Lenient };

namespace fml_detail {

inline const std::string& require_attr(const xml::Element& el, std::string_view key) {
  const std::string* v = el.attr_ci(key);
  if (!v)
    throw FmlError(FmlErrorKind::MissingAttribute,
                   "<" + el.name + "> is missing attribute '" + std::string(key) + "'");
  return *v;
}

inline double require_number(const xml::Element& el, std::string_view key) {
  try {
    return xml::parse_number(require_attr(el, key), "<" + el.name + "> " + std::string(key));
  } catch (const xml::ParseError& e) {
    throw FmlError(FmlErrorKind::MalformedXml, e.what());
  }
}

inline bool parse_bool(const std::string& v, const std::string& context) {
  if (v == "true" || v == "TRUE" || v == "True") return true;
  if (v == "false" || v == "FALSE" || v == "False") return false;
  throw FmlError(FmlErrorKind::UnsupportedValue, context + ": expected true/false, got '" + v + "'");
}

inline Hedge parse_hedge(const std::string& v) {
  if (v == "very") return Hedge::Very;
  if (v == "moreOrLess") return Hedge::MoreOrLess;
  if (v == "none") return Hedge::None;
  throw FmlError(FmlErrorKind::UnsupportedValue, "unknown hedge '" + v + "'");
}

inline void unknown_child(const xml::Element& parent, const xml::Element& child,
                          ParseMode mode, std::vector<std::string>* warnings) {
  if (mode == ParseMode::Strict)
    throw FmlError(FmlErrorKind::UnknownElement,
                   "unexpected <" + child.name + "> inside <" + parent.name + ">");
  if (warnings)
    warnings->push_back("skipped unknown element <" + child.name + "> inside <" +
                        parent.name + ">");
}

inline std::string trimmed(std::string s) {
  const auto is_ws = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_ws(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  while (!s.empty() && is_ws(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

inline FuzzyTerm parse_term(const xml::Element& el, ParseMode mode,
                            std::vector<std::string>* warnings) {
  FuzzyTerm t;
  t.name = require_attr(el, "name");
  if (const std::string* c = el.attr_ci("complement"))
    t.complement = parse_bool(*c, "term '" + t.name + "' complement");
  if (const std::string* h = el.attr_ci("hedge")) t.hedge = parse_hedge(*h);
  TermMeta meta;
  bool has_meta = false;
  if (const std::string* a = el.attr_ci("area")) { meta.area = *a; has_meta = true; }
  if (const std::string* g = el.attr_ci("grade")) { meta.grade = *g; has_meta = true; }
  if (const std::string* s = el.attr_ci("subject")) { meta.subject = *s; has_meta = true; }
  if (has_meta) t.meta = std::move(meta);

  bool have_shape = false;
  for (const auto& child : el.children) {
    if (child.name == "trapezoidShape") {
      if (have_shape)
        throw FmlError(FmlErrorKind::MalformedXml,
                       "term '" + t.name + "' has more than one shape element");
      t.shape.a = require_number(child, "param1");
      t.shape.b = require_number(child, "param2");
      t.shape.c = require_number(child, "param3");
      t.shape.d = require_number(child, "param4");
      have_shape = true;
    } else if (child.name.size() > 5 &&
               child.name.compare(child.name.size() - 5, 5, "Shape") == 0) {
      throw FmlError(FmlErrorKind::UnknownShape,
                     "unsupported shape <" + child.name + "> in term '" + t.name + "'");
    } else {
      unknown_child(el, child, mode, warnings);
    }
  }
  if (!have_shape)
    throw FmlError(FmlErrorKind::MissingAttribute,
                   "term '" + t.name + "' has no trapezoidShape element");
  return t;
}

inline FuzzyVariable parse_variable(const xml::Element& el, ParseMode mode,
                                    std::vector<std::string>* warnings) {
  FuzzyVariable v;
  v.name = require_attr(el, "name");
  v.domain_left = require_number(el, "domainLeft");
  v.domain_right = require_number(el, "domainRight");
  const std::string& type = require_attr(el, "type");
  if (type == "Input" || type == "input") {
    v.kind = VariableKind::Input;
  } else if (type == "Output" || type == "output") {
    v.kind = VariableKind::Output;
  } else {
    throw FmlError(FmlErrorKind::UnsupportedValue,
                   "variable '" + v.name + "': unknown type '" + type + "'");
  }
  if (const std::string* acc = el.attr_ci("accumulation"); acc && *acc != "MAX")
    throw FmlError(FmlErrorKind::UnsupportedValue,
                   "variable '" + v.name + "': unsupported accumulation '" + *acc + "'");
  if (const std::string* df = el.attr_ci("defuzzifier"); df && *df != "COG")
    throw FmlError(FmlErrorKind::UnsupportedValue,
                   "variable '" + v.name + "': unsupported defuzzifier '" + *df + "'");
  if (el.attr_ci("defaultValue")) v.default_value = require_number(el, "defaultValue");

  for (const auto& child : el.children) {
    if (child.name == "fuzzyTerm")
      v.terms.push_back(parse_term(child, mode, warnings));
    else
      unknown_child(el, child, mode, warnings);
  }
  return v;
}

inline RuleClause parse_clause(const xml::Element& el) {
  RuleClause cl;
  bool have_var = false, have_term = false;
  for (const auto& child : el.children) {
    if (child.name == "variable") {
      cl.variable = trimmed(child.text);
      have_var = true;
    } else if (child.name == "term") {
      cl.term = trimmed(child.text);
      have_term = true;
    }
  }
  if (!have_var || !have_term)
    throw FmlError(FmlErrorKind::MissingAttribute,
                   "<clause> needs <variable> and <term> children");
  return cl;
}

inline Rule parse_rule(const xml::Element& el, ParseMode mode,
                       std::vector<std::string>* warnings) {
  Rule r;
  r.name = require_attr(el, "name");
  if (el.attr_ci("weight")) r.weight = require_number(el, "weight");
  if (const std::string* c = el.attr_ci("connector")) {
    if (*c == "AND" || *c == "and") r.connector = Connector::And;
    else if (*c == "OR" || *c == "or") r.connector = Connector::Or;
    else
      throw FmlError(FmlErrorKind::UnsupportedValue,
                     "rule '" + r.name + "': unknown connector '" + *c + "'");
  }
  if (const std::string* m = el.attr_ci("andMethod"); m && *m != "MIN")
    throw FmlError(FmlErrorKind::UnsupportedValue,
                   "rule '" + r.name + "': unsupported andMethod '" + *m + "'");
  if (const std::string* m = el.attr_ci("orMethod"); m && *m != "MAX")
    throw FmlError(FmlErrorKind::UnsupportedValue,
                   "rule '" + r.name + "': unsupported orMethod '" + *m + "'");

  bool have_consequent = false;
  for (const auto& child : el.children) {
    if (child.name == "antecedent") {
      for (const auto& cl : child.children) {
        if (cl.name == "clause")
          r.antecedent.push_back(parse_clause(cl));
        else
          unknown_child(child, cl, mode, warnings);
      }
    } else if (child.name == "consequent") {
      for (const auto& cl : child.children) {
        if (cl.name == "clause") {
          if (have_consequent)
            throw FmlError(FmlErrorKind::MalformedXml,
                           "rule '" + r.name + "' has more than one consequent clause");
          r.consequent = parse_clause(cl);
          have_consequent = true;
        } else {
          unknown_child(child, cl, mode, warnings);
        }
      }
    } else {
      unknown_child(el, child, mode, warnings);
    }
  }
  if (r.antecedent.empty())
    throw FmlError(FmlErrorKind::MissingAttribute,
                   "rule '" + r.name + "' has no antecedent clauses");
  if (!have_consequent)
    throw FmlError(FmlErrorKind::MissingAttribute,
                   "rule '" + r.name + "' has no consequent clause");
  return r;
}

inline std::vector<Rule> parse_rulebase_element(const xml::Element& el, ParseMode mode,
                                                std::vector<std::string>* warnings) {
  std::vector<Rule> rules;
  for (const auto& child : el.children) {
    if (child.name == "rule")
      rules.push_back(parse_rule(child, mode, warnings));
    else
      unknown_child(el, child, mode, warnings);
  }
  return rules;
}

inline void check_references(const FuzzySystem& sys) {
  for (const auto& r : sys.rules) {
    auto check = [&](const RuleClause& cl) {
      const FuzzyVariable* v = sys.find_variable(cl.variable);
      if (!v)
        throw FmlError(FmlErrorKind::DanglingReference,
                       "rule '" + r.name + "' references unknown variable '" +
                           cl.variable + "'");
      if (!v->find_term(cl.term))
        throw FmlError(FmlErrorKind::DanglingReference,
                       "rule '" + r.name + "' references unknown term '" + cl.variable +
                           "." + cl.term + "'");
    };
    for (const auto& cl : r.antecedent) check(cl);
    check(r.consequent);
  }
}

}  // namespace fml_detail

/// Parse one fuzzySystem document. Strict mode rejects unknown child
/// elements; lenient mode skips them, reporting through `warnings`.
inline FuzzySystem parse_fml(std::string_view text, ParseMode mode = ParseMode::Strict,
                             std::vector<std::string>* warnings = nullptr) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const xml::ParseError& e) {
    throw FmlError(FmlErrorKind::MalformedXml, e.what());
  }
  if (root.name != "fuzzySystem")
    throw FmlError(FmlErrorKind::MalformedXml,
                   "expected <fuzzySystem> root, found <" + root.name + ">");

  FuzzySystem sys;
  sys.name = fml_detail::require_attr(root, "name");
  sys.network_address.clear();
  if (const std::string* na = root.attr_ci("networkAddress")) sys.network_address = *na;

  for (const auto& child : root.children) {
    if (child.name == "knowledgeBase") {
      for (const auto& el : child.children) {
        if (el.name == "fuzzyVariable")
          sys.variables.push_back(fml_detail::parse_variable(el, mode, warnings));
        else
          fml_detail::unknown_child(child, el, mode, warnings);
      }
    } else if (child.name == "mamdaniRuleBase" || child.name == "mandaniRuleBase") {
      auto rules = fml_detail::parse_rulebase_element(child, mode, warnings);
      sys.rules.insert(sys.rules.end(), rules.begin(), rules.end());
    } else {
      fml_detail::unknown_child(root, child, mode, warnings);
    }
  }

  fml_detail::check_references(sys);
  if (auto violations = validate(sys); !violations.empty())
    throw FmlError(FmlErrorKind::InvalidSystemError,
                   "parsed system is invalid: " + violations.front());
  return sys;
}

/// Parse a standalone rule-base element (rule override files).
inline std::vector<Rule> parse_fml_rulebase(std::string_view text,
                                            ParseMode mode = ParseMode::Strict,
                                            std::vector<std::string>* warnings = nullptr) {
  xml::Element root;
  try {
    root = xml::parse(text);
  } catch (const xml::ParseError& e) {
    throw FmlError(FmlErrorKind::MalformedXml, e.what());
  }
  if (root.name != "mamdaniRuleBase" && root.name != "mandaniRuleBase")
    throw FmlError(FmlErrorKind::MalformedXml,
                   "expected <mamdaniRuleBase> root, found <" + root.name + ">");
  return fml_detail::parse_rulebase_element(root, mode, warnings);
}

/// Serialize to canonical FML: canonical attribute casing, `mamdaniRuleBase`
/// spelling, shortest round-trip numbers. Output is deterministic, so two
/// serializations of the same system are byte-identical.
inline std::string serialize_fml(const FuzzySystem& sys) {
  if (auto violations = validate(sys); !violations.empty())
    throw FmlError(FmlErrorKind::InvalidSystemError,
                   "cannot serialize invalid system: " + violations.front());

  using Attrs = std::vector<std::pair<std::string, std::string>>;
  xml::Writer w;
  w.open("fuzzySystem", Attrs{{"name", sys.name}, {"networkAddress", sys.network_address}});
  w.open("knowledgeBase", Attrs{{"networkAddress", sys.network_address}});
  for (const auto& v : sys.variables) {
    Attrs attrs = {{"name", v.name},
                   {"domainLeft", xml::format_number(v.domain_left)},
                   {"domainRight", xml::format_number(v.domain_right)},
                   {"type", v.kind == VariableKind::Input ? "Input" : "Output"},
                   {"accumulation", "MAX"},
                   {"defuzzifier", "COG"},
                   {"defaultValue", xml::format_number(v.default_value)}};
    w.open("fuzzyVariable", attrs);
    for (const auto& t : v.terms) {
      Attrs term_attrs = {{"name", t.name}, {"complement", t.complement ? "true" : "false"}};
      if (t.hedge == Hedge::Very) term_attrs.emplace_back("hedge", "very");
      if (t.hedge == Hedge::MoreOrLess) term_attrs.emplace_back("hedge", "moreOrLess");
      if (t.meta) {
        if (t.meta->area) term_attrs.emplace_back("area", *t.meta->area);
        if (t.meta->grade) term_attrs.emplace_back("grade", *t.meta->grade);
        if (t.meta->subject) term_attrs.emplace_back("subject", *t.meta->subject);
      }
      w.open("fuzzyTerm", term_attrs);
      w.open("trapezoidShape",
             Attrs{{"param1", xml::format_number(t.shape.a)},
                   {"param2", xml::format_number(t.shape.b)},
                   {"param3", xml::format_number(t.shape.c)},
                   {"param4", xml::format_number(t.shape.d)}},
             /*self_close=*/true);
      w.close("fuzzyTerm");
    }
    w.close("fuzzyVariable");
  }
  w.close("knowledgeBase");

  const Attrs rb_attrs = {{"name", sys.name},
                          {"activationMethod", "MIN"},
                          {"andMethod", "MIN"},
                          {"orMethod", "MAX"},
                          {"networkAddress", sys.network_address}};
  if (sys.rules.empty()) {
    w.open("mamdaniRuleBase", rb_attrs, /*self_close=*/true);
  } else {
    w.open("mamdaniRuleBase", rb_attrs);
    for (const auto& r : sys.rules) {
      w.open("rule", Attrs{{"name", r.name},
                           {"connector", r.connector == Connector::And ? "AND" : "OR"},
                           {"weight", xml::format_number(r.weight)},
                           {"andMethod", "MIN"},
                           {"orMethod", "MAX"}});
      w.open("antecedent", {});
      for (const auto& cl : r.antecedent) {
        w.open("clause", {});
        w.leaf_text("variable", cl.variable);
        w.leaf_text("term", cl.term);
        w.close("clause");
      }
      w.close("antecedent");
      w.open("consequent", {});
      w.open("clause", {});
      w.leaf_text("variable", r.consequent.variable);
      w.leaf_text("term", r.consequent.term);
      w.close("clause");
      w.close("consequent");
      w.close("rule");
    }
    w.close("mamdaniRuleBase");
  }
  w.close("fuzzySystem");
  return w.str();
}

}  // namespace fml
