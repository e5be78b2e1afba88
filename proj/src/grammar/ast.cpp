#include "dslforge/grammar/ast.hpp"

#include <algorithm>

namespace dslforge::grammar {

std::string_view to_string(Terminal terminal) {
  switch (terminal) {
    case Terminal::Id: return "ID";
    case Terminal::Int: return "INT";
    case Terminal::String: return "STRING";
  }
  return "ID";
}

std::optional<Terminal> terminal_from_name(std::string_view name) {
  if (name == "ID") return Terminal::Id;
  if (name == "INT") return Terminal::Int;
  if (name == "STRING") return Terminal::String;
  return std::nullopt;
}

std::string_view to_string(AssignOp op) {
  switch (op) {
    case AssignOp::Single: return "=";
    case AssignOp::Multi: return "+=";
    case AssignOp::Boolean: return "?=";
  }
  return "=";
}

std::string_view to_string(Cardinality cardinality) {
  switch (cardinality) {
    case Cardinality::One: return "";
    case Cardinality::Optional: return "?";
    case Cardinality::ZeroOrMore: return "*";
    case Cardinality::OneOrMore: return "+";
  }
  return "";
}

bool is_optional(Cardinality c) {
  return c == Cardinality::Optional || c == Cardinality::ZeroOrMore;
}

bool is_repeated(Cardinality c) {
  return c == Cardinality::ZeroOrMore || c == Cardinality::OneOrMore;
}

const Rule* GrammarAst::find_rule(std::string_view rule) const {
  auto it = std::find_if(rules.begin(), rules.end(), [&](const Rule& r) { return r.name == rule; });
  return it == rules.end() ? nullptr : &*it;
}

const EnumRule* GrammarAst::find_enum(std::string_view name_) const {
  auto it = std::find_if(enums.begin(), enums.end(), [&](const EnumRule& e) { return e.name == name_; });
  return it == enums.end() ? nullptr : &*it;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.cardinality != b.cardinality ||
      a.children.size() != b.children.size()) {
    return false;
  }
  if (a.kind == Expr::Kind::TerminalCall && a.terminal != b.terminal) return false;
  if (a.kind == Expr::Kind::Assignment && a.op != b.op) return false;
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!structurally_equal(a.children[i], b.children[i])) return false;
  }
  return true;
}

bool structurally_equal(const GrammarAst& a, const GrammarAst& b) {
  if (a.name != b.name || a.rules.size() != b.rules.size() || a.enums.size() != b.enums.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.rules.size(); ++i) {
    if (a.rules[i].name != b.rules[i].name) return false;
    if (!structurally_equal(a.rules[i].body, b.rules[i].body)) return false;
  }
  for (std::size_t i = 0; i < a.enums.size(); ++i) {
    const auto& x = a.enums[i];
    const auto& y = b.enums[i];
    if (x.name != y.name || x.literals.size() != y.literals.size()) return false;
    for (std::size_t j = 0; j < x.literals.size(); ++j) {
      if (x.literals[j].name != y.literals[j].name || x.literals[j].keyword != y.literals[j].keyword) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::string> collect_keywords(const GrammarAst& ast) {
  std::vector<std::string> out;
  auto add = [&](const std::string& k) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  for (const auto& rule : ast.rules) {
    walk(rule.body, [&](const Expr& e) {
      if (e.kind == Expr::Kind::Keyword) add(e.text);
    });
  }
  for (const auto& e : ast.enums) {
    for (const auto& lit : e.literals) add(lit.keyword);
  }
  return out;
}

}  // namespace dslforge::grammar
