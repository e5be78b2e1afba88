#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dslforge/diagnostic.hpp"

namespace dslforge::grammar {

enum class Cardinality { One, Optional, ZeroOrMore, OneOrMore };
enum class Terminal { Id, Int, String };
enum class AssignOp { Single, Multi, Boolean };

std::string_view to_string(Terminal terminal);
std::optional<Terminal> terminal_from_name(std::string_view name);
std::string_view to_string(AssignOp op);
std::string_view to_string(Cardinality cardinality);

bool is_optional(Cardinality c);
bool is_repeated(Cardinality c);

/// One node of a rule body.
///
/// `text` holds the keyword literal (Keyword), the called rule (RuleCall), the
/// referenced type (CrossRef) or the feature name (Assignment). Sequence and
/// Alternatives keep their items in `children`; Group and Assignment have
/// exactly one child (the parenthesized expression or the assignment target).
struct Expr {
  enum class Kind { Sequence, Alternatives, Group, Keyword, TerminalCall, RuleCall, CrossRef, Assignment };

  Kind kind = Kind::Keyword;
  std::string text;
  Terminal terminal = Terminal::Id;
  AssignOp op = AssignOp::Single;
  Cardinality cardinality = Cardinality::One;
  std::vector<Expr> children;
  SourcePos pos;

  const Expr& target() const { return children.front(); }
  bool is_bare_rule_call() const {
    return kind == Kind::RuleCall && cardinality == Cardinality::One;
  }
};

struct Rule {
  std::string name;
  Expr body;
  SourcePos pos;
};

struct EnumLiteral {
  std::string name;
  std::string keyword;
  SourcePos pos;
};

struct EnumRule {
  std::string name;
  std::vector<EnumLiteral> literals;
  SourcePos pos;
};

/// Parsed grammar. The first parser rule is the entry rule. Duplicated names
/// are representable on purpose so validation can report them.
struct GrammarAst {
  std::string name;
  std::vector<Rule> rules;
  std::vector<EnumRule> enums;

  const Rule* entry() const { return rules.empty() ? nullptr : &rules.front(); }
  const Rule* find_rule(std::string_view name) const;
  const EnumRule* find_enum(std::string_view name) const;
};

/// Equality ignoring source positions.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const GrammarAst& a, const GrammarAst& b);

/// Visits `expr` and all nested expressions in source order.
template <class F>
void walk(const Expr& expr, F&& visit) {
  visit(expr);
  for (const auto& child : expr.children) walk(child, visit);
}

/// Every keyword literal used by rules and enum literals, in first-use order.
std::vector<std::string> collect_keywords(const GrammarAst& ast);

}  // namespace dslforge::grammar
