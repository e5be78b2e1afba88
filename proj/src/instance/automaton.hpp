#pragma once

// Per-rule deterministic automata over terminal and rule-call labels. Each
// rule body is a regular expression over those labels; Earley items walk
// these automata instead of flattened BNF productions.

#include <string>
#include <vector>

#include "dslforge/grammar/ast.hpp"
#include "dslforge/grammar/metamodel.hpp"

namespace dslforge::instance::detail {

struct Action {
  enum class Kind { None, Assign, CrossRef, EnumLiteral, Passthrough };
  Kind kind = Kind::None;
  std::string feature;
  grammar::AssignOp op = grammar::AssignOp::Single;
  std::string type;     // CrossRef target type
  std::string literal;  // EnumLiteral name
};

struct Label {
  enum class Match { Keyword, Terminal, Call };
  Match match = Match::Keyword;
  std::string keyword;
  grammar::Terminal terminal = grammar::Terminal::Id;
  int callee = -1;
  Action action;

  std::string key() const;
  std::string describe() const;  // for expected-token messages
};

struct Edge {
  Label label;
  int target = 0;
};

struct State {
  std::vector<Edge> edges;
  bool accepting = false;
};

struct Automaton {
  std::vector<State> states;  // state 0 is the start state
};

struct Nonterminal {
  std::string name;
  bool is_enum = false;
  bool is_abstract = false;
  bool nullable = false;
  Automaton automaton;
};

struct CompiledGrammar {
  grammar::GrammarAst ast;
  grammar::MetaModel metamodel;
  std::vector<std::string> keywords;
  std::vector<Nonterminal> nonterminals;  // parser rules first, then enums
  int entry = 0;

  int index_of(const std::string& name) const;
};

/// Builds automata for every rule and enum of a validated grammar.
void compile_automata(CompiledGrammar& g);

}  // namespace dslforge::instance::detail
