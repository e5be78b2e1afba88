#include "automaton.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace dslforge::instance::detail {

using grammar::Cardinality;
using grammar::Expr;

std::string Label::key() const {
  std::string k;
  switch (match) {
    case Match::Keyword: k = "k:" + keyword; break;
    case Match::Terminal: k = "t:" + std::string(grammar::to_string(terminal)); break;
    case Match::Call: k = "c:" + std::to_string(callee); break;
  }
  k += '\x1f' + std::to_string(static_cast<int>(action.kind)) + '\x1f' + action.feature + '\x1f' +
       std::to_string(static_cast<int>(action.op)) + '\x1f' + action.type + '\x1f' + action.literal;
  return k;
}

std::string Label::describe() const {
  switch (match) {
    case Match::Keyword: return "'" + keyword + "'";
    case Match::Terminal: return std::string(grammar::to_string(terminal));
    case Match::Call: return "<rule>";
  }
  return "?";
}

int CompiledGrammar::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nonterminals.size(); ++i) {
    if (nonterminals[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

struct NfaEdge {
  bool epsilon = true;
  Label label;
  int target = 0;
};

struct Nfa {
  std::vector<std::vector<NfaEdge>> out;

  int add_state() {
    out.emplace_back();
    return static_cast<int>(out.size()) - 1;
  }
  void epsilon(int from, int to) { out[from].push_back({true, {}, to}); }
  void labeled(int from, int to, Label label) { out[from].push_back({false, std::move(label), to}); }
};

class NfaBuilder {
 public:
  NfaBuilder(const CompiledGrammar& g, Nfa& nfa, bool passthrough) : g_(g), nfa_(nfa), passthrough_(passthrough) {}

  // Adds a fragment for `e` from `from`; returns its end state.
  int build(const Expr& e, int from) {
    int start = nfa_.add_state();
    nfa_.epsilon(from, start);
    int end = core(e, start);
    switch (e.cardinality) {
      case Cardinality::One:
        return end;
      case Cardinality::Optional: {
        int exit = nfa_.add_state();
        nfa_.epsilon(end, exit);
        nfa_.epsilon(start, exit);
        return exit;
      }
      case Cardinality::ZeroOrMore: {
        int exit = nfa_.add_state();
        nfa_.epsilon(end, start);
        nfa_.epsilon(start, exit);
        return exit;
      }
      case Cardinality::OneOrMore: {
        int exit = nfa_.add_state();
        nfa_.epsilon(end, start);
        nfa_.epsilon(end, exit);
        return exit;
      }
    }
    return end;
  }

 private:
  Label terminal_label(const Expr& target) const {
    Label l;
    switch (target.kind) {
      case Expr::Kind::Keyword:
        l.match = Label::Match::Keyword;
        l.keyword = target.text;
        break;
      case Expr::Kind::TerminalCall:
        l.match = Label::Match::Terminal;
        l.terminal = target.terminal;
        break;
      case Expr::Kind::CrossRef:
        l.match = Label::Match::Terminal;
        l.terminal = grammar::Terminal::Id;
        break;
      case Expr::Kind::RuleCall:
        l.match = Label::Match::Call;
        l.callee = g_.index_of(target.text);
        break;
      default:
        break;
    }
    return l;
  }

  int core(const Expr& e, int start) {
    switch (e.kind) {
      case Expr::Kind::Sequence: {
        int cur = start;
        for (const auto& c : e.children) cur = build(c, cur);
        return cur;
      }
      case Expr::Kind::Alternatives: {
        int end = nfa_.add_state();
        for (const auto& c : e.children) nfa_.epsilon(build(c, start), end);
        return end;
      }
      case Expr::Kind::Group:
        return build(e.children.front(), start);
      case Expr::Kind::Keyword:
      case Expr::Kind::TerminalCall:
      case Expr::Kind::CrossRef:
      case Expr::Kind::RuleCall: {
        Label l = terminal_label(e);
        if (e.kind == Expr::Kind::RuleCall && passthrough_) l.action.kind = Action::Kind::Passthrough;
        int end = nfa_.add_state();
        nfa_.labeled(start, end, std::move(l));
        return end;
      }
      case Expr::Kind::Assignment: {
        const Expr& target = e.target();
        Label l = terminal_label(target);
        l.action.feature = e.text;
        l.action.op = e.op;
        if (target.kind == Expr::Kind::CrossRef) {
          l.action.kind = Action::Kind::CrossRef;
          l.action.type = target.text;
        } else {
          l.action.kind = Action::Kind::Assign;
        }
        int end = nfa_.add_state();
        nfa_.labeled(start, end, std::move(l));
        return end;
      }
    }
    return start;
  }

  const CompiledGrammar& g_;
  Nfa& nfa_;
  bool passthrough_;
};

std::vector<int> closure(const Nfa& nfa, std::vector<int> states) {
  std::set<int> seen(states.begin(), states.end());
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (const auto& e : nfa.out[states[i]]) {
      if (e.epsilon && seen.insert(e.target).second) states.push_back(e.target);
    }
  }
  return {seen.begin(), seen.end()};
}

Automaton determinize(const Nfa& nfa, int start, int accept) {
  Automaton dfa;
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> sets;
  auto intern = [&](std::vector<int> set) {
    auto [it, inserted] = ids.emplace(set, static_cast<int>(sets.size()));
    if (inserted) {
      sets.push_back(std::move(set));
      dfa.states.emplace_back();
    }
    return it->second;
  };
  intern(closure(nfa, {start}));
  for (std::size_t d = 0; d < sets.size(); ++d) {
    std::vector<std::string> order;
    std::map<std::string, std::pair<Label, std::vector<int>>> moves;
    bool accepting = false;
    for (int s : sets[d]) {
      if (s == accept) accepting = true;
      for (const auto& e : nfa.out[s]) {
        if (e.epsilon) continue;
        std::string k = e.label.key();
        auto it = moves.find(k);
        if (it == moves.end()) {
          order.push_back(k);
          it = moves.emplace(k, std::pair{e.label, std::vector<int>{}}).first;
        }
        it->second.second.push_back(e.target);
      }
    }
    dfa.states[d].accepting = accepting;
    for (const auto& k : order) {
      auto& [label, targets] = moves[k];
      int target = intern(closure(nfa, targets));
      dfa.states[d].edges.push_back({label, target});
    }
  }
  return dfa;
}

}  // namespace

void compile_automata(CompiledGrammar& g) {
  g.nonterminals.clear();
  for (const auto& r : g.ast.rules) {
    Nonterminal nt;
    nt.name = r.name;
    const grammar::MetaClass* cls = g.metamodel.find_class(r.name);
    nt.is_abstract = cls && cls->abstract;
    g.nonterminals.push_back(std::move(nt));
  }
  for (const auto& e : g.ast.enums) {
    Nonterminal nt;
    nt.name = e.name;
    nt.is_enum = true;
    g.nonterminals.push_back(std::move(nt));
  }
  g.entry = 0;

  for (std::size_t i = 0; i < g.ast.rules.size(); ++i) {
    Nfa nfa;
    int start = nfa.add_state();
    NfaBuilder builder(g, nfa, g.nonterminals[i].is_abstract);
    int end = builder.build(g.ast.rules[i].body, start);
    g.nonterminals[i].automaton = determinize(nfa, start, end);
  }
  for (std::size_t i = 0; i < g.ast.enums.size(); ++i) {
    Automaton a;
    a.states.resize(2);
    a.states[1].accepting = true;
    std::set<std::string> seen;
    for (const auto& lit : g.ast.enums[i].literals) {
      if (!seen.insert(lit.keyword).second) continue;
      Label l;
      l.match = Label::Match::Keyword;
      l.keyword = lit.keyword;
      l.action.kind = Action::Kind::EnumLiteral;
      l.action.literal = lit.name;
      a.states[0].edges.push_back({std::move(l), 1});
    }
    g.nonterminals[g.ast.rules.size() + i].automaton = std::move(a);
  }

  // Nullability over the automata: a start state that reaches an accepting
  // state through calls of nullable nonterminals only.
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& nt : g.nonterminals) {
      if (nt.nullable) continue;
      std::vector<int> stack{0};
      std::set<int> seen{0};
      bool found = false;
      while (!stack.empty() && !found) {
        int s = stack.back();
        stack.pop_back();
        if (nt.automaton.states[s].accepting) found = true;
        for (const auto& e : nt.automaton.states[s].edges) {
          if (e.label.match == Label::Match::Call && g.nonterminals[e.label.callee].nullable &&
              seen.insert(e.target).second) {
            stack.push_back(e.target);
          }
        }
      }
      if (found) {
        nt.nullable = true;
        changed = true;
      }
    }
  }
}

}  // namespace dslforge::instance::detail
