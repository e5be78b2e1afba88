#include "dslforge/grammar/validator.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

#include "dslforge/grammar/parser.hpp"
#include "type_inference.hpp"

namespace dslforge::grammar {
namespace {

using Kind = Expr::Kind;

class Validator {
 public:
  explicit Validator(const GrammarAst& ast) : ast_(ast) {
    for (std::size_t i = 0; i < ast_.rules.size(); ++i) rule_index_.emplace(ast_.rules[i].name, i);
  }

  std::vector<Diagnostic> run() {
    check_duplicates();
    check_references();
    check_entry_rule();
    check_left_recursion();
    check_types();
    check_unused();
    return std::move(out_);
  }

 private:
  void emit(ErrorCategory category, std::string message, SourcePos pos, std::optional<std::string> offending,
            Severity severity = Severity::Error) {
    out_.push_back(make_diagnostic(category, std::move(message), pos, std::move(offending), severity));
  }

  void check_duplicates() {
    struct Decl {
      std::string name;
      SourcePos pos;
      bool is_enum;
    };
    std::vector<Decl> decls;
    for (const auto& r : ast_.rules) decls.push_back({r.name, r.pos, false});
    for (const auto& e : ast_.enums) decls.push_back({e.name, e.pos, true});
    std::stable_sort(decls.begin(), decls.end(), [](const Decl& a, const Decl& b) {
      return std::pair(a.pos.line, a.pos.column) < std::pair(b.pos.line, b.pos.column);
    });
    std::set<std::string> seen;
    for (const auto& d : decls) {
      if (terminal_from_name(d.name)) {
        emit(ErrorCategory::InvalidState, "rule '" + d.name + "' redefines a built-in terminal", d.pos, d.name);
      } else if (!seen.insert(d.name).second) {
        emit(ErrorCategory::InvalidState, std::string("duplicated rule '") + d.name + "'", d.pos, d.name);
      }
    }
    for (const auto& e : ast_.enums) {
      std::set<std::string> literals;
      for (const auto& lit : e.literals) {
        if (!literals.insert(lit.name).second) {
          emit(ErrorCategory::InvalidState,
               "duplicated literal '" + lit.name + "' in enum '" + e.name + "'", lit.pos, lit.name);
        }
      }
    }
  }

  void check_references() {
    for (const auto& rule : ast_.rules) {
      std::set<std::string> reported;
      walk(rule.body, [&](const Expr& e) {
        if (e.kind == Kind::RuleCall) {
          if (!ast_.find_rule(e.text) && !ast_.find_enum(e.text) && reported.insert(e.text).second) {
            emit(ErrorCategory::Linking,
                 "non-resolvable reference to rule '" + e.text + "' in rule '" + rule.name + "'", e.pos, e.text);
          }
        } else if (e.kind == Kind::CrossRef) {
          if (ast_.find_rule(e.text)) return;
          if (ast_.find_enum(e.text)) {
            emit(ErrorCategory::Transformation,
                 "cross-reference to enum '" + e.text + "' in rule '" + rule.name + "'; references need a rule type",
                 e.pos, e.text);
          } else if (reported.insert(e.text).second) {
            emit(ErrorCategory::Linking,
                 "non-resolvable reference to type '" + e.text + "' in rule '" + rule.name + "'", e.pos, e.text);
          }
        }
      });
    }
  }

  void check_entry_rule() {
    if (ast_.rules.empty()) {
      emit(ErrorCategory::InvalidState, "missing start parsing rule: grammar '" + ast_.name + "' has no parser rule",
           SourcePos{}, ast_.name);
    }
  }

  void left_callees(const Expr& e, const std::vector<bool>& nullable, std::vector<std::size_t>& out) const {
    switch (e.kind) {
      case Kind::RuleCall:
        if (auto it = rule_index_.find(e.text); it != rule_index_.end()) out.push_back(it->second);
        break;
      case Kind::Assignment:
      case Kind::Group:
        left_callees(e.children.front(), nullable, out);
        break;
      case Kind::Alternatives:
        for (const auto& c : e.children) left_callees(c, nullable, out);
        break;
      case Kind::Sequence:
        for (const auto& c : e.children) {
          left_callees(c, nullable, out);
          if (!expr_nullable(c, nullable)) break;
        }
        break;
      default:
        break;
    }
  }

  bool expr_nullable(const Expr& e, const std::vector<bool>& nullable) const {
    return grammar::detail::expr_nullable(ast_, e, nullable, rule_index_);
  }

  void check_left_recursion() {
    auto nullable = nullable_rules(ast_);
    std::size_t n = ast_.rules.size();
    std::vector<std::vector<std::size_t>> graph(n);
    for (std::size_t i = 0; i < n; ++i) left_callees(ast_.rules[i].body, nullable, graph[i]);

    std::vector<bool> reported(n, false);
    for (std::size_t start = 0; start < n; ++start) {
      if (reported[start]) continue;
      // BFS for the shortest left-derivation path back to `start`.
      std::vector<long> parent(n, -1);
      std::vector<bool> visited(n, false);
      std::vector<std::size_t> queue{start};
      long found = -1;
      for (std::size_t qi = 0; qi < queue.size() && found < 0; ++qi) {
        std::size_t u = queue[qi];
        for (std::size_t v : graph[u]) {
          if (v == start) {
            found = static_cast<long>(u);
            break;
          }
          if (!visited[v]) {
            visited[v] = true;
            parent[v] = static_cast<long>(u);
            queue.push_back(v);
          }
        }
      }
      if (found < 0) continue;
      std::vector<std::size_t> path;
      for (long u = found; u >= 0 && static_cast<std::size_t>(u) != start; u = parent[u]) {
        path.push_back(static_cast<std::size_t>(u));
      }
      path.push_back(start);
      std::reverse(path.begin(), path.end());
      std::string chain;
      for (std::size_t u : path) {
        chain += ast_.rules[u].name + " -> ";
        reported[u] = true;
      }
      chain += ast_.rules[start].name;
      const Rule& r = ast_.rules[start];
      emit(ErrorCategory::InvalidState, "left recursion in rule '" + r.name + "': " + chain, r.pos, r.name);
    }
  }

  void check_types() {
    detail::TypeEnvironment env(ast_);
    for (const auto& rule : ast_.rules) {
      walk(rule.body, [&](const Expr& e) {
        if (e.kind == Kind::Assignment && e.op == AssignOp::Boolean && e.target().kind != Kind::Keyword) {
          emit(ErrorCategory::Transformation,
               "boolean assignment '" + e.text + "?=' requires a keyword, found " + print_expr(e.target()), e.pos,
               e.text);
        }
      });
      for (auto& problem : env.feature_conflicts(rule)) {
        emit(ErrorCategory::Transformation, std::move(problem.message), problem.pos, problem.feature);
      }
      check_single_repeats(rule);
    }
  }

  // Features assigned with '=' (or '?=') somewhere inside `e`.
  static void single_features(const Expr& e, std::map<std::string, SourcePos>& out) {
    walk(e, [&](const Expr& x) {
      if (x.kind == Kind::Assignment && x.op != AssignOp::Multi) out.emplace(x.text, x.pos);
    });
  }

  void check_single_repeats(const Rule& rule) {
    std::set<std::string> reported;
    auto report = [&](const std::string& feature, SourcePos pos) {
      if (!reported.insert(feature).second) return;
      emit(ErrorCategory::Transformation,
           "feature '" + feature + "' of rule '" + rule.name + "' is assigned with '=' more than once in one derivation",
           pos, feature);
    };
    walk(rule.body, [&](const Expr& e) {
      if (is_repeated(e.cardinality)) {
        std::map<std::string, SourcePos> inner;
        single_features(e, inner);
        for (const auto& [feature, pos] : inner) report(feature, pos);
      }
      if (e.kind != Kind::Sequence) return;
      std::map<std::string, SourcePos> seen;
      for (const auto& child : e.children) {
        std::map<std::string, SourcePos> here;
        single_features(child, here);
        for (const auto& [feature, pos] : here) {
          if (seen.count(feature)) report(feature, pos);
        }
        seen.insert(here.begin(), here.end());
      }
    });
  }

  void check_unused() {
    if (ast_.rules.empty()) return;
    std::set<std::string> used{ast_.rules.front().name};
    std::vector<const Rule*> work{&ast_.rules.front()};
    while (!work.empty()) {
      const Rule* r = work.back();
      work.pop_back();
      walk(r->body, [&](const Expr& e) {
        if (e.kind != Kind::RuleCall && e.kind != Kind::CrossRef) return;
        if (!used.insert(e.text).second) return;
        if (const Rule* callee = ast_.find_rule(e.text)) work.push_back(callee);
      });
    }
    std::set<std::string> warned;
    for (const auto& r : ast_.rules) {
      if (!used.count(r.name) && warned.insert(r.name).second) {
        emit(ErrorCategory::Other, "rule '" + r.name + "' is never used", r.pos, r.name, Severity::Warning);
      }
    }
    for (const auto& e : ast_.enums) {
      if (!used.count(e.name) && warned.insert(e.name).second) {
        emit(ErrorCategory::Other, "enum '" + e.name + "' is never used", e.pos, e.name, Severity::Warning);
      }
    }
  }

  const GrammarAst& ast_;
  std::map<std::string, std::size_t> rule_index_;
  std::vector<Diagnostic> out_;
};

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_any(const std::string& haystack, std::initializer_list<std::string_view> needles) {
  return std::any_of(needles.begin(), needles.end(),
                     [&](std::string_view n) { return haystack.find(n) != std::string::npos; });
}

}  // namespace

std::vector<Diagnostic> validate_grammar(const GrammarAst& ast) { return Validator(ast).run(); }

std::vector<bool> nullable_rules(const GrammarAst& ast) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ast.rules.size(); ++i) index.emplace(ast.rules[i].name, i);
  std::vector<bool> nullable(ast.rules.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < ast.rules.size(); ++i) {
      if (!nullable[i] && detail::expr_nullable(ast, ast.rules[i].body, nullable, index)) {
        nullable[i] = true;
        changed = true;
      }
    }
  }
  return nullable;
}

ErrorCategory classify_error(std::string_view message, Phase phase) {
  // Rendered diagnostics carry their category explicitly.
  if (message.size() > 2 && message.front() == '[') {
    if (auto close = message.find(']'); close != std::string_view::npos) {
      if (auto category = category_from_string(message.substr(1, close - 1))) return *category;
    }
  }
  std::string m = lowercase(message);
  if (contains_any(m, {"duplicate", "missing start", "start parsing rule", "entry rule", "left recursi",
                       "invalid cross-reference", "invalid state"})) {
    return ErrorCategory::InvalidState;
  }
  if (contains_any(m, {"non-resolvable", "unresolved", "cannot resolve", "couldn't resolve", "could not resolve",
                       "unknown rule", "linking"})) {
    return ErrorCategory::Linking;
  }
  if (contains_any(m, {"type", "?=", "boolean assignment", "conflict", "transformation", "assigned with"})) {
    return ErrorCategory::Transformation;
  }
  if (contains_any(m, {"mismatched", "missing", "expected", "expecting", "unexpected", "extraneous", "no viable",
                       "unterminated", "invalid symbol", "unbalanced", "did not match", "syntax"})) {
    return ErrorCategory::Syntax;
  }
  return phase == Phase::Parse ? ErrorCategory::Syntax : ErrorCategory::Other;
}

}  // namespace dslforge::grammar
