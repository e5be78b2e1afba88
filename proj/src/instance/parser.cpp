#include "dslforge/instance/parser.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <map>
#include <set>
#include <tuple>
#include <unordered_set>

#include "automaton.hpp"
#include "dslforge/grammar/validator.hpp"

namespace dslforge::instance {

using detail::Action;
using detail::CompiledGrammar;
using detail::Label;

namespace {

constexpr std::size_t kMaxPaths = 8;
constexpr std::size_t kMaxValues = 2;

struct Item {
  int nt;
  int state;
  int origin;
  friend bool operator==(const Item&, const Item&) = default;
};

struct ItemHash {
  std::size_t operator()(const Item& i) const noexcept {
    return (static_cast<std::size_t>(i.nt) * 1000003u) ^ (static_cast<std::size_t>(i.state) * 8191u) ^
           static_cast<std::size_t>(i.origin);
  }
};

bool matches(const Label& label, const Token& tok) {
  switch (label.match) {
    case Label::Match::Keyword:
      return tok.kind == TokenKind::Keyword && tok.text == label.keyword;
    case Label::Match::Terminal:
      switch (label.terminal) {
        case grammar::Terminal::Id: return tok.kind == TokenKind::Id;
        case grammar::Terminal::Int: return tok.kind == TokenKind::Int;
        case grammar::Terminal::String: return tok.kind == TokenKind::String;
      }
      return false;
    case Label::Match::Call:
      return false;
  }
  return false;
}

struct Chart {
  std::vector<std::vector<Item>> sets;
  std::vector<std::set<std::pair<int, int>>> completed;  // (nt, origin) per end position
  std::size_t furthest = 0;                             // last non-empty set
};

class Recognizer {
 public:
  Recognizer(const CompiledGrammar& g, const std::vector<Token>& tokens) : g_(g), tokens_(tokens) {}

  Chart run() {
    std::size_t n = tokens_.size();
    chart_.sets.assign(n + 1, {});
    chart_.completed.assign(n + 1, {});
    seen_.assign(n + 1, {});
    add(0, {g_.entry, 0, 0});
    for (std::size_t i = 0; i <= n; ++i) {
      if (chart_.sets[i].empty()) break;
      chart_.furthest = i;
      for (std::size_t k = 0; k < chart_.sets[i].size(); ++k) {
        Item item = chart_.sets[i][k];
        const auto& state = g_.nonterminals[item.nt].automaton.states[item.state];
        for (const auto& edge : state.edges) {
          if (edge.label.match == Label::Match::Call) {
            add(i, {edge.label.callee, 0, static_cast<int>(i)});
            if (g_.nonterminals[edge.label.callee].nullable) add(i, {item.nt, edge.target, item.origin});
          } else if (i < n && matches(edge.label, tokens_[i])) {
            add(i + 1, {item.nt, edge.target, item.origin});
          }
        }
        if (state.accepting) complete(i, item);
      }
    }
    return std::move(chart_);
  }

 private:
  void add(std::size_t set, Item item) {
    if (seen_[set].insert(item).second) chart_.sets[set].push_back(item);
  }

  void complete(std::size_t i, const Item& done) {
    if (!chart_.completed[i].insert({done.nt, done.origin}).second) return;
    // The origin set may still grow when origin == i; index-based loop sees it.
    auto& parents = chart_.sets[done.origin];
    for (std::size_t k = 0; k < parents.size(); ++k) {
      Item parent = parents[k];
      for (const auto& edge : g_.nonterminals[parent.nt].automaton.states[parent.state].edges) {
        if (edge.label.match == Label::Match::Call && edge.label.callee == done.nt) {
          add(i, {parent.nt, edge.target, parent.origin});
        }
      }
    }
  }

  const CompiledGrammar& g_;
  const std::vector<Token>& tokens_;
  Chart chart_;
  std::vector<std::unordered_set<Item, ItemHash>> seen_;
};

bool accepted(const Chart& chart, const CompiledGrammar& g, std::size_t n) {
  return chart.completed[n].count({g.entry, 0}) > 0;
}

std::vector<std::string> expected_at(const Chart& chart, const CompiledGrammar& g, std::size_t i) {
  std::vector<std::string> out;
  for (const auto& item : chart.sets[i]) {
    for (const auto& edge : g.nonterminals[item.nt].automaton.states[item.state].edges) {
      if (edge.label.match == Label::Match::Call) continue;
      std::string d = edge.label.describe();
      if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
  }
  return out;
}

std::string expecting(const std::vector<std::string>& expected) {
  if (expected.empty()) return "";
  if (expected.size() == 1) return " expecting " + expected.front();
  std::string s = " expecting one of ";
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i) s += ", ";
    s += expected[i];
  }
  return s;
}

// ---- derivation extraction ----

struct Step {
  const Action* action;
  Value value;
};
using Path = std::vector<Step>;

bool values_equal(const Value& a, const Value& b) {
  if (a.index() != b.index()) return false;
  if (auto* x = std::get_if<NodePtr>(&a)) return structurally_equal(**x, *std::get<NodePtr>(b));
  if (auto* x = std::get_if<Reference>(&a)) {
    const auto& y = std::get<Reference>(b);
    return x->name == y.name && x->type == y.type;
  }
  if (auto* x = std::get_if<std::string>(&a)) return *x == std::get<std::string>(b);
  if (auto* x = std::get_if<std::int64_t>(&a)) return *x == std::get<std::int64_t>(b);
  if (auto* x = std::get_if<bool>(&a)) return *x == std::get<bool>(b);
  return std::get<EnumValue>(a) == std::get<EnumValue>(b);
}

bool paths_equal(const Path& a, const Path& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].action->kind != b[i].action->kind || a[i].action->feature != b[i].action->feature) return false;
    if (!values_equal(a[i].value, b[i].value)) return false;
  }
  return true;
}

struct IntOverflow {
  SourcePos pos;
  std::string text;
};

class Extractor {
 public:
  Extractor(const CompiledGrammar& g, const std::vector<Token>& tokens, const Chart& chart)
      : g_(g), tokens_(tokens), chart_(chart) {}

  std::vector<Value> derive(int nt, int start, int end) {
    auto key = std::tuple{nt, start, end};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!active_.insert(key).second) return {};
    walk_memo_.emplace_back();
    std::vector<Path> paths = walk(nt, 0, start, end);
    walk_memo_.pop_back();
    active_.erase(key);

    std::vector<Value> values;
    const auto& def = g_.nonterminals[nt];
    for (auto& path : paths) {
      std::optional<Value> v = build(def, start, path);
      if (!v) continue;
      bool dup = std::any_of(values.begin(), values.end(), [&](const Value& x) { return values_equal(x, *v); });
      if (!dup) values.push_back(std::move(*v));
      if (values.size() >= kMaxValues) break;
    }
    memo_.emplace(key, values);
    return values;
  }

 private:
  std::vector<Path> walk(int nt, int state, int pos, int end) {
    auto& memo = walk_memo_.back();
    auto key = std::pair{state, pos};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    memo[key] = {};  // cut epsilon cycles

    std::vector<Path> out;
    auto push = [&](Path p) {
      if (out.size() >= kMaxPaths) return;
      for (const auto& q : out) {
        if (paths_equal(p, q)) return;
      }
      out.push_back(std::move(p));
    };
    const auto& st = g_.nonterminals[nt].automaton.states[state];
    if (pos == end && st.accepting) push({});
    for (const auto& edge : st.edges) {
      const Label& l = edge.label;
      if (l.match == Label::Match::Call) {
        for (int j = pos; j <= end; ++j) {
          bool derives = chart_.completed[j].count({l.callee, pos}) > 0 ||
                         (j == pos && g_.nonterminals[l.callee].nullable);
          if (!derives) continue;
          std::vector<Value> children = derive(l.callee, pos, j);
          if (children.empty()) continue;
          std::vector<Path> rests = walk(nt, edge.target, j, end);
          for (const auto& child : children) {
            for (const auto& rest : rests) {
              Path p;
              if (l.action.kind != Action::Kind::None) p.push_back({&l.action, child});
              p.insert(p.end(), rest.begin(), rest.end());
              push(std::move(p));
            }
          }
        }
      } else if (pos < end && matches(l, tokens_[pos])) {
        std::vector<Path> rests = walk(nt, edge.target, pos + 1, end);
        if (rests.empty()) continue;
        std::optional<Step> step;
        if (l.action.kind != Action::Kind::None) step = Step{&l.action, terminal_value(l, tokens_[pos])};
        for (const auto& rest : rests) {
          Path p;
          if (step) p.push_back(*step);
          p.insert(p.end(), rest.begin(), rest.end());
          push(std::move(p));
        }
      }
    }
    memo[key] = out;
    return out;
  }

  Value terminal_value(const Label& l, const Token& tok) {
    const Action& a = l.action;
    switch (a.kind) {
      case Action::Kind::EnumLiteral:
        return EnumValue{a.literal};
      case Action::Kind::CrossRef:
        return Reference{tok.text, a.type, tok.pos};
      default:
        break;
    }
    if (a.op == grammar::AssignOp::Boolean) return true;
    if (tok.kind == TokenKind::Int) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
        if (!overflow) overflow = IntOverflow{tok.pos, tok.text};
      }
      return v;
    }
    return tok.text;
  }

  std::optional<Value> build(const detail::Nonterminal& def, int start, const Path& path) {
    if (def.is_enum) {
      for (const auto& s : path) {
        if (s.action->kind == Action::Kind::EnumLiteral) return s.value;
      }
      return std::nullopt;
    }
    if (def.is_abstract) {
      for (const auto& s : path) {
        if (s.action->kind == Action::Kind::Passthrough && std::holds_alternative<NodePtr>(s.value)) return s.value;
      }
      return std::nullopt;
    }
    auto node = std::make_shared<InstanceNode>();
    node->class_name = def.name;
    node->pos = start < static_cast<int>(tokens_.size()) ? tokens_[start].pos : end_pos;
    for (const auto& s : path) {
      if (s.action->kind == Action::Kind::Passthrough || s.action->feature.empty()) continue;
      Feature* f = nullptr;
      for (auto& existing : node->features) {
        if (existing.name == s.action->feature) f = &existing;
      }
      if (!f) {
        const grammar::MetaFeature* decl = g_.metamodel.lookup_feature(def.name, s.action->feature);
        node->features.push_back({s.action->feature, decl ? decl->many : false, {}});
        f = &node->features.back();
      }
      if (f->many) {
        f->values.push_back(s.value);
      } else {
        f->values.assign(1, s.value);
      }
    }
    order_features(*node);
    return Value{NodePtr(std::move(node))};
  }

  void order_features(InstanceNode& node) const {
    const grammar::MetaClass* cls = g_.metamodel.find_class(node.class_name);
    auto rank = [&](const Feature& f) -> std::size_t {
      if (!cls) return 0;
      for (std::size_t i = 0; i < cls->features.size(); ++i) {
        if (cls->features[i].name == f.name) return i;
      }
      return cls->features.size();
    };
    std::stable_sort(node.features.begin(), node.features.end(),
                     [&](const Feature& a, const Feature& b) { return rank(a) < rank(b); });
  }

  const CompiledGrammar& g_;
  const std::vector<Token>& tokens_;
  const Chart& chart_;
  std::map<std::tuple<int, int, int>, std::vector<Value>> memo_;
  std::set<std::tuple<int, int, int>> active_;
  std::deque<std::map<std::pair<int, int>, std::vector<Path>>> walk_memo_;  // stable references

 public:
  SourcePos end_pos;
  std::optional<IntOverflow> overflow;
};

// ---- cross-reference linking ----

void collect_named(const NodePtr& node, std::vector<const InstanceNode*>& out) {
  out.push_back(node.get());
  for (const auto& f : node->features) {
    for (const auto& v : f.values) {
      if (auto* child = std::get_if<NodePtr>(&v)) collect_named(*child, out);
    }
  }
}

void check_links(const NodePtr& node, const std::vector<const InstanceNode*>& all, const grammar::MetaModel& mm,
                 std::vector<Diagnostic>& diags) {
  for (const auto& f : node->features) {
    for (const auto& v : f.values) {
      if (auto* child = std::get_if<NodePtr>(&v)) {
        check_links(*child, all, mm, diags);
      } else if (auto* ref = std::get_if<Reference>(&v)) {
        bool found = std::any_of(all.begin(), all.end(), [&](const InstanceNode* n) {
          if (!mm.is_subtype(n->class_name, ref->type)) return false;
          const Feature* name = n->find("name");
          if (!name || name->values.empty()) return false;
          const auto* s = std::get_if<std::string>(&name->values.back());
          return s && *s == ref->name;
        });
        if (!found) {
          diags.push_back(make_diagnostic(ErrorCategory::Linking,
                                          "couldn't resolve reference to " + ref->type + " '" + ref->name + "'",
                                          ref->pos, ref->name));
        }
      }
    }
  }
}

}  // namespace

InstanceParser::InstanceParser(std::unique_ptr<CompiledGrammar> compiled) : compiled_(std::move(compiled)) {}
InstanceParser::InstanceParser(InstanceParser&&) noexcept = default;
InstanceParser& InstanceParser::operator=(InstanceParser&&) noexcept = default;
InstanceParser::~InstanceParser() = default;

Result<InstanceParser> InstanceParser::create(const grammar::GrammarAst& ast) {
  std::vector<Diagnostic> diags = grammar::validate_grammar(ast);
  if (has_errors(diags)) {
    std::erase_if(diags, [](const Diagnostic& d) { return !d.is_error(); });
    return diags;
  }
  auto mm = grammar::derive_metamodel(ast);
  if (!mm.ok()) return mm.diagnostics();
  auto compiled = std::make_unique<CompiledGrammar>();
  compiled->ast = ast;
  compiled->metamodel = mm.value();
  compiled->keywords = grammar::collect_keywords(ast);
  detail::compile_automata(*compiled);
  return InstanceParser(std::move(compiled));
}

const grammar::MetaModel& InstanceParser::metamodel() const { return compiled_->metamodel; }
const std::vector<std::string>& InstanceParser::keywords() const { return compiled_->keywords; }

bool InstanceParser::recognizes(const std::vector<Token>& tokens) const {
  Chart chart = Recognizer(*compiled_, tokens).run();
  return accepted(chart, *compiled_, tokens.size());
}

Result<InstanceModel> InstanceParser::parse(std::string_view text) const {
  const CompiledGrammar& g = *compiled_;
  auto lexed = tokenize(text, g.keywords);
  if (!lexed.ok()) return lexed.diagnostics();
  const std::vector<Token>& tokens = lexed.value();
  std::size_t n = tokens.size();

  Chart chart = Recognizer(g, tokens).run();
  if (!accepted(chart, g, n)) {
    std::size_t at = chart.furthest;
    std::string exp = expecting(expected_at(chart, g, at));
    if (at >= n) {
      return std::vector{make_diagnostic(ErrorCategory::Syntax, "unexpected end of input" + exp, end_position(text))};
    }
    const Token& tok = tokens[at];
    std::string shown = tok.kind == TokenKind::String ? std::string(1, tok.quote) + tok.text + tok.quote : tok.text;
    return std::vector{
        make_diagnostic(ErrorCategory::Syntax, "mismatched input '" + shown + "'" + exp, tok.pos, shown)};
  }

  Extractor extractor(g, tokens, chart);
  extractor.end_pos = end_position(text);
  std::vector<Value> roots = extractor.derive(g.entry, 0, static_cast<int>(n));
  if (extractor.overflow) {
    return std::vector{make_diagnostic(ErrorCategory::Syntax,
                                       "integer literal '" + extractor.overflow->text + "' is out of range",
                                       extractor.overflow->pos, extractor.overflow->text)};
  }
  if (roots.size() > 1) {
    return std::vector{make_diagnostic(ErrorCategory::Other,
                                       "ambiguous parse: the text admits structurally different models",
                                       SourcePos{1, 1})};
  }
  if (roots.empty() || !std::holds_alternative<NodePtr>(roots.front())) {
    return std::vector{make_diagnostic(ErrorCategory::Other, "no model could be built for the text", SourcePos{1, 1})};
  }

  InstanceModel model{std::get<NodePtr>(roots.front()), std::string(text)};
  std::vector<const InstanceNode*> all;
  collect_named(model.root, all);
  std::vector<Diagnostic> link_errors;
  check_links(model.root, all, g.metamodel, link_errors);
  if (!link_errors.empty()) return link_errors;
  return model;
}

Result<InstanceModel> parse_instance(std::string_view text, const grammar::GrammarAst& grammar) {
  auto parser = InstanceParser::create(grammar);
  if (!parser.ok()) return parser.diagnostics();
  return parser.value().parse(text);
}

}  // namespace dslforge::instance
