#include "type_inference.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace dslforge::grammar::detail {

using Kind = Expr::Kind;

bool expr_nullable(const GrammarAst& ast, const Expr& e, const std::vector<bool>& nullable,
                   const std::map<std::string, std::size_t>& rule_index) {
  if (is_optional(e.cardinality)) return true;
  switch (e.kind) {
    case Kind::Sequence:
      return std::all_of(e.children.begin(), e.children.end(),
                         [&](const Expr& c) { return expr_nullable(ast, c, nullable, rule_index); });
    case Kind::Alternatives:
      return std::any_of(e.children.begin(), e.children.end(),
                         [&](const Expr& c) { return expr_nullable(ast, c, nullable, rule_index); });
    case Kind::Group:
    case Kind::Assignment:
      return expr_nullable(ast, e.children.front(), nullable, rule_index);
    case Kind::RuleCall: {
      auto it = rule_index.find(e.text);
      return it != rule_index.end() && nullable[it->second];
    }
    default:
      return false;
  }
}

bool is_abstract_rule(const GrammarAst& ast, const Rule& rule) {
  auto bare_parser_call = [&](const Expr& e) { return e.is_bare_rule_call() && ast.find_rule(e.text) != nullptr; };
  const Expr& body = rule.body;
  if (bare_parser_call(body)) return true;
  if (body.kind != Kind::Alternatives || body.cardinality != Cardinality::One) return false;
  return std::all_of(body.children.begin(), body.children.end(), bare_parser_call);
}

TypeEnvironment::TypeEnvironment(const GrammarAst& ast) : ast_(ast) {
  for (const auto& rule : ast_.rules) {
    if (!is_abstract_rule(ast_, rule)) continue;
    auto add = [&](const Expr& call) {
      auto& list = supertypes_[call.text];
      if (call.text != rule.name && std::find(list.begin(), list.end(), rule.name) == list.end()) {
        list.push_back(rule.name);
      }
    };
    if (rule.body.kind == Kind::RuleCall) {
      add(rule.body);
    } else {
      for (const auto& option : rule.body.children) add(option);
    }
  }
}

const std::vector<std::string>& TypeEnvironment::supertypes(const std::string& rule) const {
  static const std::vector<std::string> none;
  auto it = supertypes_.find(rule);
  return it == supertypes_.end() ? none : it->second;
}

bool TypeEnvironment::is_subtype(const std::string& sub, const std::string& super) const {
  std::set<std::string> seen;
  std::deque<std::string> queue{sub};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    if (cur == super) return true;
    if (!seen.insert(cur).second) continue;
    for (const auto& s : supertypes(cur)) queue.push_back(s);
  }
  return false;
}

std::optional<std::string> TypeEnvironment::common_supertype(const std::string& a, const std::string& b) const {
  std::set<std::string> seen;
  std::deque<std::string> queue{a};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    if (!seen.insert(cur).second) continue;
    if (is_subtype(b, cur)) return cur;
    for (const auto& s : supertypes(cur)) queue.push_back(s);
  }
  return std::nullopt;
}

std::optional<MetaFeature> TypeEnvironment::feature_of(const Expr& assignment) const {
  MetaFeature f;
  f.name = assignment.text;
  f.many = assignment.op == AssignOp::Multi;
  const Expr& target = assignment.target();
  if (assignment.op == AssignOp::Boolean) {
    f.kind = FeatureKind::Attribute;
    f.type = {TypeKind::Primitive, "boolean"};
    return f;
  }
  switch (target.kind) {
    case Kind::Keyword:
      f.kind = FeatureKind::Attribute;
      f.type = {TypeKind::Primitive, "string"};
      return f;
    case Kind::TerminalCall:
      f.kind = FeatureKind::Attribute;
      f.type = {TypeKind::Primitive, target.terminal == Terminal::Int ? "int" : "string"};
      return f;
    case Kind::RuleCall:
      if (ast_.find_enum(target.text) && !ast_.find_rule(target.text)) {
        f.kind = FeatureKind::Attribute;
        f.type = {TypeKind::Enum, target.text};
        return f;
      }
      if (!ast_.find_rule(target.text)) return std::nullopt;
      f.kind = FeatureKind::Containment;
      f.type = {TypeKind::Class, target.text};
      return f;
    case Kind::CrossRef:
      if (!ast_.find_rule(target.text)) return std::nullopt;
      f.kind = FeatureKind::Reference;
      f.type = {TypeKind::Class, target.text};
      return f;
    default:
      return std::nullopt;
  }
}

std::string describe(const MetaFeature& feature) {
  std::string kind = feature.kind == FeatureKind::Containment ? "containment "
                     : feature.kind == FeatureKind::Reference ? "reference "
                                                              : "";
  return kind + feature.type.name;
}

std::vector<MetaFeature> TypeEnvironment::features(const Rule& rule, std::vector<FeatureConflict>* conflicts) const {
  std::vector<MetaFeature> out;
  std::set<std::string> conflicted;
  walk(rule.body, [&](const Expr& e) {
    if (e.kind != Kind::Assignment) return;
    auto feature = feature_of(e);
    if (!feature) return;
    auto it = std::find_if(out.begin(), out.end(), [&](const MetaFeature& f) { return f.name == feature->name; });
    if (it == out.end()) {
      out.push_back(*feature);
      return;
    }
    it->many = it->many || feature->many;
    if (it->kind == feature->kind && it->type == feature->type) return;
    if (it->kind == feature->kind && it->type.kind == TypeKind::Class && feature->type.kind == TypeKind::Class) {
      if (auto common = common_supertype(it->type.name, feature->type.name)) {
        it->type.name = *common;
        return;
      }
    }
    if (conflicts && conflicted.insert(feature->name).second) {
      conflicts->push_back({feature->name,
                            "feature '" + feature->name + "' of rule '" + rule.name + "' has conflicting types " +
                                describe(*it) + " and " + describe(*feature),
                            e.pos});
    }
  });
  return out;
}

}  // namespace dslforge::grammar::detail
