#include "dslforge/grammar/metamodel.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "type_inference.hpp"

namespace dslforge::grammar {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Attribute: return "attribute";
    case FeatureKind::Reference: return "reference";
    case FeatureKind::Containment: return "containment";
  }
  return "attribute";
}

const MetaFeature* MetaClass::find_feature(std::string_view feature) const {
  auto it = std::find_if(features.begin(), features.end(), [&](const MetaFeature& f) { return f.name == feature; });
  return it == features.end() ? nullptr : &*it;
}

const MetaClass* MetaModel::find_class(std::string_view name) const {
  auto it = std::find_if(classes.begin(), classes.end(), [&](const MetaClass& c) { return c.name == name; });
  return it == classes.end() ? nullptr : &*it;
}

const MetaEnum* MetaModel::find_enum(std::string_view name) const {
  auto it = std::find_if(enums.begin(), enums.end(), [&](const MetaEnum& e) { return e.name == name; });
  return it == enums.end() ? nullptr : &*it;
}

bool MetaModel::is_subtype(std::string_view sub, std::string_view super) const {
  std::set<std::string, std::less<>> seen;
  std::deque<std::string_view> queue{sub};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    if (cur == super) return true;
    if (!seen.emplace(cur).second) continue;
    if (const MetaClass* c = find_class(cur)) {
      for (const auto& s : c->supertypes) queue.push_back(s);
    }
  }
  return false;
}

const MetaFeature* MetaModel::lookup_feature(std::string_view class_name, std::string_view feature) const {
  std::set<std::string, std::less<>> seen;
  std::deque<std::string_view> queue{class_name};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    if (!seen.emplace(cur).second) continue;
    const MetaClass* c = find_class(cur);
    if (!c) continue;
    if (const MetaFeature* f = c->find_feature(feature)) return f;
    for (const auto& s : c->supertypes) queue.push_back(s);
  }
  return nullptr;
}

nlohmann::ordered_json MetaModel::to_json() const {
  nlohmann::ordered_json classes_json = nlohmann::ordered_json::array();
  for (const auto& c : classes) {
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (const auto& f : c.features) {
      features.push_back({{"name", f.name}, {"kind", to_string(f.kind)}, {"type", f.type.name}, {"many", f.many}});
    }
    classes_json.push_back(
        {{"name", c.name}, {"abstract", c.abstract}, {"supertypes", c.supertypes}, {"features", std::move(features)}});
  }
  nlohmann::ordered_json enums_json = nlohmann::ordered_json::array();
  for (const auto& e : enums) enums_json.push_back({{"name", e.name}, {"literals", e.literals}});
  return {{"classes", std::move(classes_json)}, {"enums", std::move(enums_json)}};
}

std::string MetaModel::to_text() const {
  std::string out;
  for (const auto& c : classes) {
    if (c.abstract) out += "abstract ";
    out += "class " + c.name;
    if (!c.supertypes.empty()) {
      out += " extends ";
      for (std::size_t i = 0; i < c.supertypes.size(); ++i) out += (i ? ", " : "") + c.supertypes[i];
    }
    if (c.features.empty()) {
      out += "\n";
      continue;
    }
    out += " {\n";
    for (const auto& f : c.features) {
      out += "    ";
      if (f.kind == FeatureKind::Containment) out += "contains ";
      if (f.kind == FeatureKind::Reference) out += "refers ";
      out += f.name + " : " + f.type.name + (f.many ? " [*]" : " [1]") + "\n";
    }
    out += "}\n";
  }
  for (const auto& e : enums) {
    out += "enum " + e.name + " { ";
    for (std::size_t i = 0; i < e.literals.size(); ++i) out += (i ? ", " : "") + e.literals[i];
    out += " }\n";
  }
  return out;
}

Result<MetaModel> derive_metamodel(const GrammarAst& ast) {
  detail::TypeEnvironment env(ast);
  MetaModel model;
  std::vector<Diagnostic> problems;
  for (const auto& rule : ast.rules) {
    if (model.find_class(rule.name)) continue;
    MetaClass c;
    c.name = rule.name;
    c.abstract = detail::is_abstract_rule(ast, rule);
    c.supertypes = env.supertypes(rule.name);
    std::vector<detail::FeatureConflict> conflicts;
    if (!c.abstract) c.features = env.features(rule, &conflicts);
    for (auto& conflict : conflicts) {
      problems.push_back(
          make_diagnostic(ErrorCategory::Transformation, std::move(conflict.message), conflict.pos, conflict.feature));
    }
    walk(rule.body, [&](const Expr& e) {
      if (e.kind == Expr::Kind::Assignment && !env.feature_of(e)) {
        problems.push_back(make_diagnostic(ErrorCategory::Linking,
                                           "non-resolvable type '" + e.target().text + "' for feature '" + e.text + "'",
                                           e.pos, e.target().text));
      }
    });
    model.classes.push_back(std::move(c));
  }
  for (const auto& e : ast.enums) {
    if (model.find_enum(e.name)) continue;
    MetaEnum me;
    me.name = e.name;
    for (const auto& lit : e.literals) {
      if (std::find(me.literals.begin(), me.literals.end(), lit.name) == me.literals.end()) {
        me.literals.push_back(lit.name);
      }
    }
    model.enums.push_back(std::move(me));
  }
  if (!problems.empty()) return problems;
  return model;
}

std::vector<std::string> check_metamodel(const MetaModel& model) {
  std::vector<std::string> problems;
  std::set<std::string> names;
  for (const auto& c : model.classes) {
    if (!names.insert(c.name).second) problems.push_back("duplicate class " + c.name);
  }
  for (const auto& e : model.enums) {
    if (!names.insert(e.name).second) problems.push_back("duplicate classifier " + e.name);
  }
  for (const auto& c : model.classes) {
    for (const auto& s : c.supertypes) {
      if (!model.find_class(s)) problems.push_back(c.name + " extends missing class " + s);
    }
    std::set<std::string> features;
    for (const auto& f : c.features) {
      if (!features.insert(f.name).second) problems.push_back(c.name + "." + f.name + " declared twice");
      switch (f.type.kind) {
        case TypeKind::Class:
          if (!model.find_class(f.type.name)) problems.push_back(c.name + "." + f.name + " targets missing class");
          break;
        case TypeKind::Enum:
          if (!model.find_enum(f.type.name)) problems.push_back(c.name + "." + f.name + " targets missing enum");
          break;
        case TypeKind::Primitive:
          if (f.type.name != "string" && f.type.name != "int" && f.type.name != "boolean") {
            problems.push_back(c.name + "." + f.name + " has unknown primitive " + f.type.name);
          }
          break;
      }
      // Inherited clash: a supertype chain declaring the same feature.
      for (const auto& s : c.supertypes) {
        if (model.lookup_feature(s, f.name)) problems.push_back(c.name + "." + f.name + " shadows an inherited feature");
      }
    }
  }
  return problems;
}

}  // namespace dslforge::grammar
