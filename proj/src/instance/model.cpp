#include "dslforge/instance/model.hpp"

#include <algorithm>

namespace dslforge::instance {

const Feature* InstanceNode::find(std::string_view feature) const {
  auto it = std::find_if(features.begin(), features.end(), [&](const Feature& f) { return f.name == feature; });
  return it == features.end() ? nullptr : &*it;
}

namespace {

nlohmann::ordered_json value_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EnumValue>) {
          return x.literal;
        } else if constexpr (std::is_same_v<T, Reference>) {
          return x.name;
        } else if constexpr (std::is_same_v<T, NodePtr>) {
          return to_json(*x);
        } else {
          return x;
        }
      },
      v);
}

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

}  // namespace

nlohmann::ordered_json to_json(const InstanceNode& node) {
  nlohmann::ordered_json features = nlohmann::ordered_json::object();
  for (const auto& f : node.features) {
    if (f.many) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& v : f.values) arr.push_back(value_json(v));
      features[f.name] = std::move(arr);
    } else if (!f.values.empty()) {
      features[f.name] = value_json(f.values.back());
    }
  }
  nlohmann::ordered_json out;
  out["class"] = node.class_name;
  out["features"] = std::move(features);
  return out;
}

std::string serialize_model(const InstanceModel& model) {
  if (!model.root) return "null";
  return to_json(*model.root).dump();
}

bool structurally_equal(const InstanceNode& a, const InstanceNode& b) {
  if (a.class_name != b.class_name || a.features.size() != b.features.size()) return false;
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    const auto& x = a.features[i];
    const auto& y = b.features[i];
    if (x.name != y.name || x.many != y.many || x.values.size() != y.values.size()) return false;
    for (std::size_t j = 0; j < x.values.size(); ++j) {
      if (!values_equal(x.values[j], y.values[j])) return false;
    }
  }
  return true;
}

namespace {

void check_node(const InstanceNode& node, const grammar::MetaModel& mm, const std::string& path,
                std::vector<std::string>& problems) {
  const grammar::MetaClass* cls = mm.find_class(node.class_name);
  if (!cls) {
    problems.push_back(path + ": unknown class " + node.class_name);
    return;
  }
  if (cls->abstract) problems.push_back(path + ": instance of abstract class " + node.class_name);
  for (const auto& f : node.features) {
    const grammar::MetaFeature* decl = mm.lookup_feature(node.class_name, f.name);
    std::string where = path + "." + f.name;
    if (!decl) {
      problems.push_back(where + ": undeclared feature");
      continue;
    }
    if (decl->many != f.many) problems.push_back(where + ": multiplicity mismatch");
    if (!decl->many && f.values.size() > 1) problems.push_back(where + ": more than one value");
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const Value& v = f.values[i];
      std::string at = where + "[" + std::to_string(i) + "]";
      using grammar::FeatureKind;
      using grammar::TypeKind;
      switch (decl->kind) {
        case FeatureKind::Attribute:
          if (decl->type.kind == TypeKind::Enum) {
            const auto* e = std::get_if<EnumValue>(&v);
            const grammar::MetaEnum* me = mm.find_enum(decl->type.name);
            if (!e || !me || std::find(me->literals.begin(), me->literals.end(), e->literal) == me->literals.end()) {
              problems.push_back(at + ": expected literal of " + decl->type.name);
            }
          } else if (decl->type.name == "string" && !std::holds_alternative<std::string>(v)) {
            problems.push_back(at + ": expected string");
          } else if (decl->type.name == "int" && !std::holds_alternative<std::int64_t>(v)) {
            problems.push_back(at + ": expected int");
          } else if (decl->type.name == "boolean" && !std::holds_alternative<bool>(v)) {
            problems.push_back(at + ": expected boolean");
          }
          break;
        case FeatureKind::Containment:
          if (const auto* child = std::get_if<NodePtr>(&v)) {
            if (!mm.is_subtype((*child)->class_name, decl->type.name)) {
              problems.push_back(at + ": " + (*child)->class_name + " is not a " + decl->type.name);
            }
            check_node(**child, mm, at, problems);
          } else {
            problems.push_back(at + ": expected contained " + decl->type.name);
          }
          break;
        case FeatureKind::Reference:
          if (const auto* ref = std::get_if<Reference>(&v)) {
            if (!mm.is_subtype(ref->type, decl->type.name)) problems.push_back(at + ": reference type mismatch");
          } else {
            problems.push_back(at + ": expected reference to " + decl->type.name);
          }
          break;
      }
    }
  }
}

}  // namespace

std::vector<std::string> check_conformance(const InstanceModel& model, const grammar::MetaModel& metamodel) {
  std::vector<std::string> problems;
  if (!model.root) {
    problems.push_back("model has no root");
    return problems;
  }
  check_node(*model.root, metamodel, model.root->class_name, problems);
  return problems;
}

}  // namespace dslforge::instance
