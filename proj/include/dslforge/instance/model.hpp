#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dslforge/diagnostic.hpp"
#include "dslforge/grammar/metamodel.hpp"

namespace dslforge::instance {

struct InstanceNode;
using NodePtr = std::shared_ptr<const InstanceNode>;

struct EnumValue {
  std::string literal;
  friend bool operator==(const EnumValue&, const EnumValue&) = default;
};

/// By-name link to another node; resolved after parsing.
struct Reference {
  std::string name;
  std::string type;
  SourcePos pos;
};

using Value = std::variant<std::string, std::int64_t, bool, EnumValue, Reference, NodePtr>;

struct Feature {
  std::string name;
  bool many = false;
  std::vector<Value> values;
};

struct InstanceNode {
  std::string class_name;
  std::vector<Feature> features;
  SourcePos pos;

  const Feature* find(std::string_view feature) const;
};

struct InstanceModel {
  NodePtr root;
  std::string source;
};

nlohmann::ordered_json to_json(const InstanceNode& node);

/// `{"class":...,"features":{...}}`, children nested, many-features as arrays.
std::string serialize_model(const InstanceModel& model);

/// Structural equality (positions ignored).
bool structurally_equal(const InstanceNode& a, const InstanceNode& b);

/// Checks every node against the meta-model: known class, declared features,
/// value types and multiplicities. Returns readable problems.
std::vector<std::string> check_conformance(const InstanceModel& model, const grammar::MetaModel& metamodel);

}  // namespace dslforge::instance
