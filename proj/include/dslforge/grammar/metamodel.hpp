#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dslforge/diagnostic.hpp"
#include "dslforge/grammar/ast.hpp"

namespace dslforge::grammar {

enum class FeatureKind { Attribute, Reference, Containment };
enum class TypeKind { Primitive, Class, Enum };

std::string_view to_string(FeatureKind kind);

struct TypeRef {
  TypeKind kind = TypeKind::Primitive;
  std::string name;  // "string", "int", "boolean", or a class/enum name

  friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

struct MetaFeature {
  std::string name;
  FeatureKind kind = FeatureKind::Attribute;
  TypeRef type;
  bool many = false;

  friend bool operator==(const MetaFeature&, const MetaFeature&) = default;
};

struct MetaClass {
  std::string name;
  bool abstract = false;
  std::vector<std::string> supertypes;
  std::vector<MetaFeature> features;

  const MetaFeature* find_feature(std::string_view feature) const;
};

struct MetaEnum {
  std::string name;
  std::vector<std::string> literals;
};

struct MetaModel {
  std::vector<MetaClass> classes;
  std::vector<MetaEnum> enums;

  const MetaClass* find_class(std::string_view name) const;
  const MetaEnum* find_enum(std::string_view name) const;

  /// Reflexive, transitive subtype test.
  bool is_subtype(std::string_view sub, std::string_view super) const;

  /// Looks the feature up on `class_name` and its supertypes.
  const MetaFeature* lookup_feature(std::string_view class_name, std::string_view feature) const;

  nlohmann::ordered_json to_json() const;
  std::string to_text() const;
};

/// Abstract syntax of a grammar: one class per parser rule, one enum per enum
/// rule. Rules that are pure alternatives of bare rule calls become abstract
/// supertypes of the called rules.
Result<MetaModel> derive_metamodel(const GrammarAst& ast);

/// Structural self-check: unique names, resolvable types, no inherited
/// feature clashes. Returns human-readable problems.
std::vector<std::string> check_metamodel(const MetaModel& model);

}  // namespace dslforge::grammar
