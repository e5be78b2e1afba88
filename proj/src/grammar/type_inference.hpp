#pragma once

// Shared between validation and meta-model derivation: nullability, rule
// inheritance and feature typing.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dslforge/grammar/ast.hpp"
#include "dslforge/grammar/metamodel.hpp"

namespace dslforge::grammar::detail {

bool expr_nullable(const GrammarAst& ast, const Expr& e, const std::vector<bool>& nullable,
                   const std::map<std::string, std::size_t>& rule_index);

/// Body is a bare call, or alternatives of bare calls, to parser rules.
bool is_abstract_rule(const GrammarAst& ast, const Rule& rule);

struct FeatureConflict {
  std::string feature;
  std::string message;
  SourcePos pos;
};

class TypeEnvironment {
 public:
  explicit TypeEnvironment(const GrammarAst& ast);

  const std::vector<std::string>& supertypes(const std::string& rule) const;
  bool is_subtype(const std::string& sub, const std::string& super) const;
  std::optional<std::string> common_supertype(const std::string& a, const std::string& b) const;

  /// Type and kind an assignment contributes. nullopt when the target does
  /// not resolve.
  std::optional<MetaFeature> feature_of(const Expr& assignment) const;

  /// Features of `rule` merged by name, plus any type conflicts.
  std::vector<MetaFeature> features(const Rule& rule, std::vector<FeatureConflict>* conflicts = nullptr) const;

  std::vector<FeatureConflict> feature_conflicts(const Rule& rule) const {
    std::vector<FeatureConflict> out;
    features(rule, &out);
    return out;
  }

 private:
  const GrammarAst& ast_;
  std::map<std::string, std::vector<std::string>> supertypes_;
};

std::string describe(const MetaFeature& feature);

}  // namespace dslforge::grammar::detail
