#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dslforge/version/model.hpp"

namespace dslforge::prompt {

struct AnswerSchema {
  std::string_view name;
  std::vector<std::string> required;
};

extern const AnswerSchema kDslSchema;            // grammar, name, description
extern const AnswerSchema kExampleSchema;        // text, name
extern const AnswerSchema kDslRepairSchema;      // + adjustment
extern const AnswerSchema kExampleRepairSchema;  // + adjustment

const AnswerSchema& schema_for(version::Kind kind, bool repair);

/// Required properties of an answer; extra properties are dropped.
struct Answer {
  std::map<std::string, std::string> properties;

  const std::string& at(const std::string& key) const { return properties.at(key); }
};

/// Removes a surrounding markdown code fence, if any.
std::string strip_fences(std::string_view raw);

/// Parses the model's raw reply. Throws Error(MalformedAnswer) when no JSON
/// object can be read, Error(MissingProperty) for an absent property.
Answer parse_answer(std::string_view raw, const AnswerSchema& schema);

}  // namespace dslforge::prompt
