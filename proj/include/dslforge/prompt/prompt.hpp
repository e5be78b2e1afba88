#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dslforge/prompt/configuration.hpp"
#include "dslforge/version/model.hpp"

namespace dslforge::prompt {

/// Assistant instructions, sent once per thread as the system message.
extern const std::array<std::string_view, 4> kInstructions;
std::string system_instructions();

enum class ThreadDirective { NewThread, ContinueThread };

struct Prompt {
  std::string introduction;
  std::optional<std::string> context;
  std::string input_data;
  std::string output_indicator;
  ThreadDirective directive = ThreadDirective::NewThread;
  std::optional<std::string> thread_id;  // set with ContinueThread

  /// Non-empty parts in order, separated by blank lines.
  std::string text() const;
};

struct PromptRequest {
  PromptConfiguration config;
  std::string payload;
  /// Base versions. BaseWithContext / BaseWithoutContext take exactly one;
  /// {Dsl, Definition, None} takes the examples being generalized.
  std::vector<version::Version> bases;
  /// Governing grammar injected as context, e.g. when instantiating examples.
  std::optional<std::string> supplemental_definition;
  /// With BaseWithContext: whether the base's thread carries its definition.
  /// When it does not (manual versions), the definition is injected instead.
  bool thread_holds_base = true;
};

/// Assembles the four-part prompt. Throws Error(InvalidConfiguration |
/// MissingBase).
Prompt build_prompt(const PromptRequest& request);

/// Single-pass placeholder substitution: `<name>` -> value. Text inside the
/// substituted values is never rescanned.
std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& values);

namespace templates {
extern const std::string_view kDslIntroduction;
extern const std::string_view kExampleIntroduction;
extern const std::string_view kDslProperties;
extern const std::string_view kExampleProperties;
extern const std::string_view kGeneralize;
extern const std::string_view kExampleFromGrammar;
extern const std::string_view kError;
extern const std::string_view kGrammarContext;
extern const std::string_view kExampleContext;
extern const std::string_view kDslOutput;
extern const std::string_view kExampleOutput;
extern const std::string_view kRepairOutput;
}  // namespace templates

}  // namespace dslforge::prompt
