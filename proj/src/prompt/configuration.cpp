#include "dslforge/prompt/configuration.hpp"

namespace dslforge::prompt {

std::string_view to_string(BaseMode mode) {
  switch (mode) {
    case BaseMode::None: return "None";
    case BaseMode::BaseWithoutContext: return "BaseWithoutContext";
    case BaseMode::BaseWithContext: return "BaseWithContext";
  }
  return "?";
}

std::optional<BaseMode> base_mode_from_string(std::string_view text) {
  if (text == "None") return BaseMode::None;
  if (text == "BaseWithoutContext") return BaseMode::BaseWithoutContext;
  if (text == "BaseWithContext") return BaseMode::BaseWithContext;
  return std::nullopt;
}

bool Exclusion::matches(const PromptConfiguration& c) const {
  return (!kind || *kind == c.kind) && (!input_format || *input_format == c.input_format) &&
         (!base_mode || *base_mode == c.base_mode);
}

const std::vector<Exclusion> kExclusions = {
    {"x1", std::nullopt, InputFormat::ErrorMessage, BaseMode::None,
     "an error-message version depends on a faulty base"},
    {"x2", std::nullopt, InputFormat::Definition, BaseMode::BaseWithContext,
     "the base thread already holds the definition"},
    {"x3", Kind::Example, InputFormat::Properties, BaseMode::None, "an example must be anchored to some grammar"},
    {"x4", Kind::Dsl, InputFormat::Definition, BaseMode::BaseWithoutContext,
     "redundant with importing a definition at a root"},
};

std::vector<PromptConfiguration> raw_configurations() {
  std::vector<PromptConfiguration> out;
  for (Kind k : {Kind::Dsl, Kind::Example}) {
    for (InputFormat f : {InputFormat::Definition, InputFormat::Properties, InputFormat::ErrorMessage}) {
      for (BaseMode b : {BaseMode::None, BaseMode::BaseWithoutContext, BaseMode::BaseWithContext}) {
        out.push_back({k, f, b});
      }
    }
  }
  return out;
}

const Exclusion* exclusion_for(const PromptConfiguration& c) {
  for (const auto& e : kExclusions) {
    if (e.matches(c)) return &e;
  }
  return nullptr;
}

bool is_valid(const PromptConfiguration& c) { return exclusion_for(c) == nullptr; }

std::vector<PromptConfiguration> enumerate_configurations() {
  std::vector<PromptConfiguration> out;
  for (const auto& c : raw_configurations()) {
    if (is_valid(c)) out.push_back(c);
  }
  return out;
}

nlohmann::ordered_json to_json(const PromptConfiguration& c) {
  nlohmann::ordered_json j;
  j["kind"] = version::to_string(c.kind);
  j["input_format"] = version::to_string(c.input_format);
  j["base_mode"] = to_string(c.base_mode);
  return j;
}

std::string describe(const PromptConfiguration& c) {
  return "{" + std::string(version::to_string(c.kind)) + ", " + std::string(version::to_string(c.input_format)) +
         ", " + std::string(to_string(c.base_mode)) + "}";
}

}  // namespace dslforge::prompt
