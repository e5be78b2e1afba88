#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dslforge/version/model.hpp"

namespace dslforge::prompt {

using version::InputFormat;
using version::Kind;

enum class BaseMode { None, BaseWithoutContext, BaseWithContext };

std::string_view to_string(BaseMode mode);
std::optional<BaseMode> base_mode_from_string(std::string_view text);

struct PromptConfiguration {
  Kind kind = Kind::Dsl;
  InputFormat input_format = InputFormat::Properties;
  BaseMode base_mode = BaseMode::None;

  friend bool operator==(const PromptConfiguration&, const PromptConfiguration&) = default;
};

/// A region of the raw 18-point space that is not a valid configuration.
/// Unset fields match anything.
struct Exclusion {
  std::string_view tag;
  std::optional<Kind> kind;
  std::optional<InputFormat> input_format;
  std::optional<BaseMode> base_mode;
  std::string_view reason;

  bool matches(const PromptConfiguration& c) const;
};

/// The six excluded points; the remaining twelve are valid.
extern const std::vector<Exclusion> kExclusions;

/// All 18 combinations, in declaration order.
std::vector<PromptConfiguration> raw_configurations();

/// The valid configurations, in declaration order.
std::vector<PromptConfiguration> enumerate_configurations();

/// The exclusion that rules `c` out, or nullptr when valid.
const Exclusion* exclusion_for(const PromptConfiguration& c);
bool is_valid(const PromptConfiguration& c);

nlohmann::ordered_json to_json(const PromptConfiguration& c);
std::string describe(const PromptConfiguration& c);  // "{Dsl, Properties, None}"

}  // namespace dslforge::prompt
