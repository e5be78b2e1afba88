#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dslforge {

/// Machine-readable failure codes shared by every module. The interface layer
/// maps each code to exactly one HTTP status.
enum class ErrorCode {
  EmptyName,
  UnknownProject,
  UnknownVersion,
  UnknownBase,
  ConstraintC1,
  ConstraintC2,
  ConstraintC3,
  ConstraintC4,
  InvalidDraft,
  HasSuccessors,
  Storage,
  InvalidConfiguration,
  MissingBase,
  MalformedAnswer,
  MissingProperty,
  EmptyInstructions,
  EmptyPrompt,
  UnknownThread,
  GatewayTimeout,
  GatewayTransport,
  MockExhausted,
  NotFaulty,
  NotDsl,
  InvalidConfig,
  BadRequest,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dslforge
