#include "dslforge/error.hpp"

namespace dslforge {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyName: return "EMPTY_NAME";
    case ErrorCode::UnknownProject: return "UNKNOWN_PROJECT";
    case ErrorCode::UnknownVersion: return "UNKNOWN_VERSION";
    case ErrorCode::UnknownBase: return "UNKNOWN_BASE";
    case ErrorCode::ConstraintC1: return "CONSTRAINT_C1";
    case ErrorCode::ConstraintC2: return "CONSTRAINT_C2";
    case ErrorCode::ConstraintC3: return "CONSTRAINT_C3";
    case ErrorCode::ConstraintC4: return "CONSTRAINT_C4";
    case ErrorCode::InvalidDraft: return "INVALID_DRAFT";
    case ErrorCode::HasSuccessors: return "HAS_SUCCESSORS";
    case ErrorCode::Storage: return "STORAGE_ERROR";
    case ErrorCode::InvalidConfiguration: return "INVALID_CONFIGURATION";
    case ErrorCode::MissingBase: return "MISSING_BASE";
    case ErrorCode::MalformedAnswer: return "MALFORMED_ANSWER";
    case ErrorCode::MissingProperty: return "MISSING_PROPERTY";
    case ErrorCode::EmptyInstructions: return "EMPTY_INSTRUCTIONS";
    case ErrorCode::EmptyPrompt: return "EMPTY_PROMPT";
    case ErrorCode::UnknownThread: return "UNKNOWN_THREAD";
    case ErrorCode::GatewayTimeout: return "GATEWAY_TIMEOUT";
    case ErrorCode::GatewayTransport: return "GATEWAY_TRANSPORT";
    case ErrorCode::MockExhausted: return "MOCK_EXHAUSTED";
    case ErrorCode::NotFaulty: return "NOT_FAULTY";
    case ErrorCode::NotDsl: return "NOT_DSL";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::BadRequest: return "BAD_REQUEST";
  }
  return "UNKNOWN_ERROR";
}

}  // namespace dslforge
