#pragma once

#include <string>

#include "json.hpp"

#include "dslforge/error.hpp"
#include "dslforge/workbench/workbench.hpp"

namespace dslforge::api {

/// Machine-readable failure crossing the service boundary.
struct ApiError {
  std::string code;
  std::string message;
  int http_status = 500;

  nlohmann::ordered_json to_json() const;
};

int http_status_for(ErrorCode code);
ApiError api_error_for(const Error& error);

nlohmann::ordered_json to_json(const Diagnostic& d);
nlohmann::ordered_json to_json(const workbench::Validation& v);

/// Creates a version from a request body. A body carrying "definition" is a
/// manual edit; otherwise it is a prompt run with {kind, input_format, input,
/// base_ids, with_context} and optional base_mode, supplemental_definition,
/// derived_from. Enum names are case-insensitive.
version::Version create_version(workbench::Workbench& wb, const std::string& project_id,
                                const nlohmann::json& body);

/// "with" | "without" | "combined" (default) repair of a faulty grammar.
nlohmann::ordered_json run_repair(workbench::Workbench& wb, const std::string& version_id, const std::string& mode,
                                  int attempts);

/// Ad-hoc validation: {"grammar": text, "example"?: text}.
workbench::Validation validate_body(const nlohmann::json& body);

nlohmann::ordered_json configurations_json();

}  // namespace dslforge::api
