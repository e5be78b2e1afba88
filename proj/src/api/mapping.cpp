#include "dslforge/api/mapping.hpp"

#include <algorithm>
#include <cctype>

#include "dslforge/prompt/configuration.hpp"

namespace dslforge::api {

using version::InputFormat;
using version::Kind;

nlohmann::ordered_json ApiError::to_json() const { return {{"code", code}, {"message", message}}; }

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyName:
    case ErrorCode::EmptyPrompt:
    case ErrorCode::BadRequest:
      return 400;
    case ErrorCode::UnknownProject:
    case ErrorCode::UnknownVersion:
    case ErrorCode::UnknownThread:
      return 404;
    case ErrorCode::ConstraintC1:
    case ErrorCode::ConstraintC2:
    case ErrorCode::ConstraintC3:
    case ErrorCode::ConstraintC4:
    case ErrorCode::HasSuccessors:
    case ErrorCode::NotFaulty:
      return 409;
    case ErrorCode::UnknownBase:
    case ErrorCode::InvalidDraft:
    case ErrorCode::InvalidConfiguration:
    case ErrorCode::MissingBase:
    case ErrorCode::NotDsl:
      return 422;
    case ErrorCode::MalformedAnswer:
    case ErrorCode::MissingProperty:
    case ErrorCode::GatewayTransport:
      return 502;
    case ErrorCode::MockExhausted:
      return 503;
    case ErrorCode::GatewayTimeout:
      return 504;
    case ErrorCode::Storage:
    case ErrorCode::EmptyInstructions:
    case ErrorCode::InvalidConfig:
      return 500;
  }
  return 500;
}

ApiError api_error_for(const Error& error) {
  return {std::string(to_string(error.code())), error.what(), http_status_for(error.code())};
}

nlohmann::ordered_json to_json(const Diagnostic& d) {
  nlohmann::ordered_json j{{"category", to_string(d.category)},
                           {"severity", d.is_error() ? "error" : "warning"},
                           {"line", d.line},
                           {"column", d.column},
                           {"message", d.message}};
  j["offending"] = d.offending ? nlohmann::ordered_json(*d.offending) : nlohmann::ordered_json(nullptr);
  j["rendered"] = render(d);
  return j;
}

nlohmann::ordered_json to_json(const workbench::Validation& v) {
  nlohmann::ordered_json j{{"status", version::to_string(v.status)}};
  j["error_message"] = v.error_message ? nlohmann::ordered_json(*v.error_message) : nlohmann::ordered_json(nullptr);
  j["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : v.diagnostics) j["diagnostics"].push_back(to_json(d));
  j["metamodel"] = v.metamodel ? v.metamodel->to_json() : nlohmann::ordered_json(nullptr);
  j["model"] = v.model ? instance::to_json(*v.model->root) : nlohmann::ordered_json(nullptr);
  return j;
}

namespace {

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

Kind parse_kind(const std::string& s) {
  std::string k = squash(s);
  if (k == "dsl" || k == "grammar") return Kind::Dsl;
  if (k == "example" || k == "instance") return Kind::Example;
  throw Error(ErrorCode::BadRequest, "unknown kind '" + s + "'");
}

InputFormat parse_input(const std::string& s) {
  std::string k = squash(s);
  if (k == "definition") return InputFormat::Definition;
  if (k == "properties") return InputFormat::Properties;
  if (k == "errormessage" || k == "error") return InputFormat::ErrorMessage;
  throw Error(ErrorCode::BadRequest, "unknown input format '" + s + "'");
}

prompt::BaseMode parse_base_mode(const std::string& s) {
  std::string k = squash(s);
  if (k == "none") return prompt::BaseMode::None;
  if (k == "basewithcontext" || k == "withcontext") return prompt::BaseMode::BaseWithContext;
  if (k == "basewithoutcontext" || k == "withoutcontext") return prompt::BaseMode::BaseWithoutContext;
  throw Error(ErrorCode::BadRequest, "unknown base mode '" + s + "'");
}

template <class T>
std::optional<T> opt(const nlohmann::json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  return body[key].get<T>();
}

}  // namespace

version::Version create_version(workbench::Workbench& wb, const std::string& project_id, const nlohmann::json& body) {
  if (!body.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
  try {
    wb.store().get_project(project_id);
    Kind kind = parse_kind(body.at("kind").get<std::string>());
    auto base_ids = opt<std::vector<std::string>>(body, "base_ids").value_or(std::vector<std::string>{});
    if (body.contains("definition")) {
      workbench::ManualRequest m;
      m.project_id = project_id;
      m.kind = kind;
      m.definition = body.at("definition").get<std::string>();
      m.base_ids = std::move(base_ids);
      m.derived_from = opt<std::string>(body, "derived_from");
      m.grammar = opt<std::string>(body, "grammar");
      m.name = opt<std::string>(body, "name");
      m.description = opt<std::string>(body, "description");
      return wb.commit_manual(m);
    }
    workbench::ProcessRequest r;
    r.project_id = project_id;
    InputFormat format = parse_input(body.at("input_format").get<std::string>());
    bool with_context = opt<bool>(body, "with_context").value_or(false);
    prompt::BaseMode mode;
    if (auto m = opt<std::string>(body, "base_mode")) {
      mode = parse_base_mode(*m);
    } else if (base_ids.empty() || (kind == Kind::Dsl && format == InputFormat::Definition)) {
      mode = prompt::BaseMode::None;
    } else {
      mode = with_context ? prompt::BaseMode::BaseWithContext : prompt::BaseMode::BaseWithoutContext;
    }
    r.config = {kind, format, mode};
    r.payload = opt<std::string>(body, "input").value_or("");
    r.base_ids = std::move(base_ids);
    r.supplemental_definition = opt<std::string>(body, "supplemental_definition");
    r.derived_from = opt<std::string>(body, "derived_from");
    return wb.process_version(r);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("malformed request: ") + e.what());
  }
}

nlohmann::ordered_json run_repair(workbench::Workbench& wb, const std::string& version_id, const std::string& mode,
                                  int attempts) {
  std::string m = squash(mode);
  if (m == "with" || m == "withcontext") return to_json(wb.repair(version_id, workbench::RepairMode::WithContext, attempts));
  if (m == "without" || m == "withoutcontext") {
    return to_json(wb.repair(version_id, workbench::RepairMode::WithoutContext, attempts));
  }
  if (m == "combined" || m.empty()) return to_json(wb.repair_combined(version_id, attempts));
  throw Error(ErrorCode::BadRequest, "repair mode must be with, without or combined");
}

workbench::Validation validate_body(const nlohmann::json& body) {
  try {
    if (!body.is_object()) throw Error(ErrorCode::BadRequest, "request body must be a JSON object");
    std::string grammar = body.at("grammar").get<std::string>();
    if (auto ex = opt<std::string>(body, "example")) return workbench::validate_example_text(*ex, grammar);
    return workbench::validate_grammar_text(grammar);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("malformed request: ") + e.what());
  }
}

nlohmann::ordered_json configurations_json() {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& c : prompt::enumerate_configurations()) out.push_back(prompt::to_json(c));
  return out;
}

}  // namespace dslforge::api
