#include "dslforge/version/model.hpp"

#include "dslforge/error.hpp"

namespace dslforge::version {

std::string_view to_string(Kind kind) { return kind == Kind::Dsl ? "Dsl" : "Example"; }

std::string_view to_string(InputFormat format) {
  switch (format) {
    case InputFormat::Definition: return "Definition";
    case InputFormat::Properties: return "Properties";
    case InputFormat::ErrorMessage: return "ErrorMessage";
  }
  return "?";
}

std::string_view to_string(Status status) { return status == Status::Valid ? "Valid" : "Faulty"; }

std::optional<Kind> kind_from_string(std::string_view text) {
  if (text == "Dsl") return Kind::Dsl;
  if (text == "Example") return Kind::Example;
  return std::nullopt;
}

std::optional<InputFormat> input_format_from_string(std::string_view text) {
  if (text == "Definition") return InputFormat::Definition;
  if (text == "Properties") return InputFormat::Properties;
  if (text == "ErrorMessage") return InputFormat::ErrorMessage;
  return std::nullopt;
}

std::optional<Status> status_from_string(std::string_view text) {
  if (text == "Valid") return Status::Valid;
  if (text == "Faulty") return Status::Faulty;
  return std::nullopt;
}

namespace {

template <class T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

template <class E>
E parse_enum(const nlohmann::json& j, const char* key, std::optional<E> (*from)(std::string_view)) {
  auto v = from(j.at(key).get<std::string>());
  if (!v) throw Error(ErrorCode::Storage, std::string("invalid value for ") + key);
  return *v;
}

}  // namespace

nlohmann::ordered_json to_json(const Project& project) {
  nlohmann::ordered_json j;
  j["id"] = project.id;
  j["name"] = project.name;
  j["created_at"] = project.created_at;
  return j;
}

nlohmann::ordered_json to_json(const Version& v) {
  nlohmann::ordered_json j;
  j["id"] = v.id;
  j["project_id"] = v.project_id;
  j["kind"] = to_string(v.kind);
  j["input_format"] = to_string(v.input_format);
  j["input"] = v.input;
  j["base_ids"] = v.base_ids;
  j["with_context"] = v.with_context;
  j["definition"] = v.definition;
  j["status"] = to_string(v.status);
  j["error_message"] = optional_json(v.error_message);
  j["thread_id"] = optional_json(v.thread_id);
  j["derived_from"] = optional_json(v.derived_from);
  j["name"] = optional_json(v.name);
  j["description"] = optional_json(v.description);
  j["created_at"] = v.created_at;
  return j;
}

Project project_from_json(const nlohmann::json& j) {
  try {
    return Project{j.at("id").get<std::string>(), j.at("name").get<std::string>(),
                   j.at("created_at").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Storage, std::string("malformed project record: ") + e.what());
  }
}

Version version_from_json(const nlohmann::json& j) {
  try {
    Version v;
    v.id = j.at("id").get<std::string>();
    v.project_id = j.at("project_id").get<std::string>();
    v.kind = parse_enum(j, "kind", &kind_from_string);
    v.input_format = parse_enum(j, "input_format", &input_format_from_string);
    v.input = j.at("input").get<std::string>();
    v.base_ids = j.at("base_ids").get<std::vector<std::string>>();
    v.with_context = j.at("with_context").get<bool>();
    v.definition = j.at("definition").get<std::string>();
    v.status = parse_enum(j, "status", &status_from_string);
    v.error_message = optional_string(j, "error_message");
    v.thread_id = optional_string(j, "thread_id");
    v.derived_from = optional_string(j, "derived_from");
    v.name = optional_string(j, "name");
    v.description = optional_string(j, "description");
    v.created_at = j.at("created_at").get<std::string>();
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Storage, std::string("malformed version record: ") + e.what());
  }
}

}  // namespace dslforge::version
