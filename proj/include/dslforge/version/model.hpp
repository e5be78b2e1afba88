#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dslforge::version {

enum class Kind { Dsl, Example };
enum class InputFormat { Definition, Properties, ErrorMessage };
enum class Status { Valid, Faulty };

std::string_view to_string(Kind kind);
std::string_view to_string(InputFormat format);
std::string_view to_string(Status status);
std::optional<Kind> kind_from_string(std::string_view text);
std::optional<InputFormat> input_format_from_string(std::string_view text);
std::optional<Status> status_from_string(std::string_view text);

struct Project {
  std::string id;
  std::string name;
  std::string created_at;

  friend bool operator==(const Project&, const Project&) = default;
};

/// Everything a caller supplies when adding a version; the store assigns the
/// id (unless reserved beforehand) and the timestamp.
struct VersionDraft {
  std::optional<std::string> id;
  Kind kind = Kind::Dsl;
  InputFormat input_format = InputFormat::Properties;
  std::string input;
  std::vector<std::string> base_ids;
  bool with_context = false;
  std::string definition;
  Status status = Status::Valid;
  std::optional<std::string> error_message;
  std::optional<std::string> thread_id;
  std::optional<std::string> derived_from;
  std::optional<std::string> name;
  std::optional<std::string> description;
};

struct Version {
  std::string id;
  std::string project_id;
  Kind kind = Kind::Dsl;
  InputFormat input_format = InputFormat::Properties;
  std::string input;
  std::vector<std::string> base_ids;
  bool with_context = false;
  std::string definition;
  Status status = Status::Valid;
  std::optional<std::string> error_message;
  std::optional<std::string> thread_id;
  std::optional<std::string> derived_from;
  std::optional<std::string> name;
  std::optional<std::string> description;
  std::string created_at;

  bool is_root() const { return base_ids.empty(); }
  bool is_faulty() const { return status == Status::Faulty; }

  friend bool operator==(const Version&, const Version&) = default;
};

nlohmann::ordered_json to_json(const Project& project);
nlohmann::ordered_json to_json(const Version& version);
Project project_from_json(const nlohmann::json& j);
Version version_from_json(const nlohmann::json& j);

}  // namespace dslforge::version
