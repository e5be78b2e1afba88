#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dslforge/llm/backend.hpp"
#include "dslforge/llm/gateway.hpp"
#include "dslforge/prompt/configuration.hpp"
#include "dslforge/version/store.hpp"
#include "dslforge/workbench/validation.hpp"

namespace dslforge::workbench {

enum class RepairMode { WithContext, WithoutContext };

std::string_view to_string(RepairMode mode);

struct RepairOutcome {
  bool fixed = false;
  int attempts_used = 0;
  std::vector<std::string> chain;  // faulty version first, then every attempt
  RepairMode mode = RepairMode::WithContext;
  std::optional<std::string> stopped_by;  // error code that ended the loop early
};

struct CombinedOutcome {
  RepairOutcome with;
  RepairOutcome without;
  bool fixed_any = false;
};

nlohmann::ordered_json to_json(const RepairOutcome& outcome);
nlohmann::ordered_json to_json(const CombinedOutcome& outcome);

struct ProcessRequest {
  std::string project_id;
  prompt::PromptConfiguration config;
  std::string payload;
  std::vector<std::string> base_ids;
  std::optional<std::string> supplemental_definition;
  std::optional<std::string> derived_from;
};

/// A definition typed in by the user: validated and stored, no model call.
struct ManualRequest {
  std::string project_id;
  version::Kind kind = version::Kind::Dsl;
  std::string definition;
  std::vector<std::string> base_ids;
  std::optional<std::string> derived_from;
  std::optional<std::string> grammar;  // governing grammar text for examples
  std::optional<std::string> name;
  std::optional<std::string> description;
};

inline constexpr int kDefaultRepairAttempts = 4;

/// The version pipeline: prompt, model call, answer parsing, validation and
/// storage, plus automatic grammar repair.
class Workbench {
 public:
  Workbench(version::VersionStore& store, std::shared_ptr<llm::Backend> backend);
  ~Workbench();

  version::Version process_version(const ProcessRequest& request);
  version::Version commit_manual(const ManualRequest& request);

  RepairOutcome repair(const std::string& version_id, RepairMode mode, int max_attempts = kDefaultRepairAttempts);
  CombinedOutcome repair_combined(const std::string& version_id, int max_attempts = kDefaultRepairAttempts);

  /// Grammar text governing a version: its own definition for DSL versions,
  /// otherwise the derived_from grammar, searched along first bases.
  std::optional<std::string> governing_grammar(const version::Version& v) const;

  /// Meta-model of a valid DSL version.
  grammar::MetaModel metamodel_of(const std::string& version_id) const;

  version::VersionStore& store() { return store_; }
  llm::Gateway& gateway(const std::string& project_id);

 private:
  struct ProjectThreads;

  version::VersionStore& store_;
  std::shared_ptr<llm::Backend> backend_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<ProjectThreads>> threads_;
  std::map<std::string, std::shared_ptr<std::mutex>> repair_locks_;  // one loop per version
};

}  // namespace dslforge::workbench
