#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "dslforge/clock.hpp"
#include "dslforge/version/model.hpp"

namespace dslforge::version {

using dslforge::Clock;
using dslforge::IdGenerator;
using dslforge::logical_clock;
using dslforge::random_ids;
using dslforge::seeded_ids;
using dslforge::system_clock;

struct StoreOptions {
  IdGenerator ids = random_ids();
  Clock clock = system_clock();
};

/// Read-only view used by the constraint checker.
struct GraphView {
  std::function<const Version*(const std::string&)> find;
  std::function<std::vector<const Version*>(const std::string&)> children;  // all versions naming it as a base
};

/// Checks a draft against C1-C4 and the record invariants. Throws Error.
void check_draft(const VersionDraft& draft, const GraphView& graph);

/// True when `child` is a repair attempt, which may branch from its faulty
/// base even when that base already has successors.
bool is_repair(const Version& child);

struct Neighbors {
  std::vector<std::string> bases;
  std::vector<std::string> successors;
  std::optional<std::string> derived_from;
  std::vector<std::string> derived;
};

/// Projects and their version DAGs, persisted as one directory per project:
/// project.json, versions/<id>.json, threads/<id>.json. Writes to a project
/// are serialized; reads run concurrently.
class VersionStore {
 public:
  explicit VersionStore(std::filesystem::path root, StoreOptions options = {});
  ~VersionStore();

  VersionStore(const VersionStore&) = delete;
  VersionStore& operator=(const VersionStore&) = delete;

  const std::filesystem::path& root() const { return root_; }

  Project create_project(const std::string& name);
  std::vector<Project> list_projects() const;
  Project get_project(const std::string& project_id) const;

  /// Fresh identifier, e.g. to tag a thread message before the version exists.
  std::string reserve_id();
  /// Current time from the store's clock.
  std::string now();

  /// Validates the draft without persisting anything.
  void check(const std::string& project_id, const VersionDraft& draft) const;

  Version add_version(const std::string& project_id, const VersionDraft& draft);
  Version get_version(const std::string& version_id) const;
  std::optional<Version> find_version(const std::string& version_id) const;
  std::vector<Version> versions(const std::string& project_id) const;
  void delete_version(const std::string& version_id);

  /// Root to version along first bases.
  std::vector<Version> lineage(const std::string& version_id) const;
  Neighbors neighbors(const std::string& version_id) const;

  void put_thread(const std::string& project_id, const std::string& thread_id, const nlohmann::ordered_json& thread);
  std::optional<nlohmann::ordered_json> get_thread(const std::string& project_id, const std::string& thread_id) const;
  void delete_thread(const std::string& project_id, const std::string& thread_id);

 private:
  struct ProjectData;

  ProjectData& project_data(const std::string& project_id) const;
  ProjectData& project_of_version(const std::string& version_id) const;
  void load();

  std::filesystem::path root_;
  StoreOptions options_;
  mutable std::shared_mutex index_mutex_;
  std::mutex id_mutex_;
  std::map<std::string, std::unique_ptr<ProjectData>> projects_;
  std::map<std::string, std::string> version_index_;  // version id -> project id
};

}  // namespace dslforge::version
