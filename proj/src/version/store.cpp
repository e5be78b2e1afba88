#include "dslforge/version/store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dslforge/error.hpp"

namespace fs = std::filesystem;

namespace dslforge::version {

namespace {

void write_atomically(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Storage, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::Storage, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot replace " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Storage, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_file(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Storage, path.string() + ": " + e.what());
  }
}

std::string record(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-'; });
}

}  // namespace

bool is_repair(const Version& child) { return child.input_format == InputFormat::ErrorMessage; }

void check_draft(const VersionDraft& d, const GraphView& graph) {
  auto invalid = [](const std::string& m) { throw Error(ErrorCode::InvalidDraft, m); };
  if ((d.status == Status::Faulty) != d.error_message.has_value()) {
    invalid("a version is faulty exactly when it carries an error message");
  }
  if (d.with_context && d.base_ids.empty()) invalid("with_context requires a base");
  if (d.id && !valid_id(*d.id)) invalid("malformed version id");

  std::vector<const Version*> bases;
  std::set<std::string> seen;
  for (const auto& id : d.base_ids) {
    if (!seen.insert(id).second) invalid("base '" + id + "' listed twice");
    const Version* b = graph.find(id);
    if (!b) throw Error(ErrorCode::UnknownBase, "unknown base version '" + id + "'");
    bases.push_back(b);
  }
  if (d.derived_from) {
    const Version* src = graph.find(*d.derived_from);
    if (!src) throw Error(ErrorCode::UnknownBase, "unknown derived_from version '" + *d.derived_from + "'");
    if (src->kind == d.kind) invalid("derived_from must link a version of the other kind");
    if (seen.count(*d.derived_from)) invalid("derived_from cannot also be a base");
  }

  if (bases.size() > 1) {
    bool examples = std::all_of(bases.begin(), bases.end(), [](const Version* b) { return b->kind == Kind::Example; });
    if (d.kind != Kind::Dsl || !examples || d.input_format != InputFormat::Definition || d.with_context) {
      throw Error(ErrorCode::ConstraintC1,
                  "C1: more than one base is only allowed when generalizing examples into a DSL (Definition input, "
                  "no context)");
    }
    return;
  }

  if (d.input_format == InputFormat::ErrorMessage) {
    if (bases.size() != 1 || bases.front()->status != Status::Faulty) {
      throw Error(ErrorCode::ConstraintC2, "C2: an error-message version must have exactly one faulty base");
    }
    if (bases.front()->kind != d.kind) {
      throw Error(ErrorCode::ConstraintC3, "C3: an error-message version must have the same kind as its base");
    }
  }

  if (bases.size() == 1) {
    const Version* base = bases.front();
    if (base->kind != d.kind) {
      throw Error(ErrorCode::ConstraintC4, "C4: a new version must have the same kind as its base");
    }
    if (d.input_format != InputFormat::ErrorMessage) {
      for (const Version* child : graph.children(base->id)) {
        if (child->base_ids.size() == 1 && !is_repair(*child)) {
          throw Error(ErrorCode::ConstraintC4, "C4: base '" + base->id + "' already has successor '" + child->id + "'");
        }
      }
    }
  }
}

struct VersionStore::ProjectData {
  Project project;
  fs::path dir;
  std::vector<Version> versions;
  mutable std::shared_mutex mutex;

  const Version* find(const std::string& id) const {
    for (const auto& v : versions) {
      if (v.id == id) return &v;
    }
    return nullptr;
  }

  std::vector<const Version*> children(const std::string& id) const {
    std::vector<const Version*> out;
    for (const auto& v : versions) {
      if (std::find(v.base_ids.begin(), v.base_ids.end(), id) != v.base_ids.end()) out.push_back(&v);
    }
    return out;
  }

  GraphView view() const {
    return GraphView{[this](const std::string& id) { return find(id); },
                     [this](const std::string& id) { return children(id); }};
  }
};

VersionStore::VersionStore(fs::path root, StoreOptions options) : root_(std::move(root)), options_(std::move(options)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot create store at " + root_.string() + ": " + ec.message());
  load();
}

VersionStore::~VersionStore() = default;

void VersionStore::load() {
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root_)) {
    if (entry.is_directory() && fs::exists(entry.path() / "project.json")) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    auto data = std::make_unique<ProjectData>();
    data->dir = dir;
    data->project = project_from_json(parse_file(dir / "project.json"));
    if (fs::exists(dir / "versions")) {
      for (const auto& entry : fs::directory_iterator(dir / "versions")) {
        if (entry.path().extension() != ".json") continue;
        data->versions.push_back(version_from_json(parse_file(entry.path())));
      }
    }
    std::sort(data->versions.begin(), data->versions.end(), [](const Version& a, const Version& b) {
      return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
    });
    for (const auto& v : data->versions) version_index_[v.id] = data->project.id;
    std::string id = data->project.id;
    projects_[id] = std::move(data);
  }
}

std::string VersionStore::reserve_id() {
  std::lock_guard lock(id_mutex_);
  return options_.ids();
}

std::string VersionStore::now() {
  std::lock_guard lock(id_mutex_);
  return options_.clock();
}

Project VersionStore::create_project(const std::string& name) {
  if (name.empty()) throw Error(ErrorCode::EmptyName, "project name must not be empty");
  auto data = std::make_unique<ProjectData>();
  data->project.id = reserve_id();
  data->project.name = name;
  {
    std::lock_guard lock(id_mutex_);
    data->project.created_at = options_.clock();
  }
  data->dir = root_ / data->project.id;
  write_atomically(data->dir / "project.json", record(to_json(data->project)));
  fs::create_directories(data->dir / "versions");
  fs::create_directories(data->dir / "threads");
  Project p = data->project;
  std::unique_lock lock(index_mutex_);
  projects_[p.id] = std::move(data);
  return p;
}

std::vector<Project> VersionStore::list_projects() const {
  std::shared_lock lock(index_mutex_);
  std::vector<Project> out;
  for (const auto& [id, data] : projects_) out.push_back(data->project);
  std::sort(out.begin(), out.end(),
            [](const Project& a, const Project& b) { return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id); });
  return out;
}

VersionStore::ProjectData& VersionStore::project_data(const std::string& project_id) const {
  std::shared_lock lock(index_mutex_);
  auto it = projects_.find(project_id);
  if (it == projects_.end()) throw Error(ErrorCode::UnknownProject, "unknown project '" + project_id + "'");
  return *it->second;
}

VersionStore::ProjectData& VersionStore::project_of_version(const std::string& version_id) const {
  std::string project_id;
  {
    std::shared_lock lock(index_mutex_);
    auto it = version_index_.find(version_id);
    if (it == version_index_.end()) throw Error(ErrorCode::UnknownVersion, "unknown version '" + version_id + "'");
    project_id = it->second;
  }
  return project_data(project_id);
}

Project VersionStore::get_project(const std::string& project_id) const { return project_data(project_id).project; }

void VersionStore::check(const std::string& project_id, const VersionDraft& draft) const {
  ProjectData& data = project_data(project_id);
  std::shared_lock lock(data.mutex);
  check_draft(draft, data.view());
}

Version VersionStore::add_version(const std::string& project_id, const VersionDraft& draft) {
  ProjectData& data = project_data(project_id);
  std::unique_lock lock(data.mutex);
  check_draft(draft, data.view());

  Version v;
  v.id = draft.id ? *draft.id : reserve_id();
  {
    std::shared_lock index(index_mutex_);
    if (version_index_.count(v.id)) throw Error(ErrorCode::InvalidDraft, "version id '" + v.id + "' already in use");
  }
  v.project_id = project_id;
  v.kind = draft.kind;
  v.input_format = draft.input_format;
  v.input = draft.input;
  v.base_ids = draft.base_ids;
  v.with_context = draft.with_context;
  v.definition = draft.definition;
  v.status = draft.status;
  v.error_message = draft.error_message;
  v.thread_id = draft.thread_id;
  v.derived_from = draft.derived_from;
  v.name = draft.name;
  v.description = draft.description;
  {
    std::lock_guard id_lock(id_mutex_);
    v.created_at = options_.clock();
  }
  write_atomically(data.dir / "versions" / (v.id + ".json"), record(to_json(v)));
  data.versions.push_back(v);
  std::unique_lock index(index_mutex_);
  version_index_[v.id] = project_id;
  return v;
}

std::optional<Version> VersionStore::find_version(const std::string& version_id) const {
  try {
    return get_version(version_id);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownVersion) return std::nullopt;
    throw;
  }
}

Version VersionStore::get_version(const std::string& version_id) const {
  ProjectData& data = project_of_version(version_id);
  std::shared_lock lock(data.mutex);
  const Version* v = data.find(version_id);
  if (!v) throw Error(ErrorCode::UnknownVersion, "unknown version '" + version_id + "'");
  return *v;
}

std::vector<Version> VersionStore::versions(const std::string& project_id) const {
  ProjectData& data = project_data(project_id);
  std::shared_lock lock(data.mutex);
  return data.versions;
}

void VersionStore::delete_version(const std::string& version_id) {
  ProjectData& data = project_of_version(version_id);
  std::unique_lock lock(data.mutex);
  if (!data.find(version_id)) throw Error(ErrorCode::UnknownVersion, "unknown version '" + version_id + "'");
  auto kids = data.children(version_id);
  if (!kids.empty()) {
    throw Error(ErrorCode::HasSuccessors,
                "version '" + version_id + "' has successor '" + kids.front()->id + "'; only leaves can be deleted");
  }
  for (const auto& v : data.versions) {
    if (v.derived_from == version_id) {
      throw Error(ErrorCode::HasSuccessors, "version '" + version_id + "' is traced by '" + v.id + "' (derived_from)");
    }
  }
  std::error_code ec;
  fs::remove(data.dir / "versions" / (version_id + ".json"), ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot delete version file: " + ec.message());
  std::erase_if(data.versions, [&](const Version& v) { return v.id == version_id; });
  std::unique_lock index(index_mutex_);
  version_index_.erase(version_id);
}

std::vector<Version> VersionStore::lineage(const std::string& version_id) const {
  ProjectData& data = project_of_version(version_id);
  std::shared_lock lock(data.mutex);
  std::vector<Version> out;
  const Version* cur = data.find(version_id);
  if (!cur) throw Error(ErrorCode::UnknownVersion, "unknown version '" + version_id + "'");
  while (cur) {
    out.push_back(*cur);
    cur = cur->base_ids.empty() ? nullptr : data.find(cur->base_ids.front());
  }
  std::reverse(out.begin(), out.end());
  return out;
}

Neighbors VersionStore::neighbors(const std::string& version_id) const {
  ProjectData& data = project_of_version(version_id);
  std::shared_lock lock(data.mutex);
  const Version* v = data.find(version_id);
  if (!v) throw Error(ErrorCode::UnknownVersion, "unknown version '" + version_id + "'");
  Neighbors n;
  n.bases = v->base_ids;
  for (const Version* c : data.children(version_id)) n.successors.push_back(c->id);
  n.derived_from = v->derived_from;
  for (const auto& other : data.versions) {
    if (other.derived_from == version_id) n.derived.push_back(other.id);
  }
  return n;
}

void VersionStore::put_thread(const std::string& project_id, const std::string& thread_id,
                              const nlohmann::ordered_json& thread) {
  if (!valid_id(thread_id)) throw Error(ErrorCode::UnknownThread, "malformed thread id");
  ProjectData& data = project_data(project_id);
  std::unique_lock lock(data.mutex);
  write_atomically(data.dir / "threads" / (thread_id + ".json"), record(thread));
}

std::optional<nlohmann::ordered_json> VersionStore::get_thread(const std::string& project_id,
                                                               const std::string& thread_id) const {
  if (!valid_id(thread_id)) return std::nullopt;
  ProjectData& data = project_data(project_id);
  std::shared_lock lock(data.mutex);
  fs::path path = data.dir / "threads" / (thread_id + ".json");
  if (!fs::exists(path)) return std::nullopt;
  try {
    return nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Storage, path.string() + ": " + e.what());
  }
}

void VersionStore::delete_thread(const std::string& project_id, const std::string& thread_id) {
  if (!valid_id(thread_id)) return;
  ProjectData& data = project_data(project_id);
  std::unique_lock lock(data.mutex);
  std::error_code ec;
  fs::remove(data.dir / "threads" / (thread_id + ".json"), ec);
}

}  // namespace dslforge::version
