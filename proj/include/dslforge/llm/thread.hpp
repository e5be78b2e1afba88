#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dslforge::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct Message {
  Role role = Role::User;
  std::string content;
  std::string at;
  /// Version produced by this answer, when known. Used to find the point a
  /// thread has to be forked at after backtracking.
  std::optional<std::string> tag;

  friend bool operator==(const Message&, const Message&) = default;
};

struct Thread {
  std::string id;
  std::vector<Message> messages;
  std::string backend;

  friend bool operator==(const Thread&, const Thread&) = default;
};

nlohmann::ordered_json to_json(const Thread& thread);
Thread thread_from_json(const nlohmann::json& j);

class ThreadRepository {
 public:
  virtual ~ThreadRepository() = default;
  virtual void save(const Thread& thread) = 0;
  virtual std::optional<Thread> load(const std::string& id) const = 0;
  virtual void remove(const std::string& id) = 0;
};

class MemoryThreadRepository : public ThreadRepository {
 public:
  void save(const Thread& thread) override;
  std::optional<Thread> load(const std::string& id) const override;
  void remove(const std::string& id) override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Thread> threads_;
};

}  // namespace dslforge::llm
