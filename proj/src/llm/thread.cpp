#include "dslforge/llm/thread.hpp"

#include "dslforge/error.hpp"

namespace dslforge::llm {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

namespace {

Role role_from(const std::string& s) {
  if (s == "system") return Role::System;
  if (s == "assistant") return Role::Assistant;
  if (s == "user") return Role::User;
  throw Error(ErrorCode::Storage, "unknown message role '" + s + "'");
}

}  // namespace

nlohmann::ordered_json to_json(const Thread& thread) {
  nlohmann::ordered_json msgs = nlohmann::ordered_json::array();
  for (const auto& m : thread.messages) {
    nlohmann::ordered_json j;
    j["role"] = to_string(m.role);
    j["content"] = m.content;
    j["at"] = m.at;
    j["tag"] = m.tag ? nlohmann::ordered_json(*m.tag) : nlohmann::ordered_json(nullptr);
    msgs.push_back(std::move(j));
  }
  nlohmann::ordered_json out;
  out["id"] = thread.id;
  out["backend"] = thread.backend;
  out["messages"] = std::move(msgs);
  return out;
}

Thread thread_from_json(const nlohmann::json& j) {
  try {
    Thread t;
    t.id = j.at("id").get<std::string>();
    t.backend = j.value("backend", "");
    for (const auto& m : j.at("messages")) {
      Message msg;
      msg.role = role_from(m.at("role").get<std::string>());
      msg.content = m.at("content").get<std::string>();
      msg.at = m.value("at", "");
      if (m.contains("tag") && !m["tag"].is_null()) msg.tag = m["tag"].get<std::string>();
      t.messages.push_back(std::move(msg));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Storage, std::string("malformed thread record: ") + e.what());
  }
}

void MemoryThreadRepository::save(const Thread& thread) {
  std::lock_guard lock(mutex_);
  threads_[thread.id] = thread;
}

std::optional<Thread> MemoryThreadRepository::load(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = threads_.find(id);
  if (it == threads_.end()) return std::nullopt;
  return it->second;
}

void MemoryThreadRepository::remove(const std::string& id) {
  std::lock_guard lock(mutex_);
  threads_.erase(id);
}

}  // namespace dslforge::llm
