#include "dslforge/llm/gateway.hpp"

#include "dslforge/error.hpp"

namespace dslforge::llm {

Gateway::Gateway(std::shared_ptr<Backend> backend, ThreadRepository& threads, IdGenerator ids, Clock clock)
    : backend_(std::move(backend)), threads_(threads), ids_(std::move(ids)), clock_(std::move(clock)) {}

std::mutex& Gateway::lock_for(const std::string& thread_id) {
  std::lock_guard lock(mutex_);
  auto& slot = thread_locks_[thread_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

Thread Gateway::open_thread(const std::string& system_instructions) {
  if (system_instructions.empty()) throw Error(ErrorCode::EmptyInstructions, "system instructions are required");
  Thread t;
  {
    std::lock_guard lock(mutex_);
    t.id = ids_();
    t.messages.push_back({Role::System, system_instructions, clock_(), std::nullopt});
  }
  t.backend = backend_->name();
  threads_.save(t);
  return t;
}

Thread Gateway::get_thread(const std::string& thread_id) const {
  auto t = threads_.load(thread_id);
  if (!t) throw Error(ErrorCode::UnknownThread, "unknown thread '" + thread_id + "'");
  return *t;
}

std::string Gateway::run(const std::string& thread_id, const std::string& prompt,
                         const std::optional<std::string>& tag) {
  if (prompt.empty()) throw Error(ErrorCode::EmptyPrompt, "prompt must not be empty");
  std::lock_guard thread_lock(lock_for(thread_id));
  Thread t = get_thread(thread_id);
  std::vector<Message> history = t.messages;
  std::string asked_at;
  {
    std::lock_guard lock(mutex_);
    asked_at = clock_();
  }
  history.push_back({Role::User, prompt, asked_at, std::nullopt});
  std::string answer = backend_->complete(history);  // throws before anything is stored
  if (answer.empty()) throw Error(ErrorCode::GatewayTransport, "backend returned an empty answer");
  std::string answered_at;
  {
    std::lock_guard lock(mutex_);
    answered_at = clock_();
  }
  history.push_back({Role::Assistant, answer, answered_at, tag});
  t.messages = std::move(history);
  threads_.save(t);
  return answer;
}

Thread Gateway::fork_thread(const std::string& thread_id, std::size_t keep) {
  Thread src = get_thread(thread_id);
  if (keep == 0 || keep > src.messages.size()) keep = src.messages.size();
  Thread t;
  {
    std::lock_guard lock(mutex_);
    t.id = ids_();
  }
  t.backend = src.backend;
  t.messages.assign(src.messages.begin(), src.messages.begin() + static_cast<std::ptrdiff_t>(keep));
  threads_.save(t);
  return t;
}

void Gateway::discard_thread(const std::string& thread_id) { threads_.remove(thread_id); }

}  // namespace dslforge::llm
