#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "dslforge/clock.hpp"
#include "dslforge/llm/backend.hpp"
#include "dslforge/llm/thread.hpp"

namespace dslforge::llm {

/// Client-side threads over a stateless backend: each run sends the whole
/// history and appends the prompt and answer only when the call succeeds.
class Gateway {
 public:
  Gateway(std::shared_ptr<Backend> backend, ThreadRepository& threads, IdGenerator ids = random_ids(),
          Clock clock = system_clock());

  Thread open_thread(const std::string& system_instructions);
  std::string run(const std::string& thread_id, const std::string& prompt,
                  const std::optional<std::string>& tag = std::nullopt);
  /// New thread holding a copy of the first `keep` messages.
  Thread fork_thread(const std::string& thread_id, std::size_t keep);
  Thread get_thread(const std::string& thread_id) const;
  void discard_thread(const std::string& thread_id);

  Backend& backend() { return *backend_; }

 private:
  std::mutex& lock_for(const std::string& thread_id);

  std::shared_ptr<Backend> backend_;
  ThreadRepository& threads_;
  IdGenerator ids_;
  Clock clock_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> thread_locks_;
};

}  // namespace dslforge::llm
