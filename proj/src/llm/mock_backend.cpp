#include <algorithm>
#include <fstream>
#include <sstream>

#include "dslforge/error.hpp"
#include "dslforge/llm/backend.hpp"

namespace dslforge::llm {

MockBackend::MockBackend(std::vector<Entry> entries, std::optional<std::filesystem::path> state)
    : entries_(std::move(entries)), used_(entries_.size(), false), state_(std::move(state)) {
  if (!state_ || !std::filesystem::exists(*state_)) return;
  std::ifstream in(*state_);
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("used")) return;
  for (const auto& i : j["used"]) {
    auto idx = i.get<std::size_t>();
    if (idx < used_.size()) used_[idx] = true;
  }
}

std::vector<MockBackend::Entry> MockBackend::parse_transcript(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "mock transcript must be a JSON array");
  std::vector<Entry> out;
  for (const auto& item : j) {
    Entry e;
    if (item.is_string()) {
      e.answer = item.get<std::string>();
    } else if (item.is_object()) {
      if (item.contains("match") && !item["match"].is_null()) e.match = item["match"].get<std::string>();
      if (item.contains("fail") && !item["fail"].is_null()) e.fail = item["fail"].get<std::string>();
      if (item.contains("answer")) {
        const auto& a = item["answer"];
        e.answer = a.is_string() ? a.get<std::string>() : a.dump();
      } else if (!e.fail) {
        throw Error(ErrorCode::InvalidConfig, "mock transcript entry without 'answer'");
      }
    } else {
      throw Error(ErrorCode::InvalidConfig, "mock transcript entries must be objects or strings");
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::unique_ptr<MockBackend> MockBackend::from_file(const std::filesystem::path& transcript,
                                                    std::optional<std::filesystem::path> state) {
  std::ifstream in(transcript);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read mock transcript " + transcript.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, "mock transcript is not valid JSON");
  return std::make_unique<MockBackend>(parse_transcript(j), std::move(state));
}

std::string MockBackend::complete(const std::vector<Message>& history) {
  std::lock_guard lock(mutex_);
  std::string prompt;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (it->role == Role::User) {
      prompt = it->content;
      break;
    }
  }
  prompts_.push_back(prompt);
  std::optional<std::size_t> pick;
  for (std::size_t i = 0; i < entries_.size() && !pick; ++i) {
    if (!used_[i] && entries_[i].match && prompt.find(*entries_[i].match) != std::string::npos) pick = i;
  }
  for (std::size_t i = 0; i < entries_.size() && !pick; ++i) {
    if (!used_[i] && !entries_[i].match) pick = i;
  }
  if (!pick) throw Error(ErrorCode::MockExhausted, "mock transcript has no answer left for this prompt");
  used_[*pick] = true;
  save_state();
  const Entry& e = entries_[*pick];
  if (e.fail) {
    if (*e.fail == "timeout") throw Error(ErrorCode::GatewayTimeout, "simulated timeout");
    throw Error(ErrorCode::GatewayTransport, "simulated transport failure");
  }
  return e.answer;
}

void MockBackend::save_state() const {
  if (!state_) return;
  nlohmann::json j;
  j["used"] = nlohmann::json::array();
  for (std::size_t i = 0; i < used_.size(); ++i) {
    if (used_[i]) j["used"].push_back(i);
  }
  std::ofstream out(*state_, std::ios::trunc);
  out << j.dump() << "\n";
}

std::size_t MockBackend::remaining() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count(used_.begin(), used_.end(), false));
}

std::vector<std::string> MockBackend::prompts() const {
  std::lock_guard lock(mutex_);
  return prompts_;
}

}  // namespace dslforge::llm
