#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dslforge/llm/thread.hpp"

namespace dslforge::llm {

struct BackendConfig {
  enum class Mode { Http, Mock };
  Mode mode = Mode::Mock;
  // Http
  std::string endpoint;
  std::string model;
  std::string api_key_env = "DSL_FORGE_API_KEY";
  std::optional<double> temperature;
  // Mock
  std::filesystem::path transcript;
  std::optional<std::filesystem::path> mock_state;  // persists consumption across processes
  // both
  double timeout_seconds = 60;
  bool structured_output = true;
  int retries = 0;  // 0 or 1

  static BackendConfig from_json(const nlohmann::json& j);
  /// "mock:<transcript>" or "http:<endpoint>".
  static BackendConfig from_spec(const std::string& spec);
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// One assistant answer for the full history. Throws Error(GatewayTimeout |
  /// GatewayTransport | MockExhausted).
  virtual std::string complete(const std::vector<Message>& history) = 0;
  virtual std::string name() const = 0;
};

/// Scripted answers. Keyed entries are matched first (the key is a substring
/// of the latest prompt); otherwise the next unkeyed entry is consumed.
/// An entry may carry "fail": "timeout" | "transport" to simulate errors.
class MockBackend : public Backend {
 public:
  struct Entry {
    std::optional<std::string> match;
    std::string answer;
    std::optional<std::string> fail;
  };

  explicit MockBackend(std::vector<Entry> entries, std::optional<std::filesystem::path> state = std::nullopt);
  static std::unique_ptr<MockBackend> from_file(const std::filesystem::path& transcript,
                                                std::optional<std::filesystem::path> state = std::nullopt);
  static std::vector<Entry> parse_transcript(const nlohmann::json& j);

  std::string complete(const std::vector<Message>& history) override;
  std::string name() const override { return "mock"; }

  std::size_t remaining() const;
  /// Prompts seen so far, in order.
  std::vector<std::string> prompts() const;

 private:
  void save_state() const;

  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
  std::vector<bool> used_;
  std::vector<std::string> prompts_;
  std::optional<std::filesystem::path> state_;
};

/// OpenAI-compatible chat completions over HTTP(S); the whole thread is sent
/// on every call.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig config);
  std::string complete(const std::vector<Message>& history) override;
  std::string name() const override { return "http:" + config_.model; }

  /// Request body for `history` (exposed for inspection).
  nlohmann::ordered_json request_body(const std::vector<Message>& history) const;

 private:
  std::string attempt(const std::string& body);

  BackendConfig config_;
  std::string origin_;  // scheme://host:port
  std::string path_;    // base path + /chat/completions
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

}  // namespace dslforge::llm
