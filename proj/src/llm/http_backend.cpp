#include <chrono>
#include <cstdlib>
#include <regex>

#include "httplib.h"

#include "dslforge/error.hpp"
#include "dslforge/llm/backend.hpp"

namespace dslforge::llm {

BackendConfig BackendConfig::from_json(const nlohmann::json& j) {
  BackendConfig c;
  std::string mode = j.value("mode", "mock");
  if (mode == "http" || mode == "Http") {
    c.mode = Mode::Http;
  } else if (mode == "mock" || mode == "Mock") {
    c.mode = Mode::Mock;
  } else {
    throw Error(ErrorCode::InvalidConfig, "backend mode must be 'http' or 'mock'");
  }
  c.endpoint = j.value("endpoint", "");
  c.model = j.value("model", "");
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  if (j.contains("temperature") && !j["temperature"].is_null()) c.temperature = j["temperature"].get<double>();
  c.transcript = j.value("transcript", "");
  c.timeout_seconds = j.value("timeout", c.timeout_seconds);
  c.structured_output = j.value("structured_output", c.structured_output);
  c.retries = j.value("retries", c.retries);
  if (c.mode == Mode::Http && c.endpoint.empty()) throw Error(ErrorCode::InvalidConfig, "http backend needs an endpoint");
  if (c.mode == Mode::Mock && c.transcript.empty()) throw Error(ErrorCode::InvalidConfig, "mock backend needs a transcript");
  if (c.retries < 0 || c.retries > 1) throw Error(ErrorCode::InvalidConfig, "retries must be 0 or 1");
  return c;
}

BackendConfig BackendConfig::from_spec(const std::string& spec) {
  BackendConfig c;
  if (spec.rfind("mock:", 0) == 0) {
    c.mode = Mode::Mock;
    c.transcript = spec.substr(5);
  } else if (spec.rfind("http:", 0) == 0 && spec.rfind("http://", 0) != 0) {
    c.mode = Mode::Http;
    c.endpoint = spec.substr(5);
  } else if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    c.mode = Mode::Http;
    c.endpoint = spec;
  } else {
    throw Error(ErrorCode::InvalidConfig, "backend must be 'mock:<transcript>' or 'http:<endpoint>'");
  }
  if ((c.mode == Mode::Mock && c.transcript.empty()) || (c.mode == Mode::Http && c.endpoint.empty())) {
    throw Error(ErrorCode::InvalidConfig, "backend spec '" + spec + "' is incomplete");
  }
  return c;
}

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
  static const std::regex url(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url)) {
    throw Error(ErrorCode::InvalidConfig, "endpoint must be an http(s) URL: " + config_.endpoint);
  }
  origin_ = m[1].str();
  std::string base = m[2].matched ? m[2].str() : "";
  while (!base.empty() && base.back() == '/') base.pop_back();
  path_ = base + "/chat/completions";
}

nlohmann::ordered_json HttpBackend::request_body(const std::vector<Message>& history) const {
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  nlohmann::ordered_json msgs = nlohmann::ordered_json::array();
  for (const auto& m : history) msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  body["messages"] = std::move(msgs);
  if (config_.structured_output) body["response_format"] = {{"type", "json_object"}};
  if (config_.temperature) body["temperature"] = *config_.temperature;
  return body;
}

std::string HttpBackend::attempt(const std::string& body) {
  httplib::Client client(origin_);
  auto secs = std::chrono::duration<double>(config_.timeout_seconds);
  auto dur = std::chrono::duration_cast<std::chrono::microseconds>(secs);
  client.set_connection_timeout(dur);
  client.set_read_timeout(dur);
  client.set_write_timeout(dur);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    auto err = res.error();
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= config_.timeout_seconds * 0.9)) {
      throw Error(ErrorCode::GatewayTimeout, "no answer from " + origin_ + " within the timeout");
    }
    throw Error(ErrorCode::GatewayTransport, "request to " + origin_ + " failed: " + httplib::to_string(err));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::GatewayTransport,
                "endpoint answered HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  auto j = nlohmann::json::parse(res->body, nullptr, false);
  try {
    if (!j.is_discarded()) return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
  }
  throw Error(ErrorCode::GatewayTransport, "endpoint answer has no choices[0].message.content");
}

std::string HttpBackend::complete(const std::vector<Message>& history) {
  std::string body = request_body(history).dump();
  for (int i = 0;; ++i) {
    try {
      return attempt(body);
    } catch (const Error&) {
      if (i >= config_.retries) throw;
    }
  }
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  if (config.mode == BackendConfig::Mode::Http) return std::make_unique<HttpBackend>(config);
  return MockBackend::from_file(config.transcript, config.mock_state);
}

}  // namespace dslforge::llm
