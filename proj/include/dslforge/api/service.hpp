#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include "dslforge/llm/backend.hpp"
#include "dslforge/workbench/workbench.hpp"

namespace httplib {
class Server;
}

namespace dslforge::api {

struct ApiResponse {
  int status = 200;
  std::string body;  // empty for 204
  std::string content_type = "application/json";
};

/// The REST surface. `handle` is transport-free; `mount` wires it into an
/// HTTP server.
class ApiService {
 public:
  explicit ApiService(workbench::Workbench& wb) : wb_(wb) {}

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body,
                     const std::map<std::string, std::string>& query = {});

  void mount(httplib::Server& server);

 private:
  ApiResponse route(std::string_view method, const std::vector<std::string>& seg, std::string_view body,
                    const std::map<std::string, std::string>& query);

  workbench::Workbench& wb_;
};

struct ServiceConfig {
  std::filesystem::path store_path = "dslforge-store";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<llm::BackendConfig> backend;
};

/// JSON config: {store_path, host?, port?, backend?: {mode, endpoint, model,
/// transcript, ...}}. Relative paths resolve against the file's directory.
ServiceConfig load_service_config(const std::filesystem::path& file);

/// Mock backends keep their transcript cursor in the store so consecutive
/// processes continue where the previous one stopped.
std::shared_ptr<llm::Backend> backend_for_store(std::optional<llm::BackendConfig> config,
                                                const std::filesystem::path& store_path);

/// Blocks serving requests until the server stops. `on_listen` receives the
/// bound port (useful with port 0).
void serve(const ServiceConfig& config, std::ostream& log, const std::function<void(int)>& on_listen = {});

}  // namespace dslforge::api
