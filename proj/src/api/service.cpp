#include "dslforge/api/service.hpp"

#include <fstream>
#include <sstream>

#include "httplib.h"

#include "dslforge/api/mapping.hpp"

namespace dslforge::api {

namespace {

std::vector<std::string> segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) out.emplace_back(path.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

ApiResponse json_response(int status, const nlohmann::ordered_json& j) { return {status, j.dump(2), "application/json"}; }

ApiResponse error_response(const ApiError& e) { return json_response(e.http_status, e.to_json()); }

nlohmann::json parse_body(std::string_view body) {
  if (body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::BadRequest, "request body is not valid JSON");
  }
}

nlohmann::ordered_json versions_json(const std::vector<version::Version>& vs) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& v : vs) out.push_back(version::to_json(v));
  return out;
}

}  // namespace

ApiResponse ApiService::handle(std::string_view method, std::string_view path, std::string_view body,
                               const std::map<std::string, std::string>& query) {
  try {
    return route(method, segments(path), body, query);
  } catch (const Error& e) {
    return error_response(api_error_for(e));
  } catch (const std::exception&) {
    return error_response({"INTERNAL", "internal error", 500});
  }
}

ApiResponse ApiService::route(std::string_view method, const std::vector<std::string>& s, std::string_view body,
                              const std::map<std::string, std::string>& query) {
  const std::size_t n = s.size();
  auto is = [&](std::string_view m) { return method == m; };
  auto method_not_allowed = [] { return error_response({"METHOD_NOT_ALLOWED", "method not allowed", 405}); };

  if (n == 1 && s[0] == "configurations") {
    if (!is("GET")) return method_not_allowed();
    return json_response(200, configurations_json());
  }
  if (n == 1 && s[0] == "validate") {
    if (!is("POST")) return method_not_allowed();
    return json_response(200, to_json(validate_body(parse_body(body))));
  }
  if (n >= 1 && s[0] == "projects") {
    if (n == 1) {
      if (is("GET")) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const auto& p : wb_.store().list_projects()) out.push_back(version::to_json(p));
        return json_response(200, out);
      }
      if (is("POST")) {
        nlohmann::json b = parse_body(body);
        if (!b.is_object() || !b.contains("name") || !b["name"].is_string()) {
          throw Error(ErrorCode::BadRequest, "expected {\"name\": string}");
        }
        return json_response(201, version::to_json(wb_.store().create_project(b["name"].get<std::string>())));
      }
      return method_not_allowed();
    }
    if (n == 2) {
      if (!is("GET")) return method_not_allowed();
      return json_response(200, version::to_json(wb_.store().get_project(s[1])));
    }
    if (n == 3 && s[2] == "versions") {
      if (is("GET")) return json_response(200, versions_json(wb_.store().versions(s[1])));
      if (is("POST")) return json_response(201, version::to_json(create_version(wb_, s[1], parse_body(body))));
      return method_not_allowed();
    }
  }
  if (n >= 2 && s[0] == "versions") {
    const std::string& id = s[1];
    if (n == 2) {
      if (is("GET")) return json_response(200, version::to_json(wb_.store().get_version(id)));
      if (is("DELETE")) {
        wb_.store().delete_version(id);
        return {204, "", "application/json"};
      }
      return method_not_allowed();
    }
    if (n == 3 && s[2] == "repair") {
      if (!is("POST")) return method_not_allowed();
      nlohmann::json b = parse_body(body);
      std::string mode = b.value("mode", "combined");
      int attempts = b.value("attempts", workbench::kDefaultRepairAttempts);
      return json_response(200, run_repair(wb_, id, mode, attempts));
    }
    if (n == 3 && s[2] == "metamodel") {
      if (!is("GET")) return method_not_allowed();
      grammar::MetaModel mm = wb_.metamodel_of(id);
      auto f = query.find("format");
      if (f != query.end() && f->second == "text") return {200, mm.to_text(), "text/plain"};
      return json_response(200, mm.to_json());
    }
    if (n == 3 && s[2] == "lineage") {
      if (!is("GET")) return method_not_allowed();
      return json_response(200, versions_json(wb_.store().lineage(id)));
    }
    if (n == 3 && s[2] == "neighbors") {
      if (!is("GET")) return method_not_allowed();
      version::Neighbors nb = wb_.store().neighbors(id);
      nlohmann::ordered_json j{{"bases", nb.bases}, {"successors", nb.successors}};
      j["derived_from"] = nb.derived_from ? nlohmann::ordered_json(*nb.derived_from) : nlohmann::ordered_json(nullptr);
      j["derived"] = nb.derived;
      return json_response(200, j);
    }
  }
  return error_response({"NOT_FOUND", "no such endpoint", 404});
}

void ApiService::mount(httplib::Server& server) {
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query(req.params.begin(), req.params.end());
    ApiResponse r = handle(req.method, req.path, req.body, query);
    res.status = r.status;
    if (r.status != 204) res.set_content(r.body, r.content_type);
  };
  const std::string any = R"(/.*)";
  server.Get(any, handler);
  server.Post(any, handler);
  server.Delete(any, handler);
  server.Put(any, handler);
  server.Patch(any, handler);
}

ServiceConfig load_service_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read config '" + file.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  auto dir = std::filesystem::absolute(file).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : dir / path;
  };
  ServiceConfig c;
  if (j.contains("store_path")) c.store_path = resolve(j["store_path"].get<std::string>());
  c.host = j.value("host", c.host);
  c.port = j.value("port", c.port);
  if (j.contains("backend") && !j["backend"].is_null()) {
    c.backend = llm::BackendConfig::from_json(j["backend"]);
    if (c.backend->mode == llm::BackendConfig::Mode::Mock) c.backend->transcript = resolve(c.backend->transcript).string();
  }
  return c;
}

std::shared_ptr<llm::Backend> backend_for_store(std::optional<llm::BackendConfig> config,
                                                const std::filesystem::path& store_path) {
  if (!config) return nullptr;
  if (config->mode == llm::BackendConfig::Mode::Mock && !config->mock_state) {
    std::filesystem::create_directories(store_path);
    config->mock_state = (store_path / "mock-state.json").string();
  }
  return llm::make_backend(*config);
}

void serve(const ServiceConfig& config, std::ostream& log, const std::function<void(int)>& on_listen) {
  version::VersionStore store(config.store_path);
  workbench::Workbench wb(store, backend_for_store(config.backend, config.store_path));
  ApiService api(wb);
  httplib::Server server;
  api.mount(server);
  int port = config.port;
  if (port == 0) {
    port = server.bind_to_any_port(config.host);
  } else if (!server.bind_to_port(config.host, port)) {
    throw Error(ErrorCode::InvalidConfig, "cannot bind " + config.host + ":" + std::to_string(port));
  }
  if (port < 0) throw Error(ErrorCode::InvalidConfig, "cannot bind " + config.host);
  log << "listening on http://" << config.host << ":" << port << std::endl;
  if (on_listen) on_listen(port);
  server.listen_after_bind();
}

}  // namespace dslforge::api
