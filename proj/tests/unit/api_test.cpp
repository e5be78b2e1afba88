#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"

#include "dslforge/api/cli.hpp"
#include "dslforge/api/mapping.hpp"
#include "dslforge/api/service.hpp"
#include "../support/temp_dir.hpp"

namespace dslforge::api {
namespace {

using llm::MockBackend;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kOrigami = read_file(std::string(DSLFORGE_TEST_DATA) + "/grammars/pilot_origami.gdl");
const std::string kBroken = "grammar Origami\nTutorial: 'Pattern' title=STRING\n";

nlohmann::json dsl_answer(const std::string& g, bool repair = false) {
  nlohmann::json j{{"name", "Origami"}, {"description", "folds"}, {"grammar", g}};
  if (repair) j["adjustment"] = "added ';'";
  return {{"answer", j}};
}

struct Service {
  testing::TempDir dir{"api"};
  version::VersionStore store;
  std::shared_ptr<MockBackend> mock;
  workbench::Workbench wb;
  ApiService api;

  explicit Service(const nlohmann::json& transcript)
      : store(dir.path() / "store"),
        mock(std::make_shared<MockBackend>(MockBackend::parse_transcript(transcript))),
        wb(store, mock),
        api(wb) {}

  std::pair<int, nlohmann::json> call(const std::string& method, const std::string& path,
                                      const nlohmann::json& body = nullptr) {
    ApiResponse r = api.handle(method, path, body.is_null() ? "" : body.dump());
    return {r.status, r.body.empty() || r.content_type != "application/json" ? nlohmann::json() : nlohmann::json::parse(r.body)};
  }
};

TEST(ErrorMapping, EveryCodeHasOneDistinctName) {
  std::set<std::string> names;
  for (int i = 0; i <= static_cast<int>(ErrorCode::BadRequest); ++i) {
    auto code = static_cast<ErrorCode>(i);
    ApiError e = api_error_for(Error(code, "m"));
    EXPECT_TRUE(names.insert(e.code).second) << e.code;
    EXPECT_GE(e.http_status, 400);
    EXPECT_LT(e.http_status, 600);
    EXPECT_EQ(e.http_status, http_status_for(code));
  }
  EXPECT_EQ(api_error_for(Error(ErrorCode::ConstraintC2, "x")).code, "CONSTRAINT_C2");
  EXPECT_EQ(api_error_for(Error(ErrorCode::UnknownVersion, "x")).code, "UNKNOWN_VERSION");
  EXPECT_EQ(api_error_for(Error(ErrorCode::GatewayTimeout, "x")).code, "GATEWAY_TIMEOUT");
}

TEST(Api, ConfigurationsAndValidate) {
  Service s(nlohmann::json::array());
  auto [st, cfgs] = s.call("GET", "/configurations");
  EXPECT_EQ(st, 200);
  EXPECT_EQ(cfgs.size(), 12u);
  std::set<std::string> distinct;
  for (const auto& c : cfgs) distinct.insert(c.dump());
  EXPECT_EQ(distinct.size(), 12u);

  auto [vs, v] = s.call("POST", "/validate", {{"grammar", kOrigami}, {"example", "Pattern 'a' valley 1"}});
  EXPECT_EQ(vs, 200);
  EXPECT_EQ(v["status"], "Valid");
  EXPECT_EQ(v["model"]["class"], "Tutorial");
  auto [bs, b] = s.call("POST", "/validate", {{"grammar", kBroken}});
  EXPECT_EQ(bs, 200);
  EXPECT_EQ(b["status"], "Faulty");
  EXPECT_EQ(b["diagnostics"][0]["category"], "Syntax");
  EXPECT_EQ(s.call("POST", "/validate", {{"nogrammar", 1}}).first, 400);
  EXPECT_EQ(s.api.handle("POST", "/validate", "{not json").status, 400);
}

TEST(Api, VersionLifecycle) {
  Service s(nlohmann::json::array({dsl_answer(kOrigami), dsl_answer(kOrigami), dsl_answer(kBroken),
                                   dsl_answer(kOrigami, true)}));
  auto [ps, p] = s.call("POST", "/projects", {{"name", "Origami"}});
  ASSERT_EQ(ps, 201);
  const std::string pid = p["id"];
  EXPECT_EQ(s.call("GET", "/projects/" + pid).second["name"], "Origami");
  EXPECT_EQ(s.call("GET", "/projects").second.size(), 1u);
  EXPECT_EQ(s.call("POST", "/projects", {{"name", ""}}).first, 400);
  EXPECT_EQ(s.call("GET", "/projects/none").second["code"], "UNKNOWN_PROJECT");

  auto [rs, root] = s.call("POST", "/projects/" + pid + "/versions",
                           {{"kind", "Dsl"}, {"input_format", "Properties"}, {"input", "origami"}});
  ASSERT_EQ(rs, 201) << root;
  EXPECT_EQ(root["status"], "Valid");
  const std::string rid = root["id"];

  nlohmann::json extend{{"kind", "dsl"}, {"input_format", "properties"}, {"input", "more"}, {"base_ids", {rid}},
                        {"with_context", true}};
  auto [es, ext] = s.call("POST", "/projects/" + pid + "/versions", extend);
  ASSERT_EQ(es, 201);
  EXPECT_EQ(ext["with_context"], true);
  auto [cs, c4] = s.call("POST", "/projects/" + pid + "/versions", extend);
  EXPECT_EQ(cs, 409);
  EXPECT_EQ(c4["code"], "CONSTRAINT_C4");
  EXPECT_EQ(c4.size(), 2u);  // code and message only

  EXPECT_EQ(s.call("DELETE", "/versions/" + rid).second["code"], "HAS_SUCCESSORS");
  auto [ds, del] = s.call("DELETE", "/versions/" + std::string(ext["id"]));
  EXPECT_EQ(ds, 204);
  EXPECT_TRUE(del.is_null());
  EXPECT_EQ(s.call("GET", "/versions/" + std::string(ext["id"])).first, 404);

  auto [fs, faulty] = s.call("POST", "/projects/" + pid + "/versions",
                             {{"kind", "Dsl"}, {"input_format", "Properties"}, {"input", "x"}, {"base_ids", {rid}},
                              {"with_context", true}});
  ASSERT_EQ(fs, 201);
  EXPECT_EQ(faulty["status"], "Faulty");
  const std::string fid = faulty["id"];
  EXPECT_EQ(s.call("GET", "/versions/" + fid + "/metamodel").second["code"], "INVALID_DRAFT");
  auto [xs, rep] = s.call("POST", "/versions/" + fid + "/repair", {{"mode", "with"}});
  ASSERT_EQ(xs, 200) << rep;
  EXPECT_EQ(rep["fixed"], true);
  EXPECT_EQ(rep["attempts_used"], 1);
  EXPECT_EQ(s.call("POST", "/versions/" + rid + "/repair").second["code"], "NOT_FAULTY");

  auto [ms, mm] = s.call("GET", "/versions/" + rid + "/metamodel");
  EXPECT_EQ(ms, 200);
  EXPECT_EQ(mm["classes"].size(), 4u);
  ApiResponse text = s.api.handle("GET", "/versions/" + rid + "/metamodel", "", {{"format", "text"}});
  EXPECT_EQ(text.content_type, "text/plain");
  EXPECT_NE(text.body.find("class Tutorial"), std::string::npos);

  EXPECT_EQ(s.call("GET", "/projects/" + pid + "/versions").second.size(), 3u);  // root, faulty, fix
  EXPECT_EQ(s.call("GET", "/versions/" + std::string(rep["chain"][1]) + "/lineage").second.size(), 3u);
  auto nb = s.call("GET", "/versions/" + rid + "/neighbors").second;
  EXPECT_EQ(nb["successors"].size(), 1u);

  EXPECT_EQ(s.call("GET", "/nowhere").first, 404);
  EXPECT_EQ(s.call("PUT", "/configurations").first, 405);
  EXPECT_EQ(s.call("POST", "/projects/" + pid + "/versions", {{"kind", "Dsl"}, {"input_format", "Sideways"}}).first, 400);
  EXPECT_EQ(s.call("POST", "/projects/" + pid + "/versions",
                   {{"kind", "Dsl"}, {"input_format", "ErrorMessage"}, {"input", "e"}})
                .second["code"],
            "INVALID_CONFIGURATION");
}

TEST(Api, GatewayTimeoutMapsAndPersistsNothing) {
  Service s(nlohmann::json::array({{{"fail", "timeout"}}}));
  std::string pid = s.call("POST", "/projects", {{"name", "t"}}).second["id"];
  auto [st, body] = s.call("POST", "/projects/" + pid + "/versions",
                           {{"kind", "Dsl"}, {"input_format", "Properties"}, {"input", "x"}});
  EXPECT_EQ(st, 504);
  EXPECT_EQ(body["code"], "GATEWAY_TIMEOUT");
  EXPECT_TRUE(s.call("GET", "/projects/" + pid + "/versions").second.empty());
}

TEST(Api, OverHttp) {
  Service s(nlohmann::json::array({dsl_answer(kOrigami)}));
  httplib::Server server;
  s.api.mount(server);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/projects", R"({"name":"web"})", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  std::string pid = nlohmann::json::parse(created->body)["id"];
  auto v = client.Post("/projects/" + pid + "/versions",
                       R"({"kind":"Dsl","input_format":"Properties","input":"origami"})", "application/json");
  ASSERT_TRUE(v);
  EXPECT_EQ(v->status, 201);
  std::string vid = nlohmann::json::parse(v->body)["id"];
  auto text = client.Get("/versions/" + vid + "/metamodel?format=text");
  ASSERT_TRUE(text);
  EXPECT_NE(text->body.find("enum FoldKind"), std::string::npos);
  auto gone = client.Delete("/versions/" + vid);
  ASSERT_TRUE(gone);
  EXPECT_EQ(gone->status, 204);
  auto missing = client.Get("/versions/" + vid);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(nlohmann::json::parse(missing->body)["code"], "UNKNOWN_VERSION");
  server.stop();
  t.join();
}

struct Cli {
  std::string out, err;
  int code = 0;
};

Cli cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Cli r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

TEST(Cli, ExitCodes) {
  testing::TempDir d("cli");
  std::string store = (d.path() / "store").string();
  EXPECT_EQ(cli({"--help"}).code, 0);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"--store", store, "create", "--kind", "banana"}).code, 2);
  EXPECT_EQ(cli({"--store", store, "versions", "missing"}).code, 1);
  std::ofstream(d.path() / "g.gdl") << kOrigami;
  std::ofstream(d.path() / "bad.gdl") << kBroken;
  std::ofstream(d.path() / "ex.txt") << "Pattern 'a' valley 1, 'b'";
  Cli ok = cli({"validate", (d.path() / "g.gdl").string(), "--example", (d.path() / "ex.txt").string()});
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(nlohmann::json::parse(ok.out)["status"], "Valid");
  Cli bad = cli({"validate", (d.path() / "bad.gdl").string()});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("[Syntax]"), std::string::npos);
  Cli mm = cli({"metamodel", (d.path() / "g.gdl").string()});
  EXPECT_EQ(mm.code, 0);
  EXPECT_EQ(nlohmann::json::parse(mm.out)["enums"][0]["name"], "FoldKind");
  EXPECT_EQ(nlohmann::json::parse(cli({"configurations"}).out).size(), 12u);
  // prompt without a backend
  std::string pid = nlohmann::json::parse(cli({"--store", store, "new", "p"}).out)["id"];
  Cli nob = cli({"--store", store, "create", "--project", pid, "--kind", "dsl", "--input", "properties", "--text", "x"});
  EXPECT_EQ(nob.code, 1);
  EXPECT_NE(nob.err.find("INVALID_CONFIG"), std::string::npos);
}

// Structure of a project independent of generated ids.
std::vector<std::string> shape(const std::vector<nlohmann::json>& versions) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < versions.size(); ++i) index[versions[i]["id"]] = i;
  std::vector<std::string> out;
  for (const auto& v : versions) {
    std::string line = v["kind"].get<std::string>() + "|" + v["input_format"].get<std::string>() + "|" +
                       v["status"].get<std::string>() + "|" + v["definition"].get<std::string>() + "|" +
                       (v["with_context"].get<bool>() ? "ctx" : "-");
    for (const auto& b : v["base_ids"]) line += "|b" + std::to_string(index.at(b));
    if (!v["derived_from"].is_null()) line += "|d" + std::to_string(index.at(v["derived_from"]));
    out.push_back(line);
  }
  return out;
}

TEST(Cli, SameScenarioAsApi) {
  nlohmann::json transcript = nlohmann::json::array(
      {dsl_answer(kOrigami), dsl_answer(kBroken), dsl_answer(kBroken, true), dsl_answer(kOrigami, true),
       {{"answer", {{"name", "crane"}, {"text", "Pattern 'crane' valley 1"}}}}});
  testing::TempDir d("same");
  std::ofstream(d.path() / "t.json") << transcript.dump();
  std::ofstream(d.path() / "desc.txt") << "origami tutorials";

  // through the CLI, one process per step
  std::string store = (d.path() / "cli-store").string();
  std::vector<std::string> g{"--store", store, "--backend", "mock:" + (d.path() / "t.json").string()};
  auto run = [&](std::vector<std::string> rest) {
    std::vector<std::string> all = g;
    all.insert(all.end(), rest.begin(), rest.end());
    Cli r = cli(all);
    EXPECT_EQ(r.code, 0) << r.err;
    return r.out.empty() ? nlohmann::json() : nlohmann::json::parse(r.out);
  };
  std::string pid = run({"new", "Origami"})["id"];
  std::string root = run({"create", "--project", pid, "--kind", "dsl", "--input", "properties", "--file",
                          (d.path() / "desc.txt").string()})["id"];
  std::string ext = run({"create", "--kind", "dsl", "--input", "properties", "--base", root, "--context", "--text",
                         "add notes"})["id"];
  nlohmann::json rep = run({"repair", ext, "--mode", "with"});
  EXPECT_EQ(rep["attempts_used"], 2);
  std::string fixed = rep["chain"][2];
  run({"create", "--kind", "example", "--input", "definition", "--derived-from", fixed, "--supplemental",
       (d.path() / "desc.txt").string(), "--text", "a crane"});
  std::vector<nlohmann::json> cli_versions;
  for (const auto& v : run({"versions", pid})) cli_versions.push_back(v);

  // the same steps through the service
  Service s(transcript);
  std::string apid = s.call("POST", "/projects", {{"name", "Origami"}}).second["id"];
  std::string aroot = s.call("POST", "/projects/" + apid + "/versions",
                             {{"kind", "dsl"}, {"input_format", "properties"}, {"input", "origami tutorials"}})
                          .second["id"];
  std::string aext = s.call("POST", "/projects/" + apid + "/versions",
                            {{"kind", "dsl"}, {"input_format", "properties"}, {"input", "add notes"},
                             {"base_ids", {aroot}}, {"with_context", true}})
                         .second["id"];
  auto arep = s.call("POST", "/versions/" + aext + "/repair", {{"mode", "with"}}).second;
  s.call("POST", "/projects/" + apid + "/versions",
         {{"kind", "example"}, {"input_format", "definition"}, {"input", "a crane"}, {"derived_from", arep["chain"][2]},
          {"supplemental_definition", "origami tutorials"}});
  std::vector<nlohmann::json> api_versions;
  for (const auto& v : s.call("GET", "/projects/" + apid + "/versions").second) api_versions.push_back(v);

  ASSERT_EQ(cli_versions.size(), 5u);
  EXPECT_EQ(shape(cli_versions), shape(api_versions));
  EXPECT_EQ(cli_versions.back()["status"], "Faulty");  // the supplemental "grammar" is prose
}

}  // namespace
}  // namespace dslforge::api
