#include "dslforge/api/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "dslforge/api/mapping.hpp"
#include "dslforge/api/service.hpp"
#include "dslforge/experiment/harness.hpp"

namespace dslforge::api {

namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::BadRequest, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Globals {
  std::string store;
  std::string backend;
  std::string config;
  std::string model;
  std::optional<double> temperature;
  int timeout = 0;
};

struct Session {
  ServiceConfig config;
  std::unique_ptr<version::VersionStore> store;
  std::unique_ptr<workbench::Workbench> wb;
};

ServiceConfig resolve_config(const Globals& g) {
  ServiceConfig c;
  if (!g.config.empty()) c = load_service_config(g.config);
  if (!g.store.empty()) {
    c.store_path = g.store;
  } else if (g.config.empty()) {
    if (const char* env = std::getenv("DSL_FORGE_STORE")) c.store_path = env;
  }
  if (!g.backend.empty()) c.backend = llm::BackendConfig::from_spec(g.backend);
  if (c.backend) {
    if (!g.model.empty()) c.backend->model = g.model;
    if (g.temperature) c.backend->temperature = g.temperature;
    if (g.timeout > 0) c.backend->timeout_seconds = g.timeout;
  }
  return c;
}

Session open_session(const Globals& g) {
  Session s;
  s.config = resolve_config(g);
  s.store = std::make_unique<version::VersionStore>(s.config.store_path);
  s.wb = std::make_unique<workbench::Workbench>(*s.store, backend_for_store(s.config.backend, s.config.store_path));
  return s;
}

void print(std::ostream& out, const nlohmann::ordered_json& j) { out << j.dump(2) << "\n"; }

nlohmann::ordered_json versions_json(const std::vector<version::Version>& vs) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& v : vs) out.push_back(version::to_json(v));
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dslforge: versioned, prompt-driven DSL development", "dslforge"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--store", g.store, "Store directory (default $DSL_FORGE_STORE or ./dslforge-store)");
  app.add_option("--backend", g.backend, "Model backend: mock:<transcript.json> or http(s)://<endpoint>");
  app.add_option("--config", g.config, "JSON config with store_path, port, backend");
  app.add_option("--model", g.model, "Model name for http backends");
  app.add_option("--temperature", g.temperature, "Sampling temperature passed to the endpoint");
  app.add_option("--timeout", g.timeout, "Request timeout in seconds")->check(CLI::PositiveNumber);

  std::function<int()> action;

  // projects
  std::string name;
  auto* c_new = app.add_subcommand("new", "Create a project");
  c_new->add_option("name", name)->required();
  c_new->callback([&] {
    action = [&] {
      Session s = open_session(g);
      print(out, version::to_json(s.store->create_project(name)));
      return 0;
    };
  });

  auto* c_projects = app.add_subcommand("projects", "List projects");
  c_projects->callback([&] {
    action = [&] {
      Session s = open_session(g);
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& p : s.store->list_projects()) arr.push_back(version::to_json(p));
      print(out, arr);
      return 0;
    };
  });

  std::string project;
  auto* c_versions = app.add_subcommand("versions", "List a project's versions");
  c_versions->add_option("project", project)->required();
  c_versions->callback([&] {
    action = [&] {
      Session s = open_session(g);
      print(out, versions_json(s.store->versions(project)));
      return 0;
    };
  });

  // single versions
  std::string version_id;
  auto* c_show = app.add_subcommand("show", "Show a version");
  c_show->add_option("version", version_id)->required();
  c_show->callback([&] {
    action = [&] {
      Session s = open_session(g);
      print(out, version::to_json(s.store->get_version(version_id)));
      return 0;
    };
  });

  auto* c_lineage = app.add_subcommand("lineage", "Ancestors of a version along base links");
  c_lineage->add_option("version", version_id)->required();
  c_lineage->callback([&] {
    action = [&] {
      Session s = open_session(g);
      print(out, versions_json(s.store->lineage(version_id)));
      return 0;
    };
  });

  auto* c_delete = app.add_subcommand("delete", "Delete a leaf version");
  c_delete->add_option("version", version_id)->required();
  c_delete->callback([&] {
    action = [&] {
      Session s = open_session(g);
      s.store->delete_version(version_id);
      print(out, {{"deleted", version_id}});
      return 0;
    };
  });

  // create
  struct {
    std::string project, kind, input, file, text, base_mode, grammar, supplemental, derived_from, name, description;
    std::vector<std::string> bases;
    bool context = false, manual = false;
  } cr;
  auto* c_create = app.add_subcommand("create", "Create a version through a prompt, or commit a manual edit");
  c_create->add_option("--project", cr.project, "Project id (inferred from a base when omitted)");
  c_create->add_option("--kind", cr.kind, "dsl | example")->required()->check(CLI::IsMember({"dsl", "example"}, CLI::ignore_case));
  c_create->add_option("--input", cr.input, "properties | definition | error")
      ->check(CLI::IsMember({"properties", "definition", "error"}, CLI::ignore_case));
  c_create->add_option("--base", cr.bases, "Base version id (repeatable)");
  c_create->add_flag("--context", cr.context, "Continue the base's conversation");
  c_create->add_option("--base-mode", cr.base_mode, "Override: none | with-context | without-context");
  auto* file_opt = c_create->add_option("--file", cr.file, "Payload or definition file");
  c_create->add_option("--text", cr.text, "Payload or definition text")->excludes(file_opt);
  c_create->add_flag("--manual", cr.manual, "Store the file as a hand-written definition (no model call)");
  c_create->add_option("--grammar", cr.grammar, "Grammar file governing a manual example");
  c_create->add_option("--supplemental", cr.supplemental, "Grammar file sent as supplemental context");
  c_create->add_option("--derived-from", cr.derived_from, "Version this one is derived from (other kind)");
  c_create->add_option("--name", cr.name);
  c_create->add_option("--description", cr.description);
  c_create->callback([&] {
    action = [&] {
      Session s = open_session(g);
      std::string pid = cr.project;
      if (pid.empty()) {
        std::string anchor = !cr.bases.empty() ? cr.bases.front() : cr.derived_from;
        if (anchor.empty()) throw CLI::ValidationError("--project", "needed when there is no base or derived-from");
        pid = s.store->get_version(anchor).project_id;
      }
      std::string content = !cr.file.empty() ? read_text(cr.file) : cr.text;
      nlohmann::json body{{"kind", cr.kind}, {"base_ids", cr.bases}, {"with_context", cr.context}};
      if (!cr.derived_from.empty()) body["derived_from"] = cr.derived_from;
      if (!cr.name.empty()) body["name"] = cr.name;
      if (!cr.description.empty()) body["description"] = cr.description;
      if (cr.manual) {
        body["definition"] = content;
        if (!cr.grammar.empty()) body["grammar"] = read_text(cr.grammar);
      } else {
        if (cr.input.empty()) throw CLI::ValidationError("--input", "required unless --manual");
        body["input_format"] = cr.input;
        body["input"] = content;
        if (!cr.base_mode.empty()) body["base_mode"] = cr.base_mode;
        if (!cr.supplemental.empty()) body["supplemental_definition"] = read_text(cr.supplemental);
      }
      print(out, version::to_json(create_version(*s.wb, pid, body)));
      return 0;
    };
  });

  // repair
  std::string repair_mode = "combined";
  int attempts = workbench::kDefaultRepairAttempts;
  auto* c_repair = app.add_subcommand("repair", "Repair a faulty grammar version");
  c_repair->add_option("version", version_id)->required();
  c_repair->add_option("--mode", repair_mode)->check(CLI::IsMember({"with", "without", "combined"}));
  c_repair->add_option("--attempts", attempts)->check(CLI::NonNegativeNumber);
  c_repair->callback([&] {
    action = [&] {
      Session s = open_session(g);
      print(out, run_repair(*s.wb, version_id, repair_mode, attempts));
      return 0;
    };
  });

  // validation and meta-models (no store needed)
  std::string grammar_file, example_file;
  auto* c_validate = app.add_subcommand("validate", "Validate a grammar, optionally an example against it");
  c_validate->add_option("grammar", grammar_file)->required()->check(CLI::ExistingFile);
  c_validate->add_option("--example", example_file)->check(CLI::ExistingFile);
  c_validate->callback([&] {
    action = [&] {
      nlohmann::json body{{"grammar", read_text(grammar_file)}};
      if (!example_file.empty()) body["example"] = read_text(example_file);
      workbench::Validation v = validate_body(body);
      print(out, to_json(v));
      if (!v.valid()) err << *v.error_message << "\n";
      return v.valid() ? 0 : 1;
    };
  });

  std::string target;
  bool as_text = false;
  auto* c_mm = app.add_subcommand("metamodel", "Meta-model of a grammar version or file");
  c_mm->add_option("target", target, "Version id or grammar file")->required();
  c_mm->add_flag("--text", as_text, "Human-readable rendering");
  c_mm->callback([&] {
    action = [&] {
      grammar::MetaModel mm;
      if (fs::is_regular_file(target)) {
        workbench::Validation v = workbench::validate_grammar_text(read_text(target));
        if (!v.valid()) throw Error(ErrorCode::InvalidDraft, "grammar is faulty: " + *v.error_message);
        mm = *v.metamodel;
      } else {
        Session s = open_session(g);
        mm = s.wb->metamodel_of(target);
      }
      if (as_text) {
        out << mm.to_text();
      } else {
        print(out, mm.to_json());
      }
      return 0;
    };
  });

  auto* c_configs = app.add_subcommand("configurations", "List the valid prompt configurations");
  c_configs->callback([&] {
    action = [&] {
      print(out, configurations_json());
      return 0;
    };
  });

  // experiments
  auto* c_exp = app.add_subcommand("experiment", "Batch experiments");
  c_exp->require_subcommand(1);

  struct {
    std::string domains, out_dir, project_name = "generation";
    int samples = 12, repair_attempts = 0;
  } gen;
  auto* e_gen = c_exp->add_subcommand("generate", "One-shot grammar generation over domain descriptions");
  e_gen->add_option("--domains", gen.domains, "Directory with manifest.json")->required()->check(CLI::ExistingDirectory);
  e_gen->add_option("--samples", gen.samples)->check(CLI::PositiveNumber);
  e_gen->add_option("--out", gen.out_dir, "Report directory")->required();
  e_gen->add_option("--project-name", gen.project_name);
  e_gen->add_option("--repair-attempts", gen.repair_attempts, "Then repair every faulty sample (0: skip)")
      ->check(CLI::NonNegativeNumber);
  e_gen->callback([&] {
    action = [&] {
      Session s = open_session(g);
      auto domains = experiment::load_domains(gen.domains);
      std::string pid = s.store->create_project(gen.project_name).id;
      experiment::ExperimentReport report = experiment::run_generation(*s.wb, pid, domains, gen.samples);
      if (gen.repair_attempts > 0) {
        std::vector<std::string> faulty;
        for (const auto& d : report.domains) {
          for (const auto& id : d.version_ids) {
            if (s.store->get_version(id).is_faulty()) faulty.push_back(id);
          }
        }
        report.repair = experiment::run_repair_experiment(*s.wb, faulty, gen.repair_attempts);
        experiment::tally_faults(*s.store, report);
      }
      experiment::emit_report(report, gen.out_dir);
      nlohmann::ordered_json j = report.to_json();
      j["project"] = pid;
      print(out, j);
      return 0;
    };
  });

  struct {
    std::vector<std::string> versions;
    std::string project, out_dir;
    int attempts = 5;
  } rep;
  auto* e_rep = c_exp->add_subcommand("repair", "Repair rates in both modes");
  auto* rv = e_rep->add_option("--version", rep.versions, "Faulty grammar version (repeatable)");
  e_rep->add_option("--project", rep.project, "Use every faulty non-repair grammar of a project")->excludes(rv);
  e_rep->add_option("--attempts", rep.attempts)->check(CLI::NonNegativeNumber);
  e_rep->add_option("--out", rep.out_dir, "Report directory");
  e_rep->callback([&] {
    action = [&] {
      Session s = open_session(g);
      std::vector<std::string> ids = rep.versions;
      if (!rep.project.empty()) {
        for (const auto& v : s.store->versions(rep.project)) {
          if (v.kind == version::Kind::Dsl && v.is_faulty() && !version::is_repair(v)) ids.push_back(v.id);
        }
      }
      experiment::ExperimentReport report;
      report.repair = experiment::run_repair_experiment(*s.wb, ids, rep.attempts);
      experiment::tally_faults(*s.store, report);
      if (!rep.out_dir.empty()) experiment::emit_report(report, rep.out_dir);
      print(out, report.to_json());
      return 0;
    };
  });

  struct {
    std::string grammar, general, non_technical, technical, truth;
  } inst;
  auto* e_inst = c_exp->add_subcommand("instantiate", "Examples from three description kinds");
  e_inst->add_option("--grammar", inst.grammar, "Valid grammar version")->required();
  e_inst->add_option("--general", inst.general)->check(CLI::ExistingFile);
  e_inst->add_option("--non-technical", inst.non_technical)->check(CLI::ExistingFile);
  e_inst->add_option("--technical", inst.technical)->check(CLI::ExistingFile);
  e_inst->add_option("--truth", inst.truth, "Ground-truth example")->required()->check(CLI::ExistingFile);
  e_inst->callback([&] {
    action = [&] {
      std::map<experiment::DescriptionKind, std::string> ds;
      if (!inst.general.empty()) ds[experiment::DescriptionKind::General] = read_text(inst.general);
      if (!inst.non_technical.empty()) ds[experiment::DescriptionKind::NonTechnical] = read_text(inst.non_technical);
      if (!inst.technical.empty()) ds[experiment::DescriptionKind::Technical] = read_text(inst.technical);
      if (ds.empty()) throw CLI::ValidationError("instantiate", "give at least one description");
      Session s = open_session(g);
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : experiment::run_instantiation(*s.wb, inst.grammar, ds, read_text(inst.truth))) {
        arr.push_back(experiment::to_json(r));
      }
      print(out, arr);
      return 0;
    };
  });

  struct {
    std::vector<std::string> examples;
    std::string truth;
    int attempts = 4;
  } gl;
  auto* e_gl = c_exp->add_subcommand("generalize", "Grammar from example versions");
  e_gl->add_option("--example", gl.examples, "Example version (repeatable)")->required();
  e_gl->add_option("--attempts", gl.attempts)->check(CLI::NonNegativeNumber);
  e_gl->add_option("--truth", gl.truth, "Ground-truth grammar file for the meta-model diff")->check(CLI::ExistingFile);
  e_gl->callback([&] {
    action = [&] {
      Session s = open_session(g);
      std::optional<std::string> truth;
      if (!gl.truth.empty()) truth = read_text(gl.truth);
      print(out, experiment::to_json(experiment::run_generalization(*s.wb, gl.examples, gl.attempts, truth)));
      return 0;
    };
  });

  // server
  std::optional<int> port;
  std::string host;
  auto* c_serve = app.add_subcommand("serve", "Run the REST API");
  c_serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  c_serve->add_option("--host", host);
  c_serve->callback([&] {
    action = [&] {
      ServiceConfig c = resolve_config(g);
      if (port) c.port = *port;
      if (!host.empty()) c.host = host;
      serve(c, err);
      return 0;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    app.exit(e, out, err);
    return 2;
  }
  try {
    return action ? action() : 2;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    ApiError a = api_error_for(e);
    err << "error: " << a.code << ": " << a.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dslforge::api
