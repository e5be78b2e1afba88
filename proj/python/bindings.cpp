#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dslforge/api/cli.hpp"
#include "dslforge/api/mapping.hpp"
#include "dslforge/api/service.hpp"
#include "dslforge/experiment/harness.hpp"

namespace py = pybind11;
using namespace dslforge;

namespace {

// JSON crosses the boundary as text; the Python package decodes it.
class Session {
 public:
  Session(const std::string& store_path, const std::optional<std::string>& backend)
      : store_(store_path),
        wb_(store_,
            api::backend_for_store(backend ? std::optional(llm::BackendConfig::from_spec(*backend)) : std::nullopt,
                                   store_path)) {}

  std::string create_project(const std::string& name) { return version::to_json(store_.create_project(name)).dump(); }

  std::string projects() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& p : store_.list_projects()) out.push_back(version::to_json(p));
    return out.dump();
  }

  std::string versions(const std::string& project_id) const {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& v : store_.versions(project_id)) out.push_back(version::to_json(v));
    return out.dump();
  }

  std::string get_version(const std::string& id) const { return version::to_json(store_.get_version(id)).dump(); }

  std::string create_version(const std::string& project_id, const std::string& body) {
    return version::to_json(api::create_version(wb_, project_id, nlohmann::json::parse(body))).dump();
  }

  void delete_version(const std::string& id) { store_.delete_version(id); }

  std::string repair(const std::string& id, const std::string& mode, int attempts) {
    return api::run_repair(wb_, id, mode, attempts).dump();
  }

  std::string metamodel(const std::string& id) const { return wb_.metamodel_of(id).to_json().dump(); }

  std::string lineage(const std::string& id) const {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& v : store_.lineage(id)) out.push_back(version::to_json(v));
    return out.dump();
  }

 private:
  version::VersionStore store_;
  workbench::Workbench wb_;
};

std::string validate(const std::string& grammar, const std::optional<std::string>& example) {
  nlohmann::json body{{"grammar", grammar}};
  if (example) body["example"] = *example;
  return api::to_json(api::validate_body(body)).dump();
}

py::tuple cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = api::run_cli(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of dslforge";

  static py::exception<Error> error_type(m, "DslForgeError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      std::string code(to_string(e.code()));
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(py::str(code + ": " + e.what()));
      exc.attr("code") = code;
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("validate", &validate, py::arg("grammar"), py::arg("example") = py::none(),
        "Validate a grammar, or an example against it; returns JSON text.");
  m.def("configurations", [] { return api::configurations_json().dump(); });
  m.def("rate_text", [](std::int64_t num, std::int64_t den) { return experiment::Ratio{num, den}.text(); });
  m.def("token_diff", [](const std::string& expected, const std::string& actual) {
    return experiment::summarize(experiment::token_diff(expected, actual));
  });
  m.def("cli", &cli, py::arg("args"), "Run the command line; returns (exit_code, stdout, stderr).");

  py::class_<Session>(m, "Session")
      .def(py::init<const std::string&, const std::optional<std::string>&>(), py::arg("store_path"),
           py::arg("backend") = py::none())
      .def("create_project", &Session::create_project)
      .def("projects", &Session::projects)
      .def("versions", &Session::versions)
      .def("get_version", &Session::get_version)
      .def("create_version", &Session::create_version, py::call_guard<py::gil_scoped_release>())
      .def("delete_version", &Session::delete_version)
      .def("repair", &Session::repair, py::call_guard<py::gil_scoped_release>())
      .def("metamodel", &Session::metamodel)
      .def("lineage", &Session::lineage);
}
