#include "dslforge/workbench/validation.hpp"

#include "dslforge/grammar/parser.hpp"
#include "dslforge/grammar/validator.hpp"
#include "dslforge/instance/parser.hpp"

namespace dslforge::workbench {

namespace {

Validation faulty(std::vector<Diagnostic> diags) {
  Validation v;
  v.status = version::Status::Faulty;
  const Diagnostic* first = first_error(diags);
  v.error_message = first ? render(*first) : "[Other] 1:1: definition rejected";
  v.diagnostics = std::move(diags);
  return v;
}

}  // namespace

Validation validate_grammar_text(const std::string& text) {
  auto ast = grammar::parse_grammar(text);
  if (!ast.ok()) return faulty(ast.diagnostics());
  auto diags = grammar::validate_grammar(*ast);
  if (has_errors(diags)) return faulty(diags);
  auto mm = grammar::derive_metamodel(*ast);
  if (!mm.ok()) return faulty(mm.diagnostics());
  Validation v;
  v.diagnostics = std::move(diags);
  v.metamodel = mm.value();
  return v;
}

Validation validate_example_text(const std::string& text, const std::optional<std::string>& grammar_text) {
  if (!grammar_text) {
    return faulty({make_diagnostic(ErrorCategory::Other, "no grammar governs this example", SourcePos{1, 1})});
  }
  auto ast = grammar::parse_grammar(*grammar_text);
  if (!ast.ok() || has_errors(grammar::validate_grammar(*ast))) {
    return faulty({make_diagnostic(ErrorCategory::Other, "the governing grammar is faulty", SourcePos{1, 1})});
  }
  auto model = instance::parse_instance(text, *ast);
  if (!model.ok()) return faulty(model.diagnostics());
  Validation v;
  v.model = model.value();
  return v;
}

}  // namespace dslforge::workbench
