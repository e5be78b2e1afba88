#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dslforge/diagnostic.hpp"
#include "dslforge/grammar/metamodel.hpp"
#include "dslforge/instance/model.hpp"
#include "dslforge/version/model.hpp"

namespace dslforge::workbench {

struct Validation {
  version::Status status = version::Status::Valid;
  std::optional<std::string> error_message;  // first error, rendered
  std::vector<Diagnostic> diagnostics;       // errors and warnings
  std::optional<grammar::MetaModel> metamodel;
  std::optional<instance::InstanceModel> model;

  bool valid() const { return status == version::Status::Valid; }
};

/// Grammar text: parse, validate, derive the meta-model.
Validation validate_grammar_text(const std::string& text);

/// Example text against the grammar text that governs it.
Validation validate_example_text(const std::string& text, const std::optional<std::string>& grammar);

}  // namespace dslforge::workbench
