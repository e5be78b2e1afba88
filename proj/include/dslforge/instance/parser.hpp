#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dslforge/diagnostic.hpp"
#include "dslforge/grammar/ast.hpp"
#include "dslforge/grammar/metamodel.hpp"
#include "dslforge/instance/model.hpp"
#include "dslforge/instance/tokenizer.hpp"

namespace dslforge::instance {

namespace detail {
struct CompiledGrammar;
}

/// Conformance checker for example texts. Compiles a validated grammar once
/// and parses any number of texts against it with an Earley recognizer.
class InstanceParser {
 public:
  /// Fails with the grammar's error diagnostics when it is not valid.
  static Result<InstanceParser> create(const grammar::GrammarAst& grammar);

  InstanceParser(InstanceParser&&) noexcept;
  InstanceParser& operator=(InstanceParser&&) noexcept;
  ~InstanceParser();

  Result<InstanceModel> parse(std::string_view text) const;

  /// Recognition only: true when the token sequence is a sentence.
  bool recognizes(const std::vector<Token>& tokens) const;

  const grammar::MetaModel& metamodel() const;
  const std::vector<std::string>& keywords() const;

 private:
  explicit InstanceParser(std::unique_ptr<detail::CompiledGrammar> compiled);
  std::unique_ptr<detail::CompiledGrammar> compiled_;
};

/// Convenience wrapper: compile `grammar` and parse `text`.
Result<InstanceModel> parse_instance(std::string_view text, const grammar::GrammarAst& grammar);

}  // namespace dslforge::instance
