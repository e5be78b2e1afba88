#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dslforge/diagnostic.hpp"
#include "dslforge/grammar/ast.hpp"

namespace dslforge::grammar {

struct GrammarSource {
  std::string text;
  std::optional<std::string> name_hint;
};

/// Parses the grammar definition language. Stops at the first syntax error.
Result<GrammarAst> parse_grammar(std::string_view text);
inline Result<GrammarAst> parse_grammar(const GrammarSource& source) {
  return parse_grammar(std::string_view(source.text));
}

/// Canonical text for `ast`; parse_grammar(print_grammar(a)) reproduces `a`.
std::string print_grammar(const GrammarAst& ast);
std::string print_expr(const Expr& expr);

}  // namespace dslforge::grammar
