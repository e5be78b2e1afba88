#pragma once

#include <string_view>
#include <vector>

#include "dslforge/diagnostic.hpp"
#include "dslforge/grammar/ast.hpp"

namespace dslforge::grammar {

/// Static checks over a parsed grammar, in a fixed order: duplicate names,
/// unresolved references, missing entry rule, left recursion, type misuse,
/// unused rules (warning only). An empty result means the grammar is valid.
std::vector<Diagnostic> validate_grammar(const GrammarAst& ast);

/// Rules whose body may derive the empty string.
std::vector<bool> nullable_rules(const GrammarAst& ast);

enum class Phase { Parse, Validate, InstanceRun };

/// Maps a failure message to its category. Messages rendered by `render()`
/// carry their category as a "[Name]" prefix, which wins over keyword matching.
ErrorCategory classify_error(std::string_view message, Phase phase);

}  // namespace dslforge::grammar
