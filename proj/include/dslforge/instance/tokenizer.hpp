#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dslforge/diagnostic.hpp"
#include "dslforge/grammar/ast.hpp"

namespace dslforge::instance {

enum class TokenKind { Keyword, Id, Int, String };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::Id;
  std::string text;  // unquoted value for STRING tokens
  char quote = '\0';  // '"' or '\'' for STRING tokens
  SourcePos pos;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Longest-match lexer. Grammar keywords win ties against ID; whitespace and
/// comments are skipped.
Result<std::vector<Token>> tokenize(std::string_view text, const std::vector<std::string>& keywords);
Result<std::vector<Token>> tokenize(std::string_view text, const grammar::GrammarAst& grammar);

}  // namespace dslforge::instance
