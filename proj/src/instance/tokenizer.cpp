#include "dslforge/instance/tokenizer.hpp"

#include <cctype>

namespace dslforge::instance {
namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Id: return "ID";
    case TokenKind::Int: return "INT";
    case TokenKind::String: return "STRING";
  }
  return "ID";
}

Result<std::vector<Token>> tokenize(std::string_view text, const std::vector<std::string>& keywords) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto error = [&](std::string message, std::size_t at, std::string offending) {
    return std::vector<Diagnostic>{
        make_diagnostic(ErrorCategory::Syntax, std::move(message), position_of(text, at), std::move(offending))};
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      auto close = text.find("*/", i + 2);
      if (close == std::string_view::npos) return error("unterminated comment", i, "/*");
      i = close + 2;
      continue;
    }

    std::size_t keyword_len = 0;
    for (const auto& k : keywords) {
      if (k.size() > keyword_len && text.substr(i, k.size()) == k) keyword_len = k.size();
    }

    Token token;
    token.pos = position_of(text, i);
    std::size_t other_len = 0;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      other_len = j - i;
      token.kind = TokenKind::Id;
    } else if (digit(c)) {
      std::size_t j = i;
      while (j < text.size() && digit(text[j])) ++j;
      other_len = j - i;
      token.kind = TokenKind::Int;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      std::string value;
      bool closed = false;
      while (j < text.size()) {
        char d = text[j];
        if (d == '\\' && j + 1 < text.size()) {
          char e = text[j + 1];
          value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
          j += 2;
          continue;
        }
        if (d == c) {
          closed = true;
          ++j;
          break;
        }
        value += d;
        ++j;
      }
      if (!closed && keyword_len == 0) {
        return error("unterminated string", i, std::string(text.substr(i, std::min<std::size_t>(j - i, 20))));
      }
      if (closed) {
        other_len = j - i;
        token.kind = TokenKind::String;
        token.quote = c;
        token.text = std::move(value);
      }
    }

    if (keyword_len > 0 && keyword_len >= other_len) {
      token.kind = TokenKind::Keyword;
      token.text = std::string(text.substr(i, keyword_len));
      token.quote = '\0';
      i += keyword_len;
    } else if (other_len > 0) {
      if (token.kind != TokenKind::String) token.text = std::string(text.substr(i, other_len));
      i += other_len;
    } else {
      return error(std::string("illegal character '") + c + "'", i, std::string(1, c));
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

Result<std::vector<Token>> tokenize(std::string_view text, const grammar::GrammarAst& grammar) {
  return tokenize(text, grammar::collect_keywords(grammar));
}

}  // namespace dslforge::instance
