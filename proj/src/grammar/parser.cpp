#include "dslforge/grammar/parser.hpp"

#include <cctype>

namespace dslforge::grammar {
namespace {

enum class Tok {
  Ident, Keyword, Colon, Semicolon, Pipe, LParen, RParen, LBracket, RBracket,
  Question, Star, Plus, Equals, PlusEquals, QuestionEquals, End
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::Keyword: return "keyword '" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

struct SyntaxError {
  Diagnostic diagnostic;
};

[[noreturn]] void fail(std::string message, SourcePos pos, std::optional<std::string> offending = std::nullopt) {
  throw SyntaxError{make_diagnostic(ErrorCategory::Syntax, std::move(message), pos, std::move(offending))};
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.pos = pos_;
      if (at_end()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = peek();
      if (ident_start(c)) {
        std::size_t start = i_;
        while (!at_end() && ident_char(peek())) advance();
        t.kind = Tok::Ident;
        t.text = std::string(text_.substr(start, i_ - start));
      } else if (c == '\'') {
        t.kind = Tok::Keyword;
        t.text = keyword_literal();
      } else {
        advance();
        t.text = std::string(1, c);
        switch (c) {
          case ':': t.kind = Tok::Colon; break;
          case ';': t.kind = Tok::Semicolon; break;
          case '|': t.kind = Tok::Pipe; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case '[': t.kind = Tok::LBracket; break;
          case ']': t.kind = Tok::RBracket; break;
          case '*': t.kind = Tok::Star; break;
          case '=': t.kind = Tok::Equals; break;
          case '?':
            if (!at_end() && peek() == '=') {
              advance();
              t.kind = Tok::QuestionEquals;
              t.text = "?=";
            } else {
              t.kind = Tok::Question;
            }
            break;
          case '+':
            if (!at_end() && peek() == '=') {
              advance();
              t.kind = Tok::PlusEquals;
              t.text = "+=";
            } else {
              t.kind = Tok::Plus;
            }
            break;
          case '"':
            fail("invalid symbol '\"': keywords must be single-quoted", t.pos, "\"");
          case '{':
          case '}':
            fail(std::string("invalid symbol '") + c + "': actions are not supported", t.pos, t.text);
          default:
            fail(std::string("invalid symbol '") + c + "'", t.pos, t.text);
        }
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
  }
  void advance() {
    if (text_[i_] == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    ++i_;
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        SourcePos start = pos_;
        advance();
        advance();
        while (!at_end() && !(peek() == '*' && peek(1) == '/')) advance();
        if (at_end()) fail("unterminated comment", start, "/*");
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  std::string keyword_literal() {
    SourcePos start = pos_;
    advance();  // opening quote
    std::string value;
    while (!at_end() && peek() != '\'') {
      if (peek() == '\n') break;
      if (peek() == '\\' && i_ + 1 < text_.size()) {
        advance();
        char e = peek();
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default: value += e; break;
        }
        advance();
        continue;
      }
      value += peek();
      advance();
    }
    if (at_end() || peek() != '\'') fail("unterminated keyword literal", start, "'" + value);
    advance();
    if (value.empty()) fail("empty keyword literal", start, "''");
    return value;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  SourcePos pos_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  GrammarAst grammar() {
    GrammarAst ast;
    if (!(cur().kind == Tok::Ident && cur().text == "grammar")) {
      fail("expected 'grammar' header", cur().pos, offending(cur()));
    }
    next();
    if (cur().kind != Tok::Ident) fail("expected grammar name after 'grammar'", cur().pos, offending(cur()));
    ast.name = next().text;
    if (cur().kind == Tok::End) fail("expected at least one rule after the grammar header", cur().pos);
    while (cur().kind != Tok::End) {
      if (cur().kind != Tok::Ident) {
        fail("expected a rule name but found " + describe(cur()), cur().pos, offending(cur()));
      }
      if (cur().text == "enum" && peek(1).kind == Tok::Ident) {
        ast.enums.push_back(enum_rule());
      } else {
        ast.rules.push_back(rule());
      }
    }
    return ast;
  }

 private:
  const Token& cur() const { return tokens_[i_]; }
  const Token& peek(std::size_t ahead) const {
    return tokens_[std::min(i_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() { return tokens_[i_ < tokens_.size() - 1 ? i_++ : i_]; }

  static std::optional<std::string> offending(const Token& t) {
    if (t.kind == Tok::End) return std::nullopt;
    return t.text;
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (cur().kind != kind) {
      fail("expected " + what + " but found " + describe(cur()), cur().pos, offending(cur()));
    }
    return next();
  }

  Rule rule() {
    Rule r;
    r.pos = cur().pos;
    r.name = next().text;
    if (cur().kind != Tok::Colon) {
      fail("expected ':' after rule name '" + r.name + "' but found " + describe(cur()), cur().pos,
           offending(cur()));
    }
    next();
    r.body = alternatives();
    if (cur().kind != Tok::Semicolon) {
      if (cur().kind == Tok::Ident && peek(1).kind == Tok::Colon) {
        fail("expected ';' to terminate rule '" + r.name + "' before rule '" + cur().text + "'", cur().pos,
             cur().text);
      }
      if (cur().kind == Tok::RParen) {
        fail("unbalanced parentheses: unexpected ')' in rule '" + r.name + "'", cur().pos, ")");
      }
      fail("expected ';' to terminate rule '" + r.name + "' but found " + describe(cur()), cur().pos,
           offending(cur()));
    }
    next();
    return r;
  }

  EnumRule enum_rule() {
    EnumRule e;
    e.pos = cur().pos;
    next();  // 'enum'
    e.name = next().text;
    expect(Tok::Colon, "':' after enum name '" + e.name + "'");
    for (;;) {
      EnumLiteral lit;
      lit.pos = cur().pos;
      lit.name = expect(Tok::Ident, "an enum literal name").text;
      expect(Tok::Equals, "'=' after enum literal '" + lit.name + "'");
      lit.keyword = expect(Tok::Keyword, "a keyword for enum literal '" + lit.name + "'").text;
      e.literals.push_back(std::move(lit));
      if (cur().kind != Tok::Pipe) break;
      next();
    }
    if (cur().kind != Tok::Semicolon) {
      fail("expected ';' to terminate enum '" + e.name + "' but found " + describe(cur()), cur().pos,
           offending(cur()));
    }
    next();
    return e;
  }

  Expr alternatives() {
    SourcePos pos = cur().pos;
    std::vector<Expr> options;
    options.push_back(sequence());
    while (cur().kind == Tok::Pipe) {
      next();
      options.push_back(sequence());
    }
    if (options.size() == 1) return std::move(options.front());
    Expr e;
    e.kind = Expr::Kind::Alternatives;
    e.children = std::move(options);
    e.pos = pos;
    return e;
  }

  bool starts_term() const {
    switch (cur().kind) {
      case Tok::Keyword:
      case Tok::LParen:
      case Tok::LBracket:
        return true;
      case Tok::Ident:
        // "Name :" begins the next rule; the current one lacks its ';'.
        return peek(1).kind != Tok::Colon;
      default:
        return false;
    }
  }

  Expr sequence() {
    SourcePos pos = cur().pos;
    std::vector<Expr> terms;
    while (starts_term()) terms.push_back(term());
    if (terms.empty()) {
      fail("expected a rule element but found " + describe(cur()), cur().pos, offending(cur()));
    }
    if (terms.size() == 1) return std::move(terms.front());
    Expr e;
    e.kind = Expr::Kind::Sequence;
    e.children = std::move(terms);
    e.pos = pos;
    return e;
  }

  Expr term() {
    Expr e = atom();
    switch (cur().kind) {
      case Tok::Question: e.cardinality = Cardinality::Optional; next(); break;
      case Tok::Star: e.cardinality = Cardinality::ZeroOrMore; next(); break;
      case Tok::Plus: e.cardinality = Cardinality::OneOrMore; next(); break;
      default: break;
    }
    return e;
  }

  Expr cross_reference() {
    Expr e;
    e.kind = Expr::Kind::CrossRef;
    e.pos = cur().pos;
    next();  // '['
    e.text = expect(Tok::Ident, "a type name in cross-reference").text;
    if (cur().kind != Tok::RBracket) {
      fail("expected ']' to close cross-reference to '" + e.text + "' but found " + describe(cur()), cur().pos,
           offending(cur()));
    }
    next();
    return e;
  }

  Expr name_call(const Token& t) {
    Expr e;
    e.pos = t.pos;
    if (auto terminal = terminal_from_name(t.text)) {
      e.kind = Expr::Kind::TerminalCall;
      e.terminal = *terminal;
    } else {
      e.kind = Expr::Kind::RuleCall;
    }
    e.text = t.text;
    return e;
  }

  Expr atom() {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Keyword: {
        Expr e;
        e.kind = Expr::Kind::Keyword;
        e.text = t.text;
        e.pos = t.pos;
        next();
        return e;
      }
      case Tok::LParen: {
        SourcePos open = t.pos;
        next();
        Expr inner = alternatives();
        if (cur().kind != Tok::RParen) {
          fail("unbalanced parentheses: expected ')' to close '(' opened at " + std::to_string(open.line) + ":" +
                   std::to_string(open.column) + " but found " + describe(cur()),
               cur().pos, offending(cur()));
        }
        next();
        Expr e;
        e.kind = Expr::Kind::Group;
        e.pos = open;
        e.children.push_back(std::move(inner));
        return e;
      }
      case Tok::LBracket:
        return cross_reference();
      case Tok::Ident: {
        Token name = next();
        AssignOp op;
        switch (cur().kind) {
          case Tok::Equals: op = AssignOp::Single; break;
          case Tok::PlusEquals: op = AssignOp::Multi; break;
          case Tok::QuestionEquals: op = AssignOp::Boolean; break;
          default: return name_call(name);
        }
        next();
        Expr e;
        e.kind = Expr::Kind::Assignment;
        e.text = name.text;
        e.op = op;
        e.pos = name.pos;
        e.children.push_back(assignment_target(name.text));
        return e;
      }
      default:
        fail("expected a rule element but found " + describe(t), t.pos, offending(t));
    }
  }

  Expr assignment_target(const std::string& feature) {
    const Token& t = cur();
    switch (t.kind) {
      case Tok::Keyword: {
        Expr e;
        e.kind = Expr::Kind::Keyword;
        e.text = t.text;
        e.pos = t.pos;
        next();
        return e;
      }
      case Tok::Ident:
        return name_call(next());
      case Tok::LBracket:
        return cross_reference();
      default:
        fail("expected an assignment target for feature '" + feature + "' but found " + describe(t), t.pos,
             offending(t));
    }
  }

  std::vector<Token> tokens_;
  std::size_t i_ = 0;
};

std::string quote_keyword(const std::string& keyword) {
  std::string out = "'";
  for (char c : keyword) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c; break;
    }
  }
  out += '\'';
  return out;
}

void print_into(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::Sequence:
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += ' ';
        print_into(e.children[i], out);
      }
      break;
    case Expr::Kind::Alternatives:
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i) out += " | ";
        print_into(e.children[i], out);
      }
      break;
    case Expr::Kind::Group:
      out += '(';
      print_into(e.children.front(), out);
      out += ')';
      break;
    case Expr::Kind::Keyword:
      out += quote_keyword(e.text);
      break;
    case Expr::Kind::TerminalCall:
    case Expr::Kind::RuleCall:
      out += e.text;
      break;
    case Expr::Kind::CrossRef:
      out += '[' + e.text + ']';
      break;
    case Expr::Kind::Assignment:
      out += e.text;
      out += to_string(e.op);
      print_into(e.children.front(), out);
      break;
  }
  out += to_string(e.cardinality);
}

}  // namespace

Result<GrammarAst> parse_grammar(std::string_view text) {
  try {
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.grammar();
  } catch (const SyntaxError& error) {
    return std::vector<Diagnostic>{error.diagnostic};
  }
}

std::string print_expr(const Expr& expr) {
  std::string out;
  print_into(expr, out);
  return out;
}

std::string print_grammar(const GrammarAst& ast) {
  std::string out = "grammar " + ast.name + "\n";
  for (const auto& rule : ast.rules) {
    out += "\n" + rule.name + ":\n    " + print_expr(rule.body) + ";\n";
  }
  for (const auto& e : ast.enums) {
    out += "\nenum " + e.name + ":\n    ";
    for (std::size_t i = 0; i < e.literals.size(); ++i) {
      if (i) out += " | ";
      out += e.literals[i].name + "=" + quote_keyword(e.literals[i].keyword);
    }
    out += ";\n";
  }
  return out;
}

}  // namespace dslforge::grammar
