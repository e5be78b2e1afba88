#include <gtest/gtest.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "dslforge/grammar/parser.hpp"
#include "dslforge/grammar/validator.hpp"
#include "dslforge/instance/parser.hpp"
#include "../support/language_oracle.hpp"
#include "../support/random_grammar.hpp"

namespace dslforge::instance {
namespace {

const char* kInventory =
    "grammar Inventory\n"
    "Item: 'name' ':' name=STRING 'category' ':' category=Category;\n"
    "enum Category: IT='IT' | Furniture='Furniture' | Other='Other';\n";

grammar::GrammarAst grammar_of(const std::string& text) {
  auto ast = grammar::parse_grammar(text);
  EXPECT_TRUE(ast.ok()) << (ast.ok() ? "" : render(ast.diagnostics()[0]));
  return ast.ok() ? ast.value() : grammar::GrammarAst{};
}

std::string read_data(const std::string& rel) {
  std::ifstream in(std::string(DSLFORGE_TEST_DATA) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Tokenize, KeywordThenString) {
  auto toks = tokenize("Pattern \"Crane\"", std::vector<std::string>{"Pattern"});
  ASSERT_TRUE(toks.ok());
  ASSERT_EQ(toks->size(), 2u);
  EXPECT_EQ((*toks)[0].kind, TokenKind::Keyword);
  EXPECT_EQ((*toks)[0].text, "Pattern");
  EXPECT_EQ((*toks)[1].kind, TokenKind::String);
  EXPECT_EQ((*toks)[1].text, "Crane");
  EXPECT_EQ((*toks)[1].quote, '"');
  EXPECT_EQ((*toks)[1].pos, (SourcePos{1, 9}));
}

TEST(Tokenize, EmptyAndUnterminated) {
  auto empty = tokenize("", std::vector<std::string>{});
  ASSERT_TRUE(empty.ok());
  EXPECT_TRUE(empty->empty());
  auto bad = tokenize("\"unterminated", std::vector<std::string>{});
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.diagnostics()[0].category, ErrorCategory::Syntax);
  EXPECT_EQ(bad.diagnostics()[0].line, 1);
  EXPECT_EQ(bad.diagnostics()[0].column, 1);
}

TEST(Tokenize, KeywordBeatsIdOnlyOnExactMatch) {
  auto toks = tokenize("node nodes", std::vector<std::string>{"node"});
  ASSERT_TRUE(toks.ok());
  EXPECT_EQ((*toks)[0].kind, TokenKind::Keyword);
  EXPECT_EQ((*toks)[1].kind, TokenKind::Id);
}

TEST(ParseInstance, ItemWithEnum) {
  auto model = parse_instance("name : \"Desk\" category : Furniture", grammar_of(kInventory));
  ASSERT_TRUE(model.ok()) << render(model.diagnostics()[0]);
  EXPECT_EQ(serialize_model(*model), R"({"class":"Item","features":{"name":"Desk","category":"Furniture"}})");
}

TEST(ParseInstance, UnknownEnumLiteralListsAlternatives) {
  auto model = parse_instance("name : \"Desk\" category : Lamp", grammar_of(kInventory));
  ASSERT_FALSE(model.ok());
  const Diagnostic& d = model.diagnostics()[0];
  EXPECT_EQ(d.category, ErrorCategory::Syntax);
  EXPECT_EQ(d.message, "mismatched input 'Lamp' expecting one of 'IT', 'Furniture', 'Other'");
  EXPECT_EQ(d.column, 26);
}

TEST(ParseInstance, EmptyText) {
  auto model = parse_instance("", grammar_of(kInventory));
  ASSERT_FALSE(model.ok());
  EXPECT_EQ(model.diagnostics()[0].category, ErrorCategory::Syntax);
  EXPECT_EQ(model.diagnostics()[0].message.rfind("unexpected end of input", 0), 0u);
}

TEST(ParseInstance, SingleQuotedStringsAccepted) {
  auto model = parse_instance("name : 'Desk' category : IT", grammar_of(kInventory));
  ASSERT_TRUE(model.ok());
  EXPECT_EQ(serialize_model(*model), R"({"class":"Item","features":{"name":"Desk","category":"IT"}})");
}

TEST(ParseInstance, ManyContainmentAndInheritance) {
  auto g = grammar_of(read_data("grammars/pilot_origami.gdl"));
  auto model = parse_instance("Pattern \"Crane\" mountain 3, \"fold in half\"", g);
  ASSERT_TRUE(model.ok()) << render(model.diagnostics()[0]);
  EXPECT_EQ(serialize_model(*model),
            R"({"class":"Tutorial","features":{"title":"Crane","steps":[)"
            R"({"class":"Fold","features":{"kind":"mountain","at":3}},)"
            R"({"class":"Note","features":{"text":"fold in half"}}]}})");
}

TEST(ParseInstance, CrossReferencesResolveByName) {
  auto g = grammar_of(read_data("grammars/pilot_tree.gdl"));
  auto ok = parse_instance("node a { node b -> a } node c -> b", g);
  ASSERT_TRUE(ok.ok()) << render(ok.diagnostics()[0]);
  auto bad = parse_instance("node a -> zz", g);
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.diagnostics()[0].category, ErrorCategory::Linking);
  EXPECT_EQ(bad.diagnostics()[0].column, 11);
}

TEST(ParseInstance, BooleanAndIntFeatures) {
  auto g = grammar_of("grammar B\nSwitch: 'switch' name=ID on?='on'? level=INT;");
  auto on = parse_instance("switch s on 12", g);
  ASSERT_TRUE(on.ok());
  EXPECT_EQ(serialize_model(*on), R"({"class":"Switch","features":{"name":"s","on":true,"level":12}})");
  auto off = parse_instance("switch s 12", g);
  ASSERT_TRUE(off.ok());
  EXPECT_EQ(serialize_model(*off), R"({"class":"Switch","features":{"name":"s","level":12}})");
  auto huge = parse_instance("switch s 99999999999999999999", g);
  ASSERT_FALSE(huge.ok());
  EXPECT_EQ(huge.diagnostics()[0].category, ErrorCategory::Syntax);
}

TEST(ParseInstance, AmbiguityWithDifferentModelsIsReported) {
  auto g = grammar_of("grammar A\nM: (a+=ID)* (b+=ID)*;");
  auto model = parse_instance("x", g);
  ASSERT_FALSE(model.ok());
  EXPECT_EQ(model.diagnostics()[0].category, ErrorCategory::Other);
  EXPECT_NE(model.diagnostics()[0].message.find("ambiguous parse"), std::string::npos);
}

TEST(ParseInstance, AmbiguityWithIdenticalModelsIsAccepted) {
  auto g = grammar_of("grammar A\nM: ('k')? ('k')? name=ID;");
  auto model = parse_instance("k x", g);
  ASSERT_TRUE(model.ok());
  EXPECT_EQ(serialize_model(*model), R"({"class":"M","features":{"name":"x"}})");
}

TEST(ParseInstance, InvalidGrammarIsRejected) {
  auto g = grammar_of("grammar A\nM: name=Missing;");
  auto model = parse_instance("x", g);
  ASSERT_FALSE(model.ok());
  EXPECT_EQ(model.diagnostics()[0].category, ErrorCategory::Linking);
}

TEST(ParseInstance, RejectionAtLongestViablePrefix) {
  auto g = grammar_of(kInventory);
  auto model = parse_instance("name : \"Desk\" : Furniture", g);
  ASSERT_FALSE(model.ok());
  EXPECT_EQ(model.diagnostics()[0].column, 15);
  EXPECT_EQ(model.diagnostics()[0].message, "mismatched input ':' expecting 'category'");
}

// Earley recognition agrees with brute-force enumeration of the language.
void expect_agrees_with_oracle(const grammar::GrammarAst& ast, std::size_t max_len) {
  auto parser = InstanceParser::create(ast);
  ASSERT_TRUE(parser.ok());
  testing::LanguageOracle oracle(ast, max_len);
  auto alphabet = oracle.alphabet();
  for (const auto& s : testing::LanguageOracle::all_strings(alphabet, max_len)) {
    bool expected = oracle.accepts(s);
    bool actual = parser->recognizes(testing::LanguageOracle::tokens(s));
    if (expected != actual) {
      std::string shown;
      for (const auto& sym : s) shown += sym + " ";
      ADD_FAILURE() << grammar::print_grammar(ast) << "\nstring: " << shown << " oracle=" << expected;
      return;
    }
  }
}

TEST(Recognizer, PilotGrammarsMatchOracle) {
  expect_agrees_with_oracle(grammar_of(read_data("grammars/pilot_origami.gdl")), 6);
  expect_agrees_with_oracle(grammar_of(read_data("grammars/pilot_tree.gdl")), 6);
}

TEST(Recognizer, RandomGrammarsMatchOracle) {
  int checked = 0;
  for (unsigned seed = 1; seed <= 400 && checked < 60; ++seed) {
    auto ast = testing::GrammarGenerator(seed).grammar();
    if (has_errors(grammar::validate_grammar(ast))) continue;
    testing::LanguageOracle probe(ast, 0);
    if (probe.alphabet().size() > 5) continue;
    ++checked;
    SCOPED_TRACE("seed " + std::to_string(seed));
    expect_agrees_with_oracle(ast, 5);
  }
  EXPECT_GE(checked, 20);
}

// Every accepted text yields a conforming model, and parsing is repeatable.
TEST(ParseInstance, AcceptedModelsConformAndAreDeterministic) {
  for (const char* file : {"grammars/pilot_origami.gdl", "grammars/pilot_tree.gdl"}) {
    auto ast = grammar_of(read_data(file));
    auto parser = InstanceParser::create(ast);
    ASSERT_TRUE(parser.ok());
    testing::LanguageOracle oracle(ast, 5);
    int accepted = 0;
    for (const auto& s : oracle.sentences()) {
      std::string text;
      for (const auto& t : testing::LanguageOracle::tokens(s)) {
        if (t.kind == TokenKind::String) {
          text += "\"" + t.text + "\" ";
        } else {
          text += t.text + " ";
        }
      }
      auto a = parser->parse(text);
      auto b = parser->parse(text);
      ASSERT_EQ(a.ok(), b.ok()) << text;
      if (!a.ok()) {
        EXPECT_EQ(a.diagnostics(), b.diagnostics());
        continue;
      }
      ++accepted;
      EXPECT_EQ(serialize_model(*a), serialize_model(*b));
      auto problems = check_conformance(*a, parser->metamodel());
      EXPECT_TRUE(problems.empty()) << text << ": " << problems.front();
    }
    EXPECT_GT(accepted, 0);
  }
}

}  // namespace
}  // namespace dslforge::instance
