#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "dslforge/error.hpp"
#include "dslforge/workbench/workbench.hpp"
#include "../support/temp_dir.hpp"

namespace dslforge::workbench {
namespace {

using llm::MockBackend;
using prompt::BaseMode;
using version::InputFormat;
using version::Kind;
using version::Status;
using version::Version;

std::string read_file(const std::string& rel) {
  std::ifstream in(std::string(DSLFORGE_TEST_DATA) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kOrigami = read_file("grammars/pilot_origami.gdl");

std::string broken_origami() {
  std::string g = kOrigami;
  g.erase(g.find("Note: text=STRING;") + 17, 1);  // drop a ';'
  return g;
}

MockBackend::Entry dsl_answer(const std::string& grammar, const std::string& name = "Origami") {
  nlohmann::ordered_json j{{"name", name}, {"description", "folding tutorials"}, {"grammar", grammar}};
  return {std::nullopt, j.dump(), std::nullopt};
}

MockBackend::Entry repair_answer(const std::string& grammar) {
  nlohmann::ordered_json j{
      {"name", "Origami"}, {"description", "folding tutorials"}, {"grammar", grammar}, {"adjustment", "fixed"}};
  return {std::nullopt, j.dump(), std::nullopt};
}

MockBackend::Entry example_answer(const std::string& text) {
  nlohmann::ordered_json j{{"name", "crane"}, {"text", text}};
  return {std::nullopt, j.dump(), std::nullopt};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::BadRequest;
}

struct Fixture {
  testing::TempDir dir{"wb"};
  version::VersionStore store;
  std::shared_ptr<MockBackend> mock;
  Workbench wb;
  std::string pid;

  explicit Fixture(std::vector<MockBackend::Entry> entries, std::uint64_t seed = 7)
      : store(dir.path(), {version::seeded_ids(seed), version::logical_clock()}),
        mock(std::make_shared<MockBackend>(std::move(entries))),
        wb(store, mock),
        pid(store.create_project("p").id) {}

  Version root(const std::string& description = "origami tutorials") {
    return wb.process_version({pid, {Kind::Dsl, InputFormat::Properties, BaseMode::None}, description, {}, {}, {}});
  }
};

// Every repair-chain step must read as an ErrorMessage child of a faulty
// parent of the same kind.
void expect_chain_well_formed(const version::VersionStore& store, const RepairOutcome& out) {
  for (std::size_t i = 1; i < out.chain.size(); ++i) {
    Version child = store.get_version(out.chain[i]);
    Version parent = store.get_version(out.chain[i - 1]);
    EXPECT_EQ(child.input_format, InputFormat::ErrorMessage);
    ASSERT_EQ(child.base_ids, std::vector<std::string>{parent.id});
    EXPECT_EQ(parent.status, Status::Faulty);
    EXPECT_EQ(child.kind, parent.kind);
    EXPECT_EQ(child.input, parent.error_message.value_or(""));
  }
  if (out.fixed) EXPECT_EQ(store.get_version(out.chain.back()).status, Status::Valid);
}

TEST(ProcessVersion, ValidGrammarAnswer) {
  Fixture f({dsl_answer(kOrigami)});
  Version v = f.root();
  EXPECT_EQ(v.status, Status::Valid);
  EXPECT_FALSE(v.error_message);
  EXPECT_EQ(v.definition, kOrigami);
  EXPECT_EQ(v.name, "Origami");
  EXPECT_EQ(v.input, "origami tutorials");
  ASSERT_TRUE(v.thread_id);
  auto mm = f.wb.metamodel_of(v.id);
  std::set<std::string> classes;
  for (const auto& c : mm.classes) classes.insert(c.name);
  EXPECT_EQ(classes, (std::set<std::string>{"Tutorial", "Step", "Fold", "Note"}));

  llm::Thread t = f.wb.gateway(f.pid).get_thread(*v.thread_id);
  ASSERT_EQ(t.messages.size(), 3u);
  EXPECT_EQ(t.messages[2].tag, v.id);
  EXPECT_NE(t.messages[1].content.find("origami tutorials"), std::string::npos);
}

TEST(ProcessVersion, MissingSemicolonIsFaultySyntax) {
  Fixture f({dsl_answer(broken_origami())});
  Version v = f.root();
  EXPECT_EQ(v.status, Status::Faulty);
  ASSERT_TRUE(v.error_message);
  EXPECT_EQ(v.error_message->rfind("[Syntax]", 0), 0u) << *v.error_message;
  EXPECT_EQ(code_of([&] { f.wb.metamodel_of(v.id); }), ErrorCode::InvalidDraft);
}

TEST(ProcessVersion, GatewayFailurePersistsNothing) {
  for (const char* mode : {"timeout", "transport"}) {
    Fixture f({{std::nullopt, "", std::string(mode)}});
    ErrorCode c = code_of([&] { f.root(); });
    EXPECT_EQ(c, std::string(mode) == "timeout" ? ErrorCode::GatewayTimeout : ErrorCode::GatewayTransport);
    EXPECT_TRUE(f.store.versions(f.pid).empty());
    EXPECT_FALSE(std::filesystem::exists(f.dir.path() / f.pid / "threads") &&
                 !std::filesystem::is_empty(f.dir.path() / f.pid / "threads"));
  }
  Fixture empty({});
  EXPECT_EQ(code_of([&] { empty.root(); }), ErrorCode::MockExhausted);
  EXPECT_TRUE(empty.store.versions(empty.pid).empty());
}

TEST(ProcessVersion, MalformedAnswerBecomesFaultyVersion) {
  Fixture f({{std::nullopt, "I cannot produce JSON today", std::nullopt},
             {std::nullopt, R"({"name":"x","description":"y"})", std::nullopt}});
  Version a = f.root();
  EXPECT_EQ(a.status, Status::Faulty);
  EXPECT_NE(a.error_message->find("malformed answer"), std::string::npos);
  EXPECT_EQ(a.definition, "I cannot produce JSON today");
  Version b = f.root();
  EXPECT_EQ(b.status, Status::Faulty);
  EXPECT_NE(b.error_message->find("malformed answer"), std::string::npos);
  EXPECT_EQ(f.store.versions(f.pid).size(), 2u);
}

TEST(ProcessVersion, RejectsExcludedConfigurationAndUnknownBase) {
  Fixture f({dsl_answer(kOrigami)});
  EXPECT_EQ(code_of([&] {
              f.wb.process_version({f.pid, {Kind::Dsl, InputFormat::ErrorMessage, BaseMode::None}, "e", {}, {}, {}});
            }),
            ErrorCode::InvalidConfiguration);
  EXPECT_EQ(code_of([&] {
              f.wb.process_version(
                  {f.pid, {Kind::Dsl, InputFormat::Properties, BaseMode::BaseWithContext}, "x", {"nope"}, {}, {}});
            }),
            ErrorCode::UnknownBase);
  EXPECT_EQ(f.mock->remaining(), 1u);
}

TEST(ProcessVersion, ConstraintViolationCallsNoModel) {
  Fixture f({dsl_answer(kOrigami), dsl_answer(kOrigami), dsl_answer(kOrigami)});
  Version r = f.root();
  Version ext = f.wb.process_version(
      {f.pid, {Kind::Dsl, InputFormat::Properties, BaseMode::BaseWithContext}, "add crease", {r.id}, {}, {}});
  EXPECT_EQ(ext.base_ids, std::vector<std::string>{r.id});
  EXPECT_EQ(code_of([&] {
              f.wb.process_version(
                  {f.pid, {Kind::Dsl, InputFormat::Properties, BaseMode::BaseWithContext}, "again", {r.id}, {}, {}});
            }),
            ErrorCode::ConstraintC4);
  EXPECT_EQ(f.mock->remaining(), 1u);
}

TEST(ProcessVersion, WithContextContinuesThreadAndForksAfterBacktrack) {
  Fixture f({dsl_answer(kOrigami), dsl_answer(kOrigami), dsl_answer(kOrigami)});
  Version r = f.root();
  prompt::PromptConfiguration extend{Kind::Dsl, InputFormat::Properties, BaseMode::BaseWithContext};
  Version v2 = f.wb.process_version({f.pid, extend, "add crease", {r.id}, {}, {}});
  EXPECT_EQ(v2.thread_id, r.thread_id);
  EXPECT_EQ(f.wb.gateway(f.pid).get_thread(*r.thread_id).messages.size(), 5u);

  f.store.delete_version(v2.id);
  Version v3 = f.wb.process_version({f.pid, extend, "add squash", {r.id}, {}, {}});
  ASSERT_TRUE(v3.thread_id);
  EXPECT_NE(v3.thread_id, r.thread_id);
  llm::Thread forked = f.wb.gateway(f.pid).get_thread(*v3.thread_id);
  ASSERT_EQ(forked.messages.size(), 5u);
  EXPECT_EQ(forked.messages[2].tag, r.id);
  EXPECT_NE(forked.messages[3].content.find("add squash"), std::string::npos);
  EXPECT_EQ(forked.messages[3].content.find("add crease"), std::string::npos);
  // the original thread is left as it was
  EXPECT_EQ(f.wb.gateway(f.pid).get_thread(*r.thread_id).messages.size(), 5u);
}

TEST(ProcessVersion, ExampleValidatedAgainstGoverningGrammar) {
  Fixture f({dsl_answer(kOrigami), example_answer("Pattern 'crane' valley 1, 'then turn'"),
             example_answer("Pattern 'crane' { valley 1 }"), example_answer("Pattern 'crane' mountain 3")});
  Version g = f.root();
  prompt::PromptConfiguration inst{Kind::Example, InputFormat::Definition, BaseMode::None};
  Version ok = f.wb.process_version({f.pid, inst, "a crane", {}, g.definition, g.id});
  EXPECT_EQ(ok.status, Status::Valid) << ok.error_message.value_or("");
  EXPECT_EQ(ok.derived_from, g.id);
  EXPECT_NE(f.mock->prompts().back().find("grammar Origami"), std::string::npos);

  Version bad = f.wb.process_version({f.pid, inst, "a crane", {}, g.definition, g.id});
  EXPECT_EQ(bad.status, Status::Faulty);
  EXPECT_EQ(bad.error_message->rfind("[Syntax]", 0), 0u);

  // an example extending a valid example inherits the grammar through its base
  Version ext = f.wb.process_version(
      {f.pid, {Kind::Example, InputFormat::Properties, BaseMode::BaseWithContext}, "use mountain folds", {ok.id}, {}, {}});
  EXPECT_EQ(ext.status, Status::Valid) << ext.error_message.value_or("");
  EXPECT_EQ(f.wb.governing_grammar(ext), kOrigami);
}

TEST(Repair, SecondAttemptFixes) {
  Fixture f({dsl_answer(broken_origami()), repair_answer(broken_origami()), repair_answer(kOrigami)});
  Version faulty = f.root();
  RepairOutcome out = f.wb.repair(faulty.id, RepairMode::WithContext);
  EXPECT_TRUE(out.fixed);
  EXPECT_EQ(out.attempts_used, 2);
  EXPECT_EQ(out.chain.size(), 3u);
  EXPECT_FALSE(out.stopped_by);
  expect_chain_well_formed(f.store, out);
  for (const auto& id : out.chain) EXPECT_EQ(f.store.get_version(id).thread_id, faulty.thread_id);
  // the repair prompt carries the rendered error message
  EXPECT_NE(f.mock->prompts()[1].find(*faulty.error_message), std::string::npos);
}

TEST(Repair, AlwaysFaultyStopsAtCap) {
  std::vector<MockBackend::Entry> entries{dsl_answer(broken_origami())};
  for (int i = 0; i < 6; ++i) entries.push_back(repair_answer(broken_origami()));
  Fixture f(entries);
  Version faulty = f.root();
  RepairOutcome out = f.wb.repair(faulty.id, RepairMode::WithContext);
  EXPECT_FALSE(out.fixed);
  EXPECT_EQ(out.attempts_used, kDefaultRepairAttempts);
  EXPECT_EQ(out.chain.size(), 5u);
  EXPECT_EQ(f.mock->remaining(), 2u);
  expect_chain_well_formed(f.store, out);

  RepairOutcome capped = f.wb.repair(out.chain.back(), RepairMode::WithContext, 1);
  EXPECT_EQ(capped.attempts_used, 1);
  EXPECT_EQ(f.mock->remaining(), 1u);
}

TEST(Repair, PreconditionsCreateNothing) {
  Fixture f({dsl_answer(kOrigami), example_answer("Pattern 'x' { }")});
  Version valid = f.root();
  EXPECT_EQ(code_of([&] { f.wb.repair(valid.id, RepairMode::WithContext); }), ErrorCode::NotFaulty);
  Version ex = f.wb.process_version(
      {f.pid, {Kind::Example, InputFormat::Definition, BaseMode::None}, "x", {}, valid.definition, valid.id});
  ASSERT_EQ(ex.status, Status::Faulty);
  EXPECT_EQ(code_of([&] { f.wb.repair(ex.id, RepairMode::WithContext); }), ErrorCode::NotDsl);
  EXPECT_EQ(code_of([&] { f.wb.repair("missing", RepairMode::WithContext); }), ErrorCode::UnknownVersion);
  EXPECT_EQ(f.store.versions(f.pid).size(), 2u);
}

TEST(Repair, GatewayFailureEndsLoop) {
  Fixture f({dsl_answer(broken_origami()), repair_answer(broken_origami())});
  Version faulty = f.root();
  RepairOutcome out = f.wb.repair(faulty.id, RepairMode::WithContext);
  EXPECT_FALSE(out.fixed);
  EXPECT_EQ(out.attempts_used, 1);
  EXPECT_EQ(out.stopped_by, "MOCK_EXHAUSTED");
  EXPECT_EQ(f.store.versions(f.pid).size(), 2u);
}

TEST(Repair, WithoutContextUsesFreshThreadWithBrokenGrammar) {
  Fixture f({dsl_answer(broken_origami()), repair_answer(kOrigami)});
  Version faulty = f.root();
  RepairOutcome out = f.wb.repair(faulty.id, RepairMode::WithoutContext);
  ASSERT_TRUE(out.fixed);
  Version fixed = f.store.get_version(out.chain.back());
  EXPECT_NE(fixed.thread_id, faulty.thread_id);
  EXPECT_FALSE(fixed.with_context);
  llm::Thread t = f.wb.gateway(f.pid).get_thread(*fixed.thread_id);
  ASSERT_EQ(t.messages.size(), 3u);
  EXPECT_NE(t.messages[1].content.find(faulty.definition), std::string::npos);
  EXPECT_NE(t.messages[1].content.find(*faulty.error_message), std::string::npos);
}

TEST(RepairCombined, UnionOfModes) {
  // with context fixes at once; without context never does
  {
    std::vector<MockBackend::Entry> e{dsl_answer(broken_origami()), repair_answer(kOrigami)};
    for (int i = 0; i < 2; ++i) e.push_back(repair_answer(broken_origami()));
    Fixture f(e);
    CombinedOutcome out = f.wb.repair_combined(f.root().id, 2);
    EXPECT_TRUE(out.with.fixed);
    EXPECT_FALSE(out.without.fixed);
    EXPECT_EQ(out.without.attempts_used, 2);
    EXPECT_TRUE(out.fixed_any);
    expect_chain_well_formed(f.store, out.with);
    expect_chain_well_formed(f.store, out.without);
  }
  {
    std::vector<MockBackend::Entry> e{dsl_answer(broken_origami())};
    for (int i = 0; i < 4; ++i) e.push_back(repair_answer(broken_origami()));
    Fixture f(e);
    CombinedOutcome out = f.wb.repair_combined(f.root().id, 2);
    EXPECT_FALSE(out.fixed_any);
  }
  {
    Fixture f({dsl_answer(broken_origami()), repair_answer(kOrigami), repair_answer(kOrigami)});
    Version faulty = f.root();
    CombinedOutcome out = f.wb.repair_combined(faulty.id);
    EXPECT_TRUE(out.fixed_any);
    EXPECT_NE(out.with.chain.back(), out.without.chain.back());
    int valid_leaves = 0;
    for (const auto& v : f.store.versions(f.pid)) {
      if (v.status == Status::Valid && f.store.neighbors(v.id).successors.empty()) ++valid_leaves;
    }
    EXPECT_EQ(valid_leaves, 2);
    auto j = to_json(out);
    EXPECT_EQ(j["with"]["mode"], "WithContext");
    EXPECT_EQ(j["without"]["mode"], "WithoutContext");
    EXPECT_TRUE(j["with"]["stopped_by"].is_null());
  }
}

// (attempts_used, fixed) is a function of the transcript alone.
TEST(RepairProperty, OutcomeDeterminedByTranscript) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    int cap = 1 + static_cast<int>(rng() % 5);
    std::vector<MockBackend::Entry> e{dsl_answer(broken_origami())};
    int fix_at = -1;
    int len = static_cast<int>(rng() % 7);
    for (int i = 0; i < len; ++i) {
      bool good = rng() % 3 == 0;
      if (good && fix_at < 0) fix_at = i + 1;
      e.push_back(repair_answer(good ? kOrigami : broken_origami()));
    }
    Fixture a(e, 1), b(e, 99);
    RepairOutcome x = a.wb.repair(a.root().id, RepairMode::WithContext, cap);
    RepairOutcome y = b.wb.repair(b.root().id, RepairMode::WithContext, cap);
    EXPECT_EQ(x.attempts_used, y.attempts_used);
    EXPECT_EQ(x.fixed, y.fixed);
    // independent expectation from the planted sequence
    bool expect_fixed = fix_at > 0 && fix_at <= cap;
    int expect_attempts = expect_fixed ? fix_at : std::min(cap, len);
    EXPECT_EQ(x.fixed, expect_fixed) << "trial " << trial;
    EXPECT_EQ(x.attempts_used, expect_attempts) << "trial " << trial;
    EXPECT_LE(static_cast<int>(e.size() - 1 - a.mock->remaining()), cap);
    expect_chain_well_formed(a.store, x);
  }
}

TEST(CommitManual, ValidatesWithoutModel) {
  Fixture f({dsl_answer(kOrigami)});
  Version g = f.root();
  ManualRequest edit{f.pid, Kind::Dsl, broken_origami(), {g.id}, {}, {}, {}, {}};
  Version m = f.wb.commit_manual(edit);
  EXPECT_EQ(m.status, Status::Faulty);
  EXPECT_FALSE(m.thread_id);
  EXPECT_EQ(m.input_format, InputFormat::Definition);

  Version ex = f.wb.commit_manual({f.pid, Kind::Example, "Pattern 'fox' valley 2", {}, g.id, {}, {}, {}});
  EXPECT_EQ(ex.status, Status::Valid) << ex.error_message.value_or("");
  Version orphan = f.wb.commit_manual({f.pid, Kind::Example, "Pattern 'fox' valley 2", {}, {}, {}, {}, {}});
  EXPECT_EQ(orphan.status, Status::Faulty);

  // repairing a manual edit opens a thread and injects the grammar
  Fixture r({repair_answer(kOrigami)});
  Version man = r.wb.commit_manual({r.pid, Kind::Dsl, broken_origami(), {}, {}, {}, {}, {}});
  RepairOutcome out = r.wb.repair(man.id, RepairMode::WithContext);
  EXPECT_TRUE(out.fixed);
  EXPECT_NE(r.mock->prompts()[0].find(broken_origami()), std::string::npos);
}

}  // namespace
}  // namespace dslforge::workbench
