#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "dslforge/error.hpp"
#include "dslforge/experiment/harness.hpp"
#include "../support/temp_dir.hpp"

namespace dslforge::experiment {
namespace {

using llm::MockBackend;
using version::Kind;
using version::Status;
using workbench::Workbench;

const std::string kShelf =
    "grammar Shelf\n"
    "Shelf: 'shelf' name=ID '[' items+=Item* ']';\n"
    "Item: 'item' name=ID ('[' ']')? ('costs' price=INT)?;\n";
const std::string kShelfBroken = "grammar Shelf\nShelf: 'shelf' name=ID '[' items+=Item* ']'\nItem: 'item' name=ID;\n";
const std::string kShelfDangling = "grammar Shelf\nShelf: 'shelf' name=ID items+=Itm*;\nItem: 'item' name=ID;\n";

MockBackend::Entry dsl(const std::string& grammar, bool repair = false) {
  nlohmann::ordered_json j{{"name", "Shelf"}, {"description", "a shelf"}, {"grammar", grammar}};
  if (repair) j["adjustment"] = "changed";
  return {std::nullopt, j.dump(), std::nullopt};
}

MockBackend::Entry example(const std::string& text) {
  return {std::nullopt, nlohmann::ordered_json{{"name", "e"}, {"text", text}}.dump(), std::nullopt};
}

struct Bench {
  testing::TempDir dir{"exp"};
  version::VersionStore store;
  std::shared_ptr<MockBackend> mock;
  Workbench wb;
  std::string pid;

  explicit Bench(std::vector<MockBackend::Entry> entries)
      : store(dir.path(), {version::seeded_ids(3), version::logical_clock()}),
        mock(std::make_shared<MockBackend>(std::move(entries))),
        wb(store, mock),
        pid(store.create_project("exp").id) {}
};

// Half-up rounding to thousandths, by long division.
std::string oracle_rate(std::int64_t num, std::int64_t den) {
  std::int64_t scaled = num * 1000;
  std::int64_t q = scaled / den;
  if (2 * (scaled % den) >= den) ++q;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld.%03lld", static_cast<long long>(q / 1000), static_cast<long long>(q % 1000));
  return buf;
}

TEST(Ratio, ThreeDecimalsHalfUp) {
  EXPECT_EQ(Ratio({1, 2}).text(), "0.500");
  EXPECT_EQ(Ratio({6, 7}).text(), "0.857");
  EXPECT_EQ(Ratio({1, 16}).text(), "0.063");
  EXPECT_EQ(Ratio({40, 72}).text(), "0.556");
  EXPECT_EQ(Ratio({68, 144}).text(), "0.472");
  EXPECT_EQ(Ratio({0, 12}).text(), "0.000");
  EXPECT_EQ(Ratio({12, 12}).text(), "1.000");
  EXPECT_FALSE(Ratio({0, 0}).text());
  EXPECT_TRUE(Ratio({0, 0}).to_json().is_null());
  EXPECT_DOUBLE_EQ(Ratio({6, 7}).to_json().get<double>(), 0.857);
}

TEST(RatioProperty, MatchesLongDivision) {
  std::mt19937 rng(5);
  for (int i = 0; i < 5000; ++i) {
    std::int64_t den = 1 + rng() % 2000;
    std::int64_t num = rng() % (den + 1);
    ASSERT_EQ(Ratio({num, den}).text(), oracle_rate(num, den)) << num << "/" << den;
  }
}

TEST(Generation, PlantedMatrix) {
  // three domains x four samples; V = valid answer, F = faulty, T = timeout
  const std::vector<std::string> plan{"VVFV", "FFFF", "VTVF"};
  std::vector<MockBackend::Entry> entries;
  for (const auto& row : plan) {
    for (char c : row) {
      if (c == 'T') entries.push_back({std::nullopt, "", "timeout"});
      else entries.push_back(dsl(c == 'V' ? kShelf : (entries.size() % 2 ? kShelfBroken : kShelfDangling)));
    }
  }
  Bench b(entries);
  std::vector<DomainDescription> domains{
      {"Library", Origin::ManMade, "books"}, {"Farm", Origin::LlmMade, "crops"}, {"Shop", Origin::LlmMade, "goods"}};
  ExperimentReport r = run_generation(b.wb, b.pid, domains, 4);
  ASSERT_EQ(r.domains.size(), 3u);
  EXPECT_EQ(r.domains[0].rate().text(), "0.750");
  EXPECT_EQ(r.domains[1].rate().text(), "0.000");
  EXPECT_EQ(r.domains[2].samples, 3);
  EXPECT_EQ(r.domains[2].aborted, 1);
  EXPECT_EQ(r.domains[2].rate().text(), "0.667");
  EXPECT_EQ(r.by_origin(Origin::ManMade).text(), "0.750");
  EXPECT_EQ(r.by_origin(Origin::LlmMade).num, 2);
  EXPECT_EQ(r.by_origin(Origin::LlmMade).den, 7);
  EXPECT_EQ(r.overall().num, 5);
  EXPECT_EQ(r.overall().den, 11);
  EXPECT_EQ(r.faulty_attempts, 6);
  EXPECT_EQ(b.store.versions(b.pid).size(), 11u);
  EXPECT_EQ(r.error_histogram.at("Syntax") + r.error_histogram.at("Linking"), 6);
  EXPECT_EQ(r.distinct_faulty_grammars, 2);
}

TEST(RepairExperiment, SetUnionNotRateSum) {
  // faulty a..d; with fixes {a,b}, without fixes {b,c}
  std::vector<MockBackend::Entry> e;
  for (int i = 0; i < 4; ++i) e.push_back(dsl(kShelfBroken));
  const std::vector<std::pair<bool, bool>> plan{{true, false}, {true, true}, {false, true}, {false, false}};
  for (auto [w, wo] : plan) {
    e.push_back(dsl(w ? kShelf : kShelfBroken, true));
    e.push_back(dsl(wo ? kShelf : kShelfBroken, true));
  }
  Bench b(e);
  std::vector<std::string> ids;
  for (int i = 0; i < 4; ++i) {
    ids.push_back(b.wb.process_version({b.pid, {Kind::Dsl, version::InputFormat::Properties, prompt::BaseMode::None},
                                        "shelf", {}, {}, {}})
                      .id);
  }
  RepairStats s = run_repair_experiment(b.wb, ids, 1);
  EXPECT_EQ(s.faulty_count, 4);
  EXPECT_EQ(s.fixed_with, 2);
  EXPECT_EQ(s.fixed_without, 2);
  EXPECT_EQ(s.fixed_combined, 3);
  EXPECT_EQ(s.combined_rate().text(), "0.750");
  EXPECT_GE(s.fixed_combined, std::max(s.fixed_with, s.fixed_without));

  ExperimentReport r;
  r.repair = s;
  tally_faults(b.store, r);
  EXPECT_EQ(r.faulty_attempts, 4 + 4);  // roots plus the failed attempts
  EXPECT_EQ(r.distinct_faulty_grammars, 1);
  EXPECT_EQ(r.error_histogram.at("Syntax"), 8);
  const auto before = b.store.versions(b.pid).size();
  tally_faults(b.store, r);
  EXPECT_EQ(r.distinct_faulty_grammars, 1);
  EXPECT_EQ(b.store.versions(b.pid).size(), before);

  RepairStats none = run_repair_experiment(b.wb, {}, 5);
  EXPECT_TRUE(none.combined_rate().to_json().is_null());
  EXPECT_TRUE(none.with_rate().to_json().is_null());
}

TEST(Tally, DistinctAfterTrailingWhitespace) {
  EXPECT_EQ(normalize_trailing_whitespace("a  \nb\t\n\n"), "a\nb");
  EXPECT_EQ(normalize_trailing_whitespace("  a"), "  a");
  Bench b({dsl(kShelfBroken), dsl(kShelfBroken + "   \n\n"), dsl(kShelfDangling), dsl(kShelf)});
  ExperimentReport r = run_generation(b.wb, b.pid, {{"x", Origin::ManMade, "shelf"}}, 4);
  EXPECT_EQ(r.faulty_attempts, 3);
  EXPECT_EQ(r.distinct_faulty_grammars, 2);
  EXPECT_LE(r.distinct_faulty_grammars, r.faulty_attempts);
}

TEST(EmitReport, FilesAndFormatting) {
  ExperimentReport r;
  r.domains.push_back({"Coffee, Machine", Origin::ManMade, 2, 1, 0, {}});
  r.domains.push_back({"Robot", Origin::LlmMade, 0, 0, 2, {}});
  r.error_histogram = {{"Syntax", 3}, {"Linking", 1}};
  testing::TempDir out("report");
  emit_report(r, out.path());
  auto read = [&](const char* n) {
    std::ifstream in(out.path() / n);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(read("rates.csv"), "name,origin,samples,successes,rate\n\"Coffee, Machine\",ManMade,2,1,0.500\nRobot,LlmMade,0,0,\n");
  EXPECT_EQ(read("errors.csv"), "category,count\nLinking,1\nSyntax,3\n");
  auto j = nlohmann::json::parse(read("report.json"));
  EXPECT_DOUBLE_EQ(j["generation"]["domains"][0]["one_shot_rate"].get<double>(), 0.5);
  EXPECT_TRUE(j["generation"]["domains"][1]["one_shot_rate"].is_null());
  EXPECT_TRUE(j["repair"].is_null());
  emit_report(r, out.path());
  EXPECT_EQ(nlohmann::json::parse(read("report.json")), j);
}

TEST(TokenDiff, Examples) {
  EXPECT_TRUE(token_diff("shelf a [ item b ]", "shelf a [ item b ]").empty());
  EXPECT_EQ(split_tokens("x='a b' [1]"), (std::vector<std::string>{"x", "=", "'a b'", "[", "1", "]"}));
  auto d = token_diff("shelf a [ item b ]", "shelf a { item b }");
  EXPECT_EQ(d.size(), 4u);
  auto ins = token_diff("shelf a [ item b ]", "shelf a [ item b [ ] ]");
  ASSERT_EQ(ins.size(), 2u);
  EXPECT_EQ(ins[0].op, TokenEdit::Op::Insert);
  EXPECT_EQ(summarize({}), "identical");
}

// Replaying the edits on the expected tokens gives the actual tokens, and
// the edit count is minimal (|a| + |b| - 2 * LCS).
TEST(TokenDiffProperty, ReplayAndMinimality) {
  std::mt19937 rng(17);
  const char* vocab[] = {"a", "b", "[", "]", "x"};
  std::function<int(const std::vector<std::string>&, std::size_t, const std::vector<std::string>&, std::size_t)> lcs =
      [&](const auto& a, std::size_t i, const auto& b, std::size_t j) -> int {
    if (i == a.size() || j == b.size()) return 0;
    if (a[i] == b[j]) return 1 + lcs(a, i + 1, b, j + 1);
    return std::max(lcs(a, i + 1, b, j), lcs(a, i, b, j + 1));
  };
  for (int t = 0; t < 300; ++t) {
    std::string x, y;
    std::vector<std::string> a, b;
    for (int i = 0, n = rng() % 7; i < n; ++i) a.push_back(vocab[rng() % 5]), x += a.back() + " ";
    for (int i = 0, n = rng() % 7; i < n; ++i) b.push_back(vocab[rng() % 5]), y += b.back() + " ";
    auto edits = token_diff(x, y);
    std::vector<std::string> out;
    std::size_t k = 0;
    for (std::size_t i = 0; i <= a.size(); ++i) {
      bool deleted = false;
      for (; k < edits.size() && edits[k].position == i; ++k) {
        if (edits[k].op == TokenEdit::Op::Insert) out.push_back(edits[k].token);
        else deleted = true;
      }
      if (i < a.size() && !deleted) out.push_back(a[i]);
    }
    ASSERT_EQ(out, b) << x << "|" << y;
    ASSERT_EQ(static_cast<int>(edits.size()), static_cast<int>(a.size() + b.size()) - 2 * lcs(a, 0, b, 0));
  }
}

TEST(Instantiation, ThreeDescriptionKinds) {
  const std::string truth = "shelf s [ item a item b ]";
  Bench b({dsl(kShelf), example(truth), example("shelf s { item a item b }"), example("shelf s [ item a [ ] item b ]")});
  version::Version g = b.wb.process_version(
      {b.pid, {Kind::Dsl, version::InputFormat::Properties, prompt::BaseMode::None}, "shelf", {}, {}, {}});
  ASSERT_EQ(g.status, Status::Valid);
  auto results = run_instantiation(b.wb, g.id,
                                   {{DescriptionKind::Technical, "a shelf s with items a and b"},
                                    {DescriptionKind::General, "a shelf"},
                                    {DescriptionKind::NonTechnical, "some things on a shelf"}},
                                   truth);
  ASSERT_EQ(results.size(), 3u);
  // map order: General, NonTechnical, Technical
  EXPECT_EQ(results[2].kind, DescriptionKind::Technical);
  EXPECT_TRUE(results[0].parsed);
  EXPECT_TRUE(results[0].deviations.empty());
  EXPECT_TRUE(results[0].model);
  EXPECT_FALSE(results[1].parsed);
  EXPECT_EQ(results[1].error_message->rfind("[Syntax]", 0), 0u);
  EXPECT_TRUE(results[2].parsed);
  ASSERT_EQ(results[2].deviations.size(), 2u);
  EXPECT_EQ(summarize(results[2].deviations), "2 inserted, 0 deleted: +[@5 +]@5");
  for (const auto& r : results) EXPECT_EQ(b.store.get_version(r.version_id).derived_from, g.id);
  EXPECT_EQ(to_json(results[1])["parsed"], false);
}

TEST(Generalization, FromFourExamples) {
  const std::vector<std::string> texts{"shelf a [ ]", "shelf b [ item x ]", "shelf c [ item y costs 3 ]",
                                       "shelf d [ item z [ ] ]"};
  std::vector<MockBackend::Entry> e{dsl(kShelf)};
  Bench b(e);
  std::vector<std::string> ids;
  for (const auto& t : texts) {
    ids.push_back(b.wb.commit_manual({b.pid, Kind::Example, t, {}, {}, kShelf, {}, {}}).id);
  }
  GeneralizationResult r = run_generalization(b.wb, ids, 4, kShelf);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.fixed_after, 0);
  EXPECT_TRUE(r.reparses_inputs);
  EXPECT_TRUE(r.metamodel_differences.empty());
  EXPECT_EQ(b.store.get_version(r.grammar_version).base_ids, ids);
  EXPECT_NE(b.mock->prompts()[0].find("shelf d [ item z [ ] ]"), std::string::npos);
}

TEST(Generalization, RepairedOnSecondAttempt) {
  Bench b({dsl(kShelfBroken), dsl(kShelfDangling, true), dsl(kShelf, true)});
  auto ex = b.wb.commit_manual({b.pid, Kind::Example, "shelf a [ item b ]", {}, {}, kShelf, {}, {}});
  GeneralizationResult r = run_generalization(b.wb, {ex.id});
  EXPECT_EQ(r.fixed_after, 2);
  EXPECT_EQ(r.chain.size(), 3u);
  EXPECT_TRUE(r.reparses_inputs);
  version::Version root = b.store.get_version(r.chain.front());
  EXPECT_EQ(root.derived_from, ex.id);
  EXPECT_TRUE(root.base_ids.empty());
  EXPECT_EQ(to_json(r)["fixed_after"], 2);
}

TEST(Generalization, OverGeneralizedToStrings) {
  const std::string truth =
      "grammar Shelf\nShelf: 'shelf' name=ID '[' items+=Item* ']';\nItem: 'item' name=ID;\n";
  const std::string loose = "grammar Shelf\nShelf: 'shelf' name=ID '[' ('item' items+=ID)* ']';\n";
  Bench b({dsl(loose)});
  std::vector<std::string> ids;
  for (const auto& t : {"shelf a [ item b ]", "shelf c [ ]"}) {
    ids.push_back(b.wb.commit_manual({b.pid, Kind::Example, t, {}, {}, truth, {}, {}}).id);
  }
  GeneralizationResult r = run_generalization(b.wb, ids, 4, truth);
  EXPECT_TRUE(r.reparses_inputs);
  ASSERT_FALSE(r.metamodel_differences.empty());
  bool flagged = false;
  for (const auto& d : r.metamodel_differences) flagged |= d.find("attribute-vs-class mismatch") != std::string::npos;
  EXPECT_TRUE(flagged);
  EXPECT_NE(std::find(r.metamodel_differences.begin(), r.metamodel_differences.end(), "missing class Item"),
            r.metamodel_differences.end());
}

TEST(Domains, ManifestLoading) {
  testing::TempDir d("dom");
  std::ofstream(d.path() / "a.txt") << "A coffee machine.\n";
  std::ofstream(d.path() / "b.txt") << "A robot.";
  std::ofstream(d.path() / "manifest.json")
      << R"({"domains":[{"file":"a.txt","name":"Coffee Machine","origin":"man-made"},{"file":"b.txt","origin":"LlmMade"}]})";
  auto ds = load_domains(d.path());
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds[0].name, "Coffee Machine");
  EXPECT_EQ(ds[0].text, "A coffee machine.");
  EXPECT_EQ(ds[1].name, "b");
  EXPECT_EQ(ds[1].origin, Origin::LlmMade);
}

}  // namespace
}  // namespace dslforge::experiment
