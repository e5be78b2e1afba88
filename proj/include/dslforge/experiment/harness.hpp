#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dslforge/grammar/metamodel.hpp"
#include "dslforge/workbench/workbench.hpp"

namespace dslforge::experiment {

enum class Origin { ManMade, LlmMade };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view name);  // "ManMade"/"man-made", "LlmMade"/"llm-made"

struct DomainDescription {
  std::string name;
  Origin origin = Origin::ManMade;
  std::string text;
};

/// Reads `<dir>/manifest.json` ({"domains":[{"file","name","origin"}]}) and
/// the description files it lists.
std::vector<DomainDescription> load_domains(const std::filesystem::path& dir);

/// Exact fraction; `text()` is the 3-decimal half-up rendering, absent when
/// the denominator is zero.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 0;

  std::optional<std::string> text() const;
  nlohmann::ordered_json to_json() const;  // rounded number or null
};

struct DomainResult {
  std::string name;
  Origin origin = Origin::ManMade;
  int samples = 0;  // answered attempts
  int first_shot_successes = 0;
  int aborted = 0;  // gateway failures, outside the denominator
  std::vector<std::string> version_ids;

  Ratio rate() const { return {first_shot_successes, samples}; }
};

struct RepairItem {
  std::string version_id;
  workbench::CombinedOutcome outcome;
};

struct RepairStats {
  int faulty_count = 0;
  int fixed_with = 0;
  int fixed_without = 0;
  int fixed_combined = 0;
  int aborted = 0;  // loops ended by a gateway failure
  std::vector<RepairItem> items;

  Ratio with_rate() const { return {fixed_with, faulty_count}; }
  Ratio without_rate() const { return {fixed_without, faulty_count}; }
  Ratio combined_rate() const { return {fixed_combined, faulty_count}; }
};

struct ExperimentReport {
  std::vector<DomainResult> domains;
  std::optional<RepairStats> repair;
  std::map<std::string, int> error_histogram;  // category name -> faulty grammars
  int faulty_attempts = 0;
  int distinct_faulty_grammars = 0;

  Ratio overall() const;
  Ratio by_origin(Origin origin) const;
  nlohmann::ordered_json to_json() const;
};

/// `samples_per_domain` root grammars per description with {Dsl, Properties, None}.
ExperimentReport run_generation(workbench::Workbench& wb, const std::string& project_id,
                                const std::vector<DomainDescription>& domains, int samples_per_domain);

/// Both repair modes on every faulty grammar.
RepairStats run_repair_experiment(workbench::Workbench& wb, const std::vector<std::string>& faulty_ids,
                                  int max_attempts = 5);

/// Faulty DSL versions among generation samples and repair chains, for the
/// error histogram and the distinct-text count. Read-only.
void tally_faults(const version::VersionStore& store, ExperimentReport& report);

/// Trailing whitespace removed from every line and from the end of the text.
std::string normalize_trailing_whitespace(std::string_view text);

struct TokenEdit {
  enum class Op { Insert, Delete };
  Op op = Op::Insert;
  std::size_t position = 0;  // index in the ground-truth token stream
  std::string token;
};

/// Edits turning `expected` into `actual`, from a longest common subsequence
/// over a grammar-independent token split.
std::vector<TokenEdit> token_diff(std::string_view expected, std::string_view actual);
std::vector<std::string> split_tokens(std::string_view text);
std::string summarize(const std::vector<TokenEdit>& edits);

enum class DescriptionKind { General, NonTechnical, Technical };
std::string_view to_string(DescriptionKind kind);

struct InstantiationResult {
  DescriptionKind kind = DescriptionKind::General;
  std::string version_id;
  bool parsed = false;
  std::optional<std::string> error_message;
  std::vector<TokenEdit> deviations;
  std::optional<nlohmann::ordered_json> model;
};

std::vector<InstantiationResult> run_instantiation(workbench::Workbench& wb, const std::string& grammar_version_id,
                                                   const std::map<DescriptionKind, std::string>& descriptions,
                                                   const std::string& ground_truth);

/// Differences of `actual` against `expected`, one line per mismatch.
std::vector<std::string> metamodel_diff(const grammar::MetaModel& expected, const grammar::MetaModel& actual);

struct GeneralizationResult {
  std::string grammar_version;  // last version produced
  std::vector<std::string> chain;
  std::optional<int> fixed_after;  // 0 when valid at once
  bool valid = false;
  bool reparses_inputs = false;
  std::vector<std::string> metamodel_differences;
};

GeneralizationResult run_generalization(workbench::Workbench& wb, const std::vector<std::string>& example_ids,
                                        int repair_attempts = 4,
                                        const std::optional<std::string>& ground_truth_grammar = std::nullopt);

nlohmann::ordered_json to_json(const InstantiationResult& r);
nlohmann::ordered_json to_json(const GeneralizationResult& r);

/// Writes report.json, rates.csv and errors.csv into `dir`.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace dslforge::experiment
