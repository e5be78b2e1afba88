#include "dslforge/experiment/harness.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "dslforge/error.hpp"
#include "dslforge/grammar/parser.hpp"
#include "dslforge/instance/parser.hpp"

namespace dslforge::experiment {

namespace fs = std::filesystem;
using version::InputFormat;
using version::Kind;
using version::Status;

namespace {

bool gateway_failure(ErrorCode c) {
  return c == ErrorCode::GatewayTimeout || c == ErrorCode::GatewayTransport || c == ErrorCode::MockExhausted;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Storage, "cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

std::string_view to_string(Origin origin) { return origin == Origin::ManMade ? "ManMade" : "LlmMade"; }

Origin origin_from_string(std::string_view name) {
  std::string key = lower_alnum(name);
  if (key == "manmade" || key == "human") return Origin::ManMade;
  if (key == "llmmade" || key == "llm") return Origin::LlmMade;
  throw Error(ErrorCode::BadRequest, "unknown origin '" + std::string(name) + "'");
}

std::vector<DomainDescription> load_domains(const fs::path& dir) {
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadRequest, std::string("bad manifest: ") + e.what());
  }
  std::vector<DomainDescription> out;
  for (const auto& d : manifest.at("domains")) {
    DomainDescription dd;
    std::string file = d.at("file").get<std::string>();
    dd.name = d.value("name", fs::path(file).stem().string());
    dd.origin = origin_from_string(d.at("origin").get<std::string>());
    dd.text = slurp(dir / file);
    while (!dd.text.empty() && std::isspace(static_cast<unsigned char>(dd.text.back()))) dd.text.pop_back();
    if (dd.text.empty()) throw Error(ErrorCode::BadRequest, "description '" + dd.name + "' is empty");
    out.push_back(std::move(dd));
  }
  return out;
}

std::optional<std::string> Ratio::text() const {
  if (den <= 0) return std::nullopt;
  std::int64_t milli = (2 * 1000 * num + den) / (2 * den);
  std::string frac = std::to_string(milli % 1000);
  return std::to_string(milli / 1000) + "." + std::string(3 - frac.size(), '0') + frac;
}

nlohmann::ordered_json Ratio::to_json() const {
  auto t = text();
  return t ? nlohmann::ordered_json(std::stod(*t)) : nlohmann::ordered_json(nullptr);
}

Ratio ExperimentReport::overall() const {
  Ratio r;
  for (const auto& d : domains) {
    r.num += d.first_shot_successes;
    r.den += d.samples;
  }
  return r;
}

Ratio ExperimentReport::by_origin(Origin origin) const {
  Ratio r;
  for (const auto& d : domains) {
    if (d.origin != origin) continue;
    r.num += d.first_shot_successes;
    r.den += d.samples;
  }
  return r;
}

namespace {

nlohmann::ordered_json ratio_json(const Ratio& r, const char* num_name, const char* den_name) {
  return {{num_name, r.num}, {den_name, r.den}, {"rate", r.to_json()}};
}

}  // namespace

nlohmann::ordered_json ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  if (!domains.empty()) {
    nlohmann::ordered_json g;
    g["domains"] = nlohmann::ordered_json::array();
    for (const auto& d : domains) {
      g["domains"].push_back({{"name", d.name},
                              {"origin", to_string(d.origin)},
                              {"samples", d.samples},
                              {"first_shot_successes", d.first_shot_successes},
                              {"aborted", d.aborted},
                              {"one_shot_rate", d.rate().to_json()},
                              {"versions", d.version_ids}});
    }
    g["by_origin"] = {{"ManMade", ratio_json(by_origin(Origin::ManMade), "successes", "samples")},
                      {"LlmMade", ratio_json(by_origin(Origin::LlmMade), "successes", "samples")}};
    g["overall"] = ratio_json(overall(), "successes", "samples");
    j["generation"] = std::move(g);
  } else {
    j["generation"] = nullptr;
  }
  if (repair) {
    const RepairStats& r = *repair;
    nlohmann::ordered_json rj{{"faulty_count", r.faulty_count},
                              {"fixed_with", r.fixed_with},
                              {"fixed_without", r.fixed_without},
                              {"fixed_combined", r.fixed_combined},
                              {"aborted", r.aborted},
                              {"rates",
                               {{"with", r.with_rate().to_json()},
                                {"without", r.without_rate().to_json()},
                                {"combined", r.combined_rate().to_json()}}}};
    rj["items"] = nlohmann::ordered_json::array();
    for (const auto& item : r.items) {
      rj["items"].push_back({{"version", item.version_id}, {"outcome", workbench::to_json(item.outcome)}});
    }
    j["repair"] = std::move(rj);
  } else {
    j["repair"] = nullptr;
  }
  j["error_histogram"] = nlohmann::ordered_json::object();
  for (const auto& [cat, n] : error_histogram) j["error_histogram"][cat] = n;
  j["faulty_attempts"] = faulty_attempts;
  j["distinct_faulty_grammars"] = distinct_faulty_grammars;
  return j;
}

ExperimentReport run_generation(workbench::Workbench& wb, const std::string& project_id,
                                const std::vector<DomainDescription>& domains, int samples_per_domain) {
  if (samples_per_domain < 1) throw Error(ErrorCode::BadRequest, "samples per domain must be positive");
  ExperimentReport report;
  for (const auto& d : domains) {
    DomainResult r;
    r.name = d.name;
    r.origin = d.origin;
    for (int s = 0; s < samples_per_domain; ++s) {
      workbench::ProcessRequest req{project_id, {Kind::Dsl, InputFormat::Properties, prompt::BaseMode::None}, d.text,
                                    {}, {}, {}};
      try {
        version::Version v = wb.process_version(req);
        ++r.samples;
        if (v.status == Status::Valid) ++r.first_shot_successes;
        r.version_ids.push_back(v.id);
      } catch (const Error& e) {
        if (!gateway_failure(e.code())) throw;
        ++r.aborted;
      }
    }
    report.domains.push_back(std::move(r));
  }
  tally_faults(wb.store(), report);
  return report;
}

RepairStats run_repair_experiment(workbench::Workbench& wb, const std::vector<std::string>& faulty_ids,
                                  int max_attempts) {
  RepairStats stats;
  std::set<std::string> with, without;
  for (const auto& id : faulty_ids) {
    RepairItem item{id, wb.repair_combined(id, max_attempts)};
    ++stats.faulty_count;
    if (item.outcome.with.fixed) with.insert(id);
    if (item.outcome.without.fixed) without.insert(id);
    if (item.outcome.with.stopped_by || item.outcome.without.stopped_by) ++stats.aborted;
    stats.items.push_back(std::move(item));
  }
  std::set<std::string> both = with;
  both.insert(without.begin(), without.end());
  stats.fixed_with = static_cast<int>(with.size());
  stats.fixed_without = static_cast<int>(without.size());
  stats.fixed_combined = static_cast<int>(both.size());
  return stats;
}

std::string normalize_trailing_whitespace(std::string_view text) {
  std::string out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    std::size_t end = line.find_last_not_of(" \t\r\f\v");
    out.append(line.substr(0, end == std::string_view::npos ? 0 : end + 1));
    if (nl == std::string_view::npos) break;
    out += '\n';
    start = nl + 1;
  }
  while (!out.empty() && out.back() == '\n') out.pop_back();
  return out;
}

void tally_faults(const version::VersionStore& store, ExperimentReport& report) {
  std::vector<std::string> ids;
  for (const auto& d : report.domains) ids.insert(ids.end(), d.version_ids.begin(), d.version_ids.end());
  if (report.repair) {
    for (const auto& item : report.repair->items) {
      for (const auto* o : {&item.outcome.with, &item.outcome.without}) ids.insert(ids.end(), o->chain.begin(), o->chain.end());
    }
  }
  std::set<std::string> seen;
  std::set<std::string> texts;
  report.error_histogram.clear();
  report.faulty_attempts = 0;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) continue;
    auto v = store.find_version(id);
    if (!v || v->kind != Kind::Dsl || v->status != Status::Faulty) continue;
    ++report.faulty_attempts;
    texts.insert(normalize_trailing_whitespace(v->definition));
    std::string category = "Other";
    const std::string& msg = v->error_message.value_or("");
    if (msg.size() > 2 && msg.front() == '[') {
      std::string name = msg.substr(1, msg.find(']') - 1);
      if (category_from_string(name)) category = name;
    }
    ++report.error_histogram[category];
  }
  report.distinct_faulty_grammars = static_cast<int>(texts.size());
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '"' || c == '\'') {
      std::size_t j = i + 1;
      while (j < text.size() && text[j] != c) j += text[j] == '\\' ? 2 : 1;
      j = std::min(j + 1, text.size());
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else if (word(c)) {
      std::size_t j = i;
      while (j < text.size() && word(text[j])) ++j;
      out.emplace_back(text.substr(i, j - i));
      i = j;
    } else {
      out.emplace_back(1, c);
      ++i;
    }
  }
  return out;
}

std::vector<TokenEdit> token_diff(std::string_view expected, std::string_view actual) {
  auto a = split_tokens(expected);
  auto b = split_tokens(actual);
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  std::vector<TokenEdit> edits;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      ++i, ++j;
    } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
      edits.push_back({TokenEdit::Op::Insert, i, b[j++]});
    } else {
      edits.push_back({TokenEdit::Op::Delete, i, a[i]});
      ++i;
    }
  }
  return edits;
}

std::string summarize(const std::vector<TokenEdit>& edits) {
  if (edits.empty()) return "identical";
  std::size_t ins = std::count_if(edits.begin(), edits.end(), [](const TokenEdit& e) { return e.op == TokenEdit::Op::Insert; });
  std::ostringstream out;
  out << ins << " inserted, " << edits.size() - ins << " deleted:";
  for (const auto& e : edits) out << ' ' << (e.op == TokenEdit::Op::Insert ? '+' : '-') << e.token << '@' << e.position;
  return out.str();
}

std::string_view to_string(DescriptionKind kind) {
  switch (kind) {
    case DescriptionKind::General: return "general";
    case DescriptionKind::NonTechnical: return "non_technical";
    case DescriptionKind::Technical: return "technical";
  }
  return "general";
}

std::vector<InstantiationResult> run_instantiation(workbench::Workbench& wb, const std::string& grammar_version_id,
                                                   const std::map<DescriptionKind, std::string>& descriptions,
                                                   const std::string& ground_truth) {
  version::Version g = wb.store().get_version(grammar_version_id);
  if (g.kind != Kind::Dsl || g.status != Status::Valid) {
    throw Error(ErrorCode::InvalidDraft, "instantiation needs a valid grammar version");
  }
  auto ast = grammar::parse_grammar(g.definition);
  std::vector<InstantiationResult> out;
  for (const auto& [kind, text] : descriptions) {
    workbench::ProcessRequest req{g.project_id,
                                  {Kind::Example, InputFormat::Definition, prompt::BaseMode::None},
                                  text,
                                  {},
                                  g.definition,
                                  g.id};
    version::Version v = wb.process_version(req);
    InstantiationResult r;
    r.kind = kind;
    r.version_id = v.id;
    r.parsed = v.status == Status::Valid;
    r.error_message = v.error_message;
    r.deviations = token_diff(ground_truth, v.definition);
    if (r.parsed) {
      auto model = instance::parse_instance(v.definition, *ast);
      if (model.ok()) r.model = instance::to_json(*model.value().root);
    }
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

std::string describe_feature(const grammar::MetaFeature& f) {
  std::string s(grammar::to_string(f.kind));
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s + " " + f.type.name + (f.many ? "[*]" : "");
}

}  // namespace

std::vector<std::string> metamodel_diff(const grammar::MetaModel& expected, const grammar::MetaModel& actual) {
  std::vector<std::string> out;
  for (const auto& c : expected.classes) {
    const grammar::MetaClass* other = actual.find_class(c.name);
    if (!other) {
      out.push_back("missing class " + c.name);
      continue;
    }
    for (const auto& f : c.features) {
      const grammar::MetaFeature* g = other->find_feature(f.name);
      if (!g) {
        out.push_back("missing feature " + c.name + "." + f.name);
        continue;
      }
      if (*g == f) continue;
      std::string line = c.name + "." + f.name + ": expected " + describe_feature(f) + ", got " + describe_feature(*g);
      bool to_attr = f.kind != grammar::FeatureKind::Attribute && g->kind == grammar::FeatureKind::Attribute;
      bool from_attr = f.kind == grammar::FeatureKind::Attribute && g->kind != grammar::FeatureKind::Attribute;
      if (to_attr || from_attr) line += " (attribute-vs-class mismatch)";
      out.push_back(line);
    }
    for (const auto& g : other->features) {
      if (!c.find_feature(g.name)) out.push_back("extra feature " + c.name + "." + g.name);
    }
  }
  for (const auto& c : actual.classes) {
    if (!expected.find_class(c.name)) out.push_back("extra class " + c.name);
  }
  for (const auto& e : expected.enums) {
    const grammar::MetaEnum* other = actual.find_enum(e.name);
    if (!other) out.push_back("missing enum " + e.name);
    else if (other->literals != e.literals) out.push_back("enum " + e.name + ": literals differ");
  }
  for (const auto& e : actual.enums) {
    if (!expected.find_enum(e.name)) out.push_back("extra enum " + e.name);
  }
  return out;
}

GeneralizationResult run_generalization(workbench::Workbench& wb, const std::vector<std::string>& example_ids,
                                        int repair_attempts, const std::optional<std::string>& ground_truth_grammar) {
  if (example_ids.empty()) throw Error(ErrorCode::MissingBase, "generalization needs at least one example");
  std::vector<version::Version> examples;
  for (const auto& id : example_ids) {
    auto v = wb.store().find_version(id);
    if (!v) throw Error(ErrorCode::UnknownBase, "unknown base version '" + id + "'");
    if (v->kind != Kind::Example) throw Error(ErrorCode::ConstraintC1, "C1: only examples can be generalized");
    examples.push_back(*v);
  }
  workbench::ProcessRequest req;
  req.project_id = examples.front().project_id;
  req.config = {Kind::Dsl, InputFormat::Definition, prompt::BaseMode::None};
  req.base_ids = example_ids;
  version::Version produced = wb.process_version(req);

  GeneralizationResult r;
  r.chain.push_back(produced.id);
  if (produced.status == Status::Valid) {
    r.fixed_after = 0;
  } else if (repair_attempts > 0) {
    workbench::RepairOutcome out = wb.repair(produced.id, workbench::RepairMode::WithContext, repair_attempts);
    r.chain = out.chain;
    if (out.fixed) r.fixed_after = out.attempts_used;
  }
  version::Version last = wb.store().get_version(r.chain.back());
  r.grammar_version = last.id;
  r.valid = last.status == Status::Valid;
  if (r.valid) {
    auto ast = grammar::parse_grammar(last.definition);
    r.reparses_inputs = std::all_of(examples.begin(), examples.end(), [&](const version::Version& e) {
      return instance::parse_instance(e.definition, *ast).ok();
    });
    if (ground_truth_grammar) {
      auto truth = grammar::parse_grammar(*ground_truth_grammar);
      if (!truth.ok()) throw Error(ErrorCode::BadRequest, "ground-truth grammar does not parse");
      auto truth_mm = grammar::derive_metamodel(*truth);
      if (!truth_mm.ok()) throw Error(ErrorCode::BadRequest, "ground-truth grammar has no meta-model");
      r.metamodel_differences = metamodel_diff(*truth_mm, wb.metamodel_of(last.id));
    }
  }
  return r;
}

nlohmann::ordered_json to_json(const InstantiationResult& r) {
  nlohmann::ordered_json j{{"description", to_string(r.kind)}, {"version", r.version_id}, {"parsed", r.parsed}};
  j["error_message"] = r.error_message ? nlohmann::ordered_json(*r.error_message) : nlohmann::ordered_json(nullptr);
  j["deviations"] = summarize(r.deviations);
  j["edits"] = nlohmann::ordered_json::array();
  for (const auto& e : r.deviations) {
    j["edits"].push_back(
        {{"op", e.op == TokenEdit::Op::Insert ? "insert" : "delete"}, {"position", e.position}, {"token", e.token}});
  }
  j["model"] = r.model ? *r.model : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json to_json(const GeneralizationResult& r) {
  nlohmann::ordered_json j{{"grammar_version", r.grammar_version}, {"chain", r.chain}};
  j["fixed_after"] = r.fixed_after ? nlohmann::ordered_json(*r.fixed_after) : nlohmann::ordered_json(nullptr);
  j["valid"] = r.valid;
  j["reparses_inputs"] = r.reparses_inputs;
  j["metamodel_differences"] = r.metamodel_differences;
  return j;
}

void emit_report(const ExperimentReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Storage, "cannot create '" + dir.string() + "': " + ec.message());
  auto write = [&](const char* name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error(ErrorCode::Storage, "cannot write '" + (dir / name).string() + "'");
  };
  write("report.json", report.to_json().dump(2) + "\n");

  std::string rates = "name,origin,samples,successes,rate\n";
  for (const auto& d : report.domains) {
    rates += csv_field(d.name) + "," + std::string(to_string(d.origin)) + "," + std::to_string(d.samples) + "," +
             std::to_string(d.first_shot_successes) + "," + d.rate().text().value_or("") + "\n";
  }
  write("rates.csv", rates);

  std::string errors = "category,count\n";
  for (const auto& [cat, n] : report.error_histogram) errors += cat + "," + std::to_string(n) + "\n";
  write("errors.csv", errors);
}

}  // namespace dslforge::experiment
