#include "dslforge/workbench/workbench.hpp"

#include "dslforge/error.hpp"
#include "dslforge/prompt/answer.hpp"
#include "dslforge/prompt/prompt.hpp"

namespace dslforge::workbench {

using prompt::BaseMode;
using version::InputFormat;
using version::Kind;
using version::Status;
using version::Version;
using version::VersionDraft;

std::string_view to_string(RepairMode mode) {
  return mode == RepairMode::WithContext ? "WithContext" : "WithoutContext";
}

nlohmann::ordered_json to_json(const RepairOutcome& o) {
  nlohmann::ordered_json j;
  j["fixed"] = o.fixed;
  j["attempts_used"] = o.attempts_used;
  j["chain"] = o.chain;
  j["mode"] = to_string(o.mode);
  j["stopped_by"] = o.stopped_by ? nlohmann::ordered_json(*o.stopped_by) : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json to_json(const CombinedOutcome& o) {
  nlohmann::ordered_json j;
  j["with"] = to_json(o.with);
  j["without"] = to_json(o.without);
  j["fixed_any"] = o.fixed_any;
  return j;
}

namespace {

class StoreThreads : public llm::ThreadRepository {
 public:
  StoreThreads(version::VersionStore& store, std::string project) : store_(store), project_(std::move(project)) {}

  void save(const llm::Thread& t) override { store_.put_thread(project_, t.id, llm::to_json(t)); }
  std::optional<llm::Thread> load(const std::string& id) const override {
    auto j = store_.get_thread(project_, id);
    if (!j) return std::nullopt;
    return llm::thread_from_json(*j);
  }
  void remove(const std::string& id) override { store_.delete_thread(project_, id); }

 private:
  version::VersionStore& store_;
  std::string project_;
};

bool is_gateway_failure(ErrorCode c) {
  return c == ErrorCode::GatewayTimeout || c == ErrorCode::GatewayTransport || c == ErrorCode::MockExhausted;
}

}  // namespace

struct Workbench::ProjectThreads {
  std::unique_ptr<StoreThreads> repo;
  std::unique_ptr<llm::Gateway> gateway;
};

Workbench::Workbench(version::VersionStore& store, std::shared_ptr<llm::Backend> backend)
    : store_(store), backend_(std::move(backend)) {}

Workbench::~Workbench() = default;

llm::Gateway& Workbench::gateway(const std::string& project_id) {
  std::lock_guard lock(mutex_);
  auto& slot = threads_[project_id];
  if (!slot) {
    if (!backend_) throw Error(ErrorCode::InvalidConfig, "no language model backend configured");
    slot = std::make_unique<ProjectThreads>();
    slot->repo = std::make_unique<StoreThreads>(store_, project_id);
    slot->gateway = std::make_unique<llm::Gateway>(
        backend_, *slot->repo, [this] { return store_.reserve_id(); }, [this] { return store_.now(); });
  }
  return *slot->gateway;
}

std::optional<std::string> Workbench::governing_grammar(const Version& v) const {
  if (v.kind == Kind::Dsl) return v.definition;
  const Version* cur = &v;
  std::optional<Version> holder;
  for (int guard = 0; guard < 10000; ++guard) {
    if (cur->derived_from) {
      auto g = store_.find_version(*cur->derived_from);
      if (g && g->kind == Kind::Dsl) return g->definition;
    }
    if (cur->base_ids.empty()) return std::nullopt;
    holder = store_.find_version(cur->base_ids.front());
    if (!holder) return std::nullopt;
    cur = &*holder;
  }
  return std::nullopt;
}

grammar::MetaModel Workbench::metamodel_of(const std::string& version_id) const {
  Version v = store_.get_version(version_id);
  if (v.kind != Kind::Dsl) throw Error(ErrorCode::NotDsl, "version '" + version_id + "' is not a DSL version");
  Validation val = validate_grammar_text(v.definition);
  if (!val.valid()) throw Error(ErrorCode::InvalidDraft, "version '" + version_id + "' is faulty: " + *val.error_message);
  return *val.metamodel;
}

Version Workbench::process_version(const ProcessRequest& original) {
  ProcessRequest req = original;
  const auto& c = req.config;
  if (const prompt::Exclusion* e = prompt::exclusion_for(c)) {
    throw Error(ErrorCode::InvalidConfiguration,
                "configuration " + prompt::describe(c) + " is not valid (" + std::string(e->reason) + ")");
  }
  std::vector<Version> bases;
  for (const auto& id : req.base_ids) {
    auto b = store_.find_version(id);
    if (!b || b->project_id != req.project_id) throw Error(ErrorCode::UnknownBase, "unknown base version '" + id + "'");
    bases.push_back(*b);
  }
  // Generalizing one example: a lone base of the other kind would break C4,
  // so the example becomes the payload and a derived_from trace.
  if (c.kind == Kind::Dsl && c.input_format == InputFormat::Definition && c.base_mode == BaseMode::None &&
      bases.size() == 1 && bases.front().kind == Kind::Example && !req.derived_from) {
    if (req.payload.empty()) req.payload = bases.front().definition;
    req.derived_from = bases.front().id;
    req.base_ids.clear();
    bases.clear();
  }
  const bool repair = c.input_format == InputFormat::ErrorMessage;

  VersionDraft draft;
  draft.kind = c.kind;
  draft.input_format = c.input_format;
  draft.base_ids = req.base_ids;
  draft.with_context = c.base_mode == BaseMode::BaseWithContext;
  draft.derived_from = req.derived_from;
  draft.input = req.payload;
  if (repair && draft.input.empty() && !bases.empty() && bases.front().error_message) {
    draft.input = *bases.front().error_message;
  }
  store_.check(req.project_id, draft);

  llm::Gateway& gw = gateway(req.project_id);

  // Which thread carries the base? Continue it when the base's answer is
  // its latest message; fork it when later exchanges were abandoned.
  std::optional<std::string> thread_id;
  bool fresh_thread = true;
  if (c.base_mode == BaseMode::BaseWithContext && bases.size() == 1 && bases.front().thread_id) {
    try {
      llm::Thread t = gw.get_thread(*bases.front().thread_id);
      for (std::size_t i = t.messages.size(); i-- > 0;) {
        if (t.messages[i].role == llm::Role::Assistant && t.messages[i].tag == bases.front().id) {
          if (i + 1 == t.messages.size()) {
            thread_id = t.id;
            fresh_thread = false;
          } else {
            thread_id = gw.fork_thread(t.id, i + 1).id;
          }
          break;
        }
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnknownThread) throw;
    }
  }

  prompt::PromptRequest pr;
  pr.config = c;
  pr.payload = req.payload;
  pr.bases = bases;
  pr.thread_holds_base = thread_id.has_value();
  if (pr.thread_holds_base) pr.bases.front().thread_id = thread_id;
  pr.supplemental_definition = req.supplemental_definition;
  std::optional<std::string> governing = req.supplemental_definition;
  if (c.kind == Kind::Example && !governing) {
    if (req.derived_from) {
      auto g = store_.find_version(*req.derived_from);
      if (g && g->kind == Kind::Dsl) governing = g->definition;
    }
    if (!governing && !bases.empty()) governing = governing_grammar(bases.front());
    if (!pr.thread_holds_base) pr.supplemental_definition = governing;
  }
  prompt::Prompt p = prompt::build_prompt(pr);

  if (!thread_id) thread_id = gw.open_thread(prompt::system_instructions()).id;
  std::string id = store_.reserve_id();
  std::string answer;
  try {
    answer = gw.run(*thread_id, p.text(), id);
  } catch (...) {
    if (fresh_thread) gw.discard_thread(*thread_id);
    throw;
  }

  draft.id = id;
  draft.thread_id = thread_id;
  try {
    prompt::Answer a = prompt::parse_answer(answer, prompt::schema_for(c.kind, repair));
    draft.name = a.at("name");
    if (c.kind == Kind::Dsl) {
      draft.description = a.at("description");
      draft.definition = a.at("grammar");
    } else {
      draft.definition = a.at("text");
    }
    Validation val = c.kind == Kind::Dsl ? validate_grammar_text(draft.definition)
                                         : validate_example_text(draft.definition, governing);
    draft.status = val.status;
    draft.error_message = val.error_message;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MalformedAnswer && e.code() != ErrorCode::MissingProperty) throw;
    draft.definition = answer;
    draft.status = Status::Faulty;
    draft.error_message = render(make_diagnostic(ErrorCategory::Other, std::string("malformed answer: ") + e.what(),
                                                 SourcePos{1, 1}));
  }
  return store_.add_version(req.project_id, draft);
}

Version Workbench::commit_manual(const ManualRequest& req) {
  VersionDraft draft;
  draft.kind = req.kind;
  draft.input_format = InputFormat::Definition;
  draft.input = req.definition;
  draft.definition = req.definition;
  draft.base_ids = req.base_ids;
  draft.derived_from = req.derived_from;
  draft.name = req.name;
  draft.description = req.description;
  store_.check(req.project_id, draft);

  Validation val;
  if (req.kind == Kind::Dsl) {
    val = validate_grammar_text(req.definition);
  } else {
    std::optional<std::string> governing = req.grammar;
    if (!governing && req.derived_from) {
      auto g = store_.find_version(*req.derived_from);
      if (g && g->kind == Kind::Dsl) governing = g->definition;
    }
    if (!governing && !req.base_ids.empty()) {
      if (auto b = store_.find_version(req.base_ids.front())) governing = governing_grammar(*b);
    }
    val = validate_example_text(req.definition, governing);
  }
  draft.status = val.status;
  draft.error_message = val.error_message;
  return store_.add_version(req.project_id, draft);
}

RepairOutcome Workbench::repair(const std::string& version_id, RepairMode mode, int max_attempts) {
  if (max_attempts < 0) throw Error(ErrorCode::BadRequest, "attempt cap must not be negative");
  std::shared_ptr<std::mutex> gate;
  {
    std::lock_guard lock(mutex_);
    auto& slot = repair_locks_[version_id];
    if (!slot) slot = std::make_shared<std::mutex>();
    gate = slot;
  }
  std::lock_guard running(*gate);
  Version current = store_.get_version(version_id);
  if (current.status != Status::Faulty) {
    throw Error(ErrorCode::NotFaulty, "version '" + version_id + "' is valid; only faulty versions are repaired");
  }
  if (current.kind != Kind::Dsl) throw Error(ErrorCode::NotDsl, "only grammar versions are repaired automatically");

  RepairOutcome out;
  out.mode = mode;
  out.chain.push_back(current.id);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ProcessRequest req;
    req.project_id = current.project_id;
    req.config = {Kind::Dsl, InputFormat::ErrorMessage,
                  mode == RepairMode::WithContext ? BaseMode::BaseWithContext : BaseMode::BaseWithoutContext};
    req.payload = current.error_message.value_or("");
    req.base_ids = {current.id};
    Version next;
    try {
      next = process_version(req);
    } catch (const Error& e) {
      if (!is_gateway_failure(e.code())) throw;
      out.stopped_by = std::string(dslforge::to_string(e.code()));
      break;
    }
    ++out.attempts_used;
    out.chain.push_back(next.id);
    if (next.status == Status::Valid) {
      out.fixed = true;
      break;
    }
    current = next;
  }
  return out;
}

CombinedOutcome Workbench::repair_combined(const std::string& version_id, int max_attempts) {
  CombinedOutcome out;
  out.with = repair(version_id, RepairMode::WithContext, max_attempts);
  out.without = repair(version_id, RepairMode::WithoutContext, max_attempts);
  out.fixed_any = out.with.fixed || out.without.fixed;
  return out;
}

}  // namespace dslforge::workbench
