#include "dslforge/prompt/prompt.hpp"

#include "dslforge/error.hpp"

namespace dslforge::prompt {

const std::array<std::string_view, 4> kInstructions = {
    "Don't justify your answers. Don't give information not mentioned in the CONTEXT INFORMATION",
    "Return answer as JSON format, within the properties specified in the prompt",
    "Always return code in plain text, that is, no markdown",
    "If there are mentioned errors in the result, carefully read through the errors and try to CHANGE the result and "
    "do not just return the same result",
};

std::string system_instructions() {
  std::string out;
  for (auto line : kInstructions) {
    if (!out.empty()) out += '\n';
    out += line;
  }
  return out;
}

namespace templates {
const std::string_view kDslIntroduction = "Return a grammar (Xtext) for a DSL and a name and a description of this DSL";
const std::string_view kExampleIntroduction = "Return an example (instance) of a DSL and a name of this example";
const std::string_view kDslProperties = "The grammar should encapsulate the following properties:\n\n<payload>";
const std::string_view kExampleProperties = "The example should encapsulate the following properties:\n\n<payload>";
const std::string_view kGeneralize = "The grammar should be generalized from the following instance:\n\n<payload>";
const std::string_view kExampleFromGrammar =
    "The example should be an instance of the grammar and match the following description:\n\n<payload>";
const std::string_view kError =
    "Something went wrong, this is the error:\n\n<payload>\n\n"
    "Carefully read error and try to find and solve the mistake and return the new corrected result";
const std::string_view kGrammarContext = "This is a grammar (Xtext) for a DSL:\n\n<definition>";
const std::string_view kExampleContext = "This is an example (instance) of a DSL:\n\n<definition>";
const std::string_view kDslOutput =
    "Output the grammar in a 'grammar' property, and the name in a 'name' property, the description in a "
    "'description' property";
const std::string_view kExampleOutput = "Output the example in a 'text' property, and the name in a 'name' property";
const std::string_view kRepairOutput = "Return how the new result is corrected in an 'adjustment' property";
}  // namespace templates

std::string fill(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '<') {
      std::size_t close = tmpl.find('>', i);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string Prompt::text() const {
  std::string out;
  auto add = [&](const std::string& part) {
    if (part.empty()) return;
    if (!out.empty()) out += "\n\n";
    out += part;
  };
  add(introduction);
  if (context) add(*context);
  add(input_data);
  add(output_indicator);
  return out;
}

namespace {

std::string block(std::string_view tmpl, const std::string& key, const std::string& value) {
  return fill(tmpl, {{key, value}});
}

std::string join_blocks(const std::vector<std::string>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    if (b.empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += b;
  }
  return out;
}

}  // namespace

Prompt build_prompt(const PromptRequest& r) {
  using version::InputFormat;
  using version::Kind;
  const PromptConfiguration& c = r.config;
  if (const Exclusion* e = exclusion_for(c)) {
    throw Error(ErrorCode::InvalidConfiguration,
                "configuration " + describe(c) + " is not valid (" + std::string(e->reason) + ")");
  }
  const bool generalizing = c.kind == Kind::Dsl && c.input_format == InputFormat::Definition;
  if (c.base_mode == BaseMode::None) {
    if (!r.bases.empty() && !generalizing) {
      throw Error(ErrorCode::InvalidConfiguration, "configuration " + describe(c) + " takes no base");
    }
    for (const auto& b : r.bases) {
      if (b.kind != Kind::Example) throw Error(ErrorCode::InvalidConfiguration, "only examples can be generalized");
    }
  } else {
    if (r.bases.empty()) throw Error(ErrorCode::MissingBase, "configuration " + describe(c) + " needs a base");
    if (r.bases.size() > 1) {
      throw Error(ErrorCode::InvalidConfiguration, "configuration " + describe(c) + " takes exactly one base");
    }
  }

  const bool repair = c.input_format == InputFormat::ErrorMessage;
  Prompt p;

  // Introduction: a repair prompt continuing a thread relies on the original
  // request already in the thread.
  bool continuing = c.base_mode == BaseMode::BaseWithContext && r.thread_holds_base && r.bases.front().thread_id;
  if (!(repair && continuing)) {
    p.introduction = std::string(c.kind == Kind::Dsl ? templates::kDslIntroduction : templates::kExampleIntroduction);
  }

  std::vector<std::string> context;
  if (r.supplemental_definition) context.push_back(block(templates::kGrammarContext, "definition", *r.supplemental_definition));
  bool inject_base = c.base_mode == BaseMode::BaseWithoutContext || (c.base_mode == BaseMode::BaseWithContext && !continuing);
  if (inject_base) {
    const auto& base = r.bases.front();
    bool duplicate = r.supplemental_definition && base.kind == Kind::Dsl && *r.supplemental_definition == base.definition;
    if (!duplicate) {
      context.push_back(block(base.kind == Kind::Dsl ? templates::kGrammarContext : templates::kExampleContext,
                              "definition", base.definition));
    }
  }
  if (!context.empty()) p.context = join_blocks(context);

  std::string payload = r.payload;
  if (repair && payload.empty() && r.bases.front().error_message) payload = *r.bases.front().error_message;
  switch (c.input_format) {
    case InputFormat::Properties:
      p.input_data = block(c.kind == Kind::Dsl ? templates::kDslProperties : templates::kExampleProperties, "payload",
                           payload);
      break;
    case InputFormat::ErrorMessage:
      p.input_data = block(templates::kError, "payload", payload);
      break;
    case InputFormat::Definition:
      if (c.kind == Kind::Example) {
        p.input_data = block(templates::kExampleFromGrammar, "payload", payload);
      } else if (r.bases.empty()) {
        p.input_data = block(templates::kGeneralize, "payload", payload);
      } else {
        std::vector<std::string> blocks;
        for (const auto& b : r.bases) blocks.push_back(block(templates::kGeneralize, "payload", b.definition));
        if (!payload.empty()) blocks.push_back(block(templates::kDslProperties, "payload", payload));
        p.input_data = join_blocks(blocks);
      }
      break;
  }

  p.output_indicator = std::string(c.kind == Kind::Dsl ? templates::kDslOutput : templates::kExampleOutput);
  if (repair) p.output_indicator += "\n\n" + std::string(templates::kRepairOutput);

  if (continuing) {
    p.directive = ThreadDirective::ContinueThread;
    p.thread_id = r.bases.front().thread_id;
  }
  return p;
}

}  // namespace dslforge::prompt
