#include "dslforge/prompt/answer.hpp"

#include "json.hpp"

#include "dslforge/error.hpp"

namespace dslforge::prompt {

const AnswerSchema kDslSchema{"dsl", {"grammar", "name", "description"}};
const AnswerSchema kExampleSchema{"example", {"text", "name"}};
const AnswerSchema kDslRepairSchema{"dsl-repair", {"grammar", "name", "description", "adjustment"}};
const AnswerSchema kExampleRepairSchema{"example-repair", {"text", "name", "adjustment"}};

const AnswerSchema& schema_for(version::Kind kind, bool repair) {
  if (kind == version::Kind::Dsl) return repair ? kDslRepairSchema : kDslSchema;
  return repair ? kExampleRepairSchema : kExampleSchema;
}

std::string strip_fences(std::string_view raw) {
  std::size_t open = raw.find("```");
  if (open == std::string_view::npos) return std::string(raw);
  std::size_t body = raw.find('\n', open);
  if (body == std::string_view::npos) return std::string(raw);
  std::size_t close = raw.find("```", body + 1);
  if (close == std::string_view::npos) close = raw.size();
  return std::string(raw.substr(body + 1, close - body - 1));
}

namespace {

std::optional<nlohmann::json> try_object(std::string_view text) {
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

}  // namespace

Answer parse_answer(std::string_view raw, const AnswerSchema& schema) {
  std::string text = strip_fences(raw);
  auto obj = try_object(text);
  if (!obj) {
    std::size_t first = text.find('{');
    std::size_t last = text.rfind('}');
    if (first != std::string::npos && last != std::string::npos && last > first) {
      obj = try_object(std::string_view(text).substr(first, last - first + 1));
    }
  }
  if (!obj) throw Error(ErrorCode::MalformedAnswer, "answer is not a JSON object");
  Answer answer;
  for (const auto& key : schema.required) {
    auto it = obj->find(key);
    if (it == obj->end() || it->is_null()) {
      throw Error(ErrorCode::MissingProperty, "answer is missing the '" + key + "' property");
    }
    answer.properties[key] = it->is_string() ? it->get<std::string>() : it->dump();
  }
  return answer;
}

}  // namespace dslforge::prompt
