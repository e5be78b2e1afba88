#include "dslforge/diagnostic.hpp"

#include <algorithm>

namespace dslforge {

Diagnostic make_diagnostic(ErrorCategory category, std::string message, SourcePos pos,
                           std::optional<std::string> offending, Severity severity) {
  Diagnostic d;
  d.category = category;
  d.severity = severity;
  d.message = std::move(message);
  d.line = pos.line;
  d.column = pos.column;
  d.offending = std::move(offending);
  return d;
}

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Syntax: return "Syntax";
    case ErrorCategory::Linking: return "Linking";
    case ErrorCategory::Transformation: return "Transformation";
    case ErrorCategory::InvalidState: return "InvalidState";
    case ErrorCategory::Other: return "Other";
  }
  return "Other";
}

std::optional<ErrorCategory> category_from_string(std::string_view name) {
  for (ErrorCategory c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

std::string render(const Diagnostic& diagnostic) {
  std::string out = "[";
  out += to_string(diagnostic.category);
  out += "] ";
  out += std::to_string(diagnostic.line);
  out += ':';
  out += std::to_string(diagnostic.column);
  out += ": ";
  if (!diagnostic.is_error()) out += "warning: ";
  out += diagnostic.message;
  if (diagnostic.offending && !diagnostic.offending->empty()) {
    out += " (near '";
    out += *diagnostic.offending;
    out += "')";
  }
  return out;
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.is_error(); });
}

const Diagnostic* first_error(std::span<const Diagnostic> diagnostics) {
  for (const auto& d : diagnostics) {
    if (d.is_error()) return &d;
  }
  return nullptr;
}

SourcePos position_of(std::string_view text, std::size_t offset) {
  SourcePos pos;
  offset = std::min(offset, text.size());
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

SourcePos end_position(std::string_view text) { return position_of(text, text.size()); }

bool within_bounds(std::string_view text, SourcePos pos) {
  if (pos.line < 1 || pos.column < 1) return false;
  int line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n') {
      if (line == pos.line) {
        auto length = static_cast<int>(i - line_start);
        return pos.column <= length + 1;
      }
      ++line;
      line_start = i + 1;
    }
  }
  return false;
}

}  // namespace dslforge
