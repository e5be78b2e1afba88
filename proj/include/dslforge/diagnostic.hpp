#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace dslforge {

enum class ErrorCategory { Syntax, Linking, Transformation, InvalidState, Other };

inline constexpr ErrorCategory kAllCategories[] = {
    ErrorCategory::Syntax, ErrorCategory::Linking, ErrorCategory::Transformation,
    ErrorCategory::InvalidState, ErrorCategory::Other};

enum class Severity { Error, Warning };

struct SourcePos {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

struct Diagnostic {
  ErrorCategory category = ErrorCategory::Other;
  Severity severity = Severity::Error;
  std::string message;
  int line = 1;
  int column = 1;
  std::optional<std::string> offending;

  bool is_error() const { return severity == Severity::Error; }

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

Diagnostic make_diagnostic(ErrorCategory category, std::string message, SourcePos pos,
                           std::optional<std::string> offending = std::nullopt,
                           Severity severity = Severity::Error);

std::string_view to_string(ErrorCategory category);
std::optional<ErrorCategory> category_from_string(std::string_view name);

/// "[Syntax] 2:7: expected ';' (near 'B')" -- the form stored as a version's
/// error_message and sent back to the model during repair.
std::string render(const Diagnostic& diagnostic);

bool has_errors(std::span<const Diagnostic> diagnostics);

/// First error-severity diagnostic, if any.
const Diagnostic* first_error(std::span<const Diagnostic> diagnostics);

/// Either a value or the diagnostics explaining why there is none.
template <class T>
class Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(std::vector<Diagnostic> diagnostics) : state_(std::move(diagnostics)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(state_); }
  T& value() & { return std::get<T>(state_); }
  T&& value() && { return std::get<T>(std::move(state_)); }

  const T* operator->() const { return &value(); }
  const T& operator*() const { return value(); }

  const std::vector<Diagnostic>& diagnostics() const {
    return std::get<std::vector<Diagnostic>>(state_);
  }

 private:
  std::variant<T, std::vector<Diagnostic>> state_;
};

/// Line/column of a byte offset in `text` (1-based).
SourcePos position_of(std::string_view text, std::size_t offset);

/// Position one past the last character of `text`.
SourcePos end_position(std::string_view text);

/// True when `pos` addresses a character of `text` or the position right after
/// the last character of some line.
bool within_bounds(std::string_view text, SourcePos pos);

}  // namespace dslforge
