// errors.hpp
//
// Exception hierarchy shared by every lacunary module. Each failure mode has
// its own type so callers can catch narrowly; all derive from lacunary::Error,
// which carries an ErrorKind used by the CLI to pick an exit code.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lacunary {

enum class ErrorKind {
  invalid_spec,
  lacunarity_violation,
  precision_exhausted,
  tol_unreachable,
  dimension_too_large,
  out_of_range,
  overflow,
  window_too_wide,
  degenerate_window,
  degenerate_scale,
  cost_guard,
  parse_error,
  validation_error,
  io_error,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_spec: return "InvalidSpec";
    case ErrorKind::lacunarity_violation: return "LacunarityViolation";
    case ErrorKind::precision_exhausted: return "PrecisionExhausted";
    case ErrorKind::tol_unreachable: return "TolUnreachable";
    case ErrorKind::dimension_too_large: return "DimensionTooLarge";
    case ErrorKind::out_of_range: return "OutOfRange";
    case ErrorKind::overflow: return "Overflow";
    case ErrorKind::window_too_wide: return "WindowTooWide";
    case ErrorKind::degenerate_window: return "DegenerateWindow";
    case ErrorKind::degenerate_scale: return "DegenerateScale";
    case ErrorKind::cost_guard: return "CostGuard";
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::validation_error: return "ValidationError";
    case ErrorKind::io_error: return "IoError";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class KindedError : public Error {
 public:
  explicit KindedError(const std::string& message) : Error(K, message) {}
};

using InvalidSpec = KindedError<ErrorKind::invalid_spec>;
using LacunarityViolation = KindedError<ErrorKind::lacunarity_violation>;
using PrecisionExhausted = KindedError<ErrorKind::precision_exhausted>;
using TolUnreachable = KindedError<ErrorKind::tol_unreachable>;
using DimensionTooLarge = KindedError<ErrorKind::dimension_too_large>;
using OutOfRange = KindedError<ErrorKind::out_of_range>;
using Overflow = KindedError<ErrorKind::overflow>;
using WindowTooWide = KindedError<ErrorKind::window_too_wide>;
using DegenerateWindow = KindedError<ErrorKind::degenerate_window>;
using DegenerateScale = KindedError<ErrorKind::degenerate_scale>;
using CostGuard = KindedError<ErrorKind::cost_guard>;
using ValidationError = KindedError<ErrorKind::validation_error>;
using IoError = KindedError<ErrorKind::io_error>;

/// Config parse failure; line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::parse_error,
              line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lacunary
