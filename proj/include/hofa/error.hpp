#ifndef HOFA_ERROR_HPP
#define HOFA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hofa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A caller-side contract was violated: wrong shapes, characteristic too
/// small, degree out of range, malformed certificate.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// An exhaustive computation would exceed the configured evaluation budget.
class BudgetError : public PreconditionError {
public:
  using PreconditionError::PreconditionError;
};

/// Malformed text input. Line and column are 1-based.
class ParseError : public PreconditionError {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : PreconditionError("line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + what),
        reason_(what), line_(line), column_(column) {}

  const std::string& reason() const { return reason_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::string reason_;
  std::size_t line_;
  std::size_t column_;
};

/// A pipeline stage produced an artifact that failed its own check.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

namespace detail {
inline void require(bool condition, const std::string& message) {
  if (!condition) throw PreconditionError(message);
}
} // namespace detail

} // namespace hofa

#endif // HOFA_ERROR_HPP
