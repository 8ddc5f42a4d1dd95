#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed source text. Carries the 1-based position and the tokens that
/// would have been accepted there.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& found,
             std::vector<std::string> expected);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::vector<std::string> expected_;
};

/// Well-formedness violations of a parsed program: undeclared procedures,
/// arity mismatches, duplicate declarations or duplicate list entries.
class ProgramError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Evaluation failures: unknown symbols, states whose support is too small.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// A state-space enumeration would exceed the configured budget. Never
/// confused with divergence.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(double required, std::size_t budget);

  double required() const { return required_; }
  std::size_t budget() const { return budget_; }

 private:
  double required_;
  std::size_t budget_;
};

}  // namespace cbv
