#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace golf {

// Error categories map one-to-one onto CLI exit codes (see README).
enum class ErrorKind {
  format,      // malformed input file
  validation,  // graph invariant broken
  parameter,   // out-of-range argument
  infeasible,  // selection constraints cannot be met
  size_guard,  // brute-force enumeration too large
  divergence,  // training produced a non-finite loss
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// line is 1-based; 0 means the error is not tied to a text line.
class FormatError : public Error {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorKind::format,
              source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::parameter, what) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

class SizeGuardError : public Error {
 public:
  explicit SizeGuardError(const std::string& what) : Error(ErrorKind::size_guard, what) {}
};

class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(ErrorKind::divergence, what) {}
};

// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace golf
