#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zrner {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data errors. These carry an optional 1-based line number.
class DataError : public Error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class TagError : public DataError {
 public:
  using DataError::DataError;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// A checkpoint or report does not match the tag scheme it is used with.
class SchemeError : public DataError {
 public:
  using DataError::DataError;
};

// Checkpoint load failures name the section that failed.
class CheckpointError : public DataError {
 public:
  CheckpointError(const std::string& section, const std::string& what)
      : DataError("checkpoint section '" + section + "': " + what), section_(section) {}
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

// Violated preconditions of an API call (shape mismatch, bad index...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Exhaustive oracles refuse instances above their size guard.
class GuardError : public ContractError {
 public:
  using ContractError::ContractError;
};

// NaN/Inf produced under checked mode, or a non-finite training loss.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace zrner
