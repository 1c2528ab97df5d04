#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noai {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad invocation or configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Anything wrong with the input data or with what can be computed from it
/// (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoFailure : public DataError {
 public:
  using DataError::DataError;
};

/// A corpus line that cannot be decoded. Carries the 1-based line number.
class MalformedRecord : public DataError {
 public:
  MalformedRecord(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A registry CSV row that cannot be decoded.
class MalformedRow : public DataError {
 public:
  MalformedRow(std::size_t line, const std::string& reason)
      : DataError("row " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DuplicateCategory : public DataError {
 public:
  using DataError::DataError;
};

class UnknownDiscipline : public DataError {
 public:
  using DataError::DataError;
};

class UnknownSubfield : public DataError {
 public:
  using DataError::DataError;
};

class UnknownCategory : public DataError {
 public:
  using DataError::DataError;
};

class EmptyWindow : public DataError {
 public:
  using DataError::DataError;
};

class UndefinedShare : public DataError {
 public:
  using DataError::DataError;
};

class UndefinedIndicator : public DataError {
 public:
  using DataError::DataError;
};

class EmptyTable : public DataError {
 public:
  using DataError::DataError;
};

class MismatchedActorSets : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateInput : public DataError {
 public:
  using DataError::DataError;
};

class InvalidSpec : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace noai
