#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dgperf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured size cap (dimension, point count, enumeration size) was exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input data violates a structural invariant. Carries the offending record id when known.
class ValidationError : public Error {
 public:
  ValidationError(std::string record, const std::string& what)
      : Error(record.empty() ? what : record + ": " + what), record_(std::move(record)) {}
  const std::string& record() const noexcept { return record_; }

 private:
  std::string record_;
};

/// A computation produced something that contradicts an established identity.
class InternalError : public Error {
 public:
  using Error::Error;
};

/// List of human-readable check failures. Empty means every check passed.
struct CheckReport {
  std::vector<std::string> failures;

  bool ok() const noexcept { return failures.empty(); }
  void fail(std::string message) { failures.push_back(std::move(message)); }
  void merge(const CheckReport& other, const std::string& prefix = {}) {
    for (const auto& f : other.failures) failures.push_back(prefix + f);
  }
};

}  // namespace dgperf
