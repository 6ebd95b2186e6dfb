#pragma once

#include <stdexcept>
#include <string>

namespace ctxkit {

/// Root of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: maps to CLI exit status 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An exact search was asked to run above its configured size cap.
class SizeLimitError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A context holds measurements that are not mutually exclusive.
class IncompatibleContext : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A count record with zero total.
class DegenerateRecord : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A probability table is missing contexts required by its inequality.
class IncompleteTable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed JSON document. `path` is a JSON pointer into the document.
class SchemaError : public ValidationError {
 public:
  SchemaError(std::string path, const std::string& what)
      : ValidationError(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// The SDP solver ran out of iterations. Carries the best bound pair seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double primal, double dual)
      : Error(what), primal_(primal), dual_(dual) {}
  double primal() const noexcept { return primal_; }
  double dual() const noexcept { return dual_; }

 private:
  double primal_;
  double dual_;
};

}  // namespace ctxkit
