#pragma once

#include <stdexcept>
#include <string>

namespace lyap {

// Base of everything the library throws. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numeric failures (exit code 3 at the CLI).
class NumericError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public NumericError {
 public:
  SingularMatrix() : NumericError("matrix is singular to working precision") {}
  explicit SingularMatrix(const std::string& what) : NumericError(what) {}
};

class DegenerateGap : public NumericError {
 public:
  explicit DegenerateGap(const std::string& what) : NumericError(what) {}
};

class NotConverged : public NumericError {
 public:
  explicit NotConverged(const std::string& what) : NumericError(what) {}
};

class InsufficientReturns : public NumericError {
 public:
  explicit InsufficientReturns(const std::string& what) : NumericError(what) {}
};

class PerturbationLeavesGL : public NumericError {
 public:
  explicit PerturbationLeavesGL(const std::string& what) : NumericError(what) {}
};

// Contract violations by the caller (exit code 2 at the CLI).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidCocycle : public InvalidArgument {
 public:
  explicit InvalidCocycle(const std::string& what) : InvalidArgument(what) {}
};

class AlphabetMismatch : public InvalidArgument {
 public:
  explicit AlphabetMismatch(const std::string& what) : InvalidArgument(what) {}
};

class NotDiagonal : public InvalidArgument {
 public:
  explicit NotDiagonal(const std::string& what) : InvalidArgument(what) {}
};

class BudgetExceeded : public InvalidArgument {
 public:
  explicit BudgetExceeded(const std::string& what) : InvalidArgument(what) {}
};

class UnnormalizedMeasure : public InvalidArgument {
 public:
  explicit UnnormalizedMeasure(const std::string& what) : InvalidArgument(what) {}
};

class OutOfRange : public InvalidArgument {
 public:
  explicit OutOfRange(const std::string& what) : InvalidArgument(what) {}
};

class WordNotInCylinder : public InvalidArgument {
 public:
  explicit WordNotInCylinder(const std::string& what) : InvalidArgument(what) {}
};

class InvalidParams : public InvalidArgument {
 public:
  explicit InvalidParams(const std::string& what) : InvalidArgument(what) {}
};

class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(const std::string& what) : InvalidArgument(what) {}
};

// Exit code 4 at the CLI.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace lyap
