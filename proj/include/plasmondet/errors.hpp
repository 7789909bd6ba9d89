#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace plasmondet {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a type invariant or an operation precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Geometry is not evanescent where the formula needs an evanescent gap.
class NotEvanescent : public Error {
 public:
  using Error::Error;
};

// Iterative numerics failed (quadrature, fit, bracket search).
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved = 0.0)
      : Error(what), achieved_(achieved) {}
  // Achieved error bound or residual norm at the point of failure.
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class NoBracket : public NumericError {
 public:
  using NumericError::NumericError;
};

// Configuration file or override could not be resolved.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct ConfigIssue {
  std::string key;
  std::string message;
};

// Field-level validation failure; carries every offending key.
class ConfigValidationError : public ConfigError {
 public:
  explicit ConfigValidationError(std::vector<ConfigIssue> issues)
      : ConfigError(issues.empty() ? std::string() : issues.front().key,
                    issues.empty() ? "invalid configuration" : issues.front().message),
        issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

}  // namespace plasmondet
