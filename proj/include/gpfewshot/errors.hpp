#pragma once

#include <stdexcept>
#include <string>

namespace gpfewshot {

/// Precondition violation: the input is outside the stated domain of an
/// operation. Maps to CLI exit code 2.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent configuration; carries the offending key path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation failed for numerical reasons (factorization breakdown etc.).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested work exceeds a hard resource budget. Maps to CLI exit code 3.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

/// A noise-free re-observation contradicted the recorded value.
class InconsistencyError : public std::runtime_error {
 public:
  explicit InconsistencyError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace gpfewshot
