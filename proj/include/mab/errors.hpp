#pragma once

#include <stdexcept>
#include <string>

namespace mab {

/// Inputs violate a parameter admissibility condition (bad growth constants,
/// k out of range, mismatched array lengths, ...).
class ParamDomainError : public std::invalid_argument {
 public:
  explicit ParamDomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A point is outside the geometric domain an operation requires
/// (exterior query point, barrier bracket nonpositive, z >= 0, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// A boundary frame could not be erected (degenerate normal).
class FrameError : public std::runtime_error {
 public:
  explicit FrameError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The analytic determinant bound is unavailable (tau1 <= 0 at this epsilon).
class BoundUnavailableError : public std::runtime_error {
 public:
  explicit BoundUnavailableError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A parameter search (epsilon ladder / M doubling) was exhausted.
class SearchFailure : public std::runtime_error {
 public:
  explicit SearchFailure(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iterative solve hit its iteration limit before meeting tolerance.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& msg) : std::runtime_error(msg) {}
};

/// Not enough data for a statistical operation (rate fit).
class InsufficientDataError : public std::runtime_error {
 public:
  explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed run configuration or missing referenced files.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mab
