#pragma once

#include <stdexcept>
#include <string>

namespace hpa {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A conditional state was requested for a branch of (near) zero probability.
class EmptyBranch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The heralding probability vanishes (e.g. tau = t = 1).
class DegenerateHeralding : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfiniteDistance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Estimator inputs that cannot come from a physical state (e.g. F > 1).
class InconsistentInputs : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleConstraint : public std::runtime_error {
 public:
  InfeasibleConstraint(const std::string& what, double max_achievable)
      : std::runtime_error(what), max_achievable_(max_achievable) {}
  double max_achievable() const { return max_achievable_; }

 private:
  double max_achievable_;
};

}  // namespace hpa
