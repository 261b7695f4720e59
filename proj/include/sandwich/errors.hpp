#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace sandwich {

/// Mismatched operand shapes (matrix products, distributions of the wrong length, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A matrix or distribution that breaks its stochasticity invariants.
class InvalidStochasticError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// spectrum() was handed a distribution the matrix is not reversible against.
class NotReversibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Stationary distribution not unique: the chain is reducible or numerically singular.
class NonErgodicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration or dense allocation would exceed a configured size cap.
class CapExceededError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Both mixture component densities vanish (or are NaN) at an observation.
class DegeneratePointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative eigen-solver hit its iteration cap. Carries whatever estimate it had.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const Eigen::VectorXd& partial() const noexcept { return partial_; }

 private:
  Eigen::VectorXd partial_;
};

}  // namespace sandwich
