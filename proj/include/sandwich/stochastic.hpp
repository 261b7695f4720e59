#pragma once

#include "sandwich/errors.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sandwich {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical tolerances shared by the kernel operations. The defaults are the
/// contract values; callers may loosen them for Monte Carlo estimates.
struct Tolerances {
  double row_sum = 1e-12;
  double reversibility = 1e-8;        // detailed-balance residual accepted by spectrum()
  double imaginary = 1e-8;            // general solver: complex-part warning threshold
  double trivial_vector = 1e-6;       // constancy check on the dropped eigenvector
  double stationary_residual = 1e-12;
  double power_tolerance = 1e-10;
  long power_max_iterations = 2'000'000;
  int jacobi_max_sweeps = 100;
  long jacobi_max_size = 256;         // larger reversible matrices use a tridiagonal QR solver
};

struct ValidationReport {
  bool square = true;
  double max_row_sum_error = 0.0;
  double min_entry = 0.0;
  std::size_t negative_entries = 0;
  bool strictly_positive = false;
  bool finite = true;
  bool valid = false;
};

/// Report-only check of row-stochasticity. Never throws.
ValidationReport validate(const Matrix& m, double row_tol = 1e-12);

/// Finite probability mass function.
class Distribution {
 public:
  explicit Distribution(Vector weights, double tol = 1e-12);

  static Distribution uniform(Eigen::Index n);
  /// Scales a nonnegative vector with positive total to sum one.
  static Distribution normalized(const Vector& unnormalized);

  const Vector& weights() const noexcept { return weights_; }
  Eigen::Index size() const noexcept { return weights_.size(); }
  double operator[](Eigen::Index i) const { return weights_(i); }
  bool strictly_positive() const { return (weights_.array() > 0.0).all(); }

 private:
  Vector weights_;
};

/// Row i is a probability vector over the column space given state i of the row space.
class ConditionalMatrix {
 public:
  explicit ConditionalMatrix(Matrix entries, double tol = 1e-12);

  Eigen::Index rows() const noexcept { return entries_.rows(); }
  Eigen::Index cols() const noexcept { return entries_.cols(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Matrix entries_;
};

/// Square row-stochastic matrix over an indexed finite state space.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix entries, double tol = 1e-12);

  /// For estimated matrices: clamps nothing, but divides each row by its sum.
  /// Rows must be nonnegative with positive totals.
  static TransitionMatrix renormalized(Matrix entries);
  static TransitionMatrix identity(Eigen::Index n);

  Eigen::Index size() const noexcept { return entries_.rows(); }
  const Matrix& entries() const noexcept { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  TransitionMatrix& set_labels(std::vector<std::string> labels);

  const std::optional<Distribution>& stationary() const noexcept { return stationary_; }
  TransitionMatrix& attach_stationary(Distribution pi);

 private:
  Matrix entries_;
  std::vector<std::string> labels_;
  std::optional<Distribution> stationary_;
};

enum class SpectrumMethod { SymmetricExact, GeneralNumeric, ClosedForm };

const char* to_string(SpectrumMethod method);

/// Eigenvalues on the mean-zero subspace, sorted descending (trivial eigenvalue 1 removed).
struct SpectrumReport {
  Vector eigenvalues;
  /// Column i is the right eigenvector for eigenvalues[i], normalized in L2(pi).
  /// Only the reversible path produces them.
  std::optional<Matrix> eigenvectors;
  SpectrumMethod method = SpectrumMethod::SymmetricExact;
  double max_imaginary = 0.0;
  bool complex_warning = false;
  /// The dropped eigenvector was not constant within tolerance (reducible chain).
  bool trivial_unverified = false;
};

}  // namespace sandwich
