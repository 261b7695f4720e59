#pragma once

// Two-component Bernoulli mixture with known weights 1/2 and success
// probabilities restricted to {rho, 1-rho}. The parameter space has four points,
// ordered (rho,rho), (rho,1-rho), (1-rho,rho), (1-rho,1-rho); the allocation
// space is {1,2}^m indexed as in labels::index_of.

#include "sandwich/chain.hpp"
#include "sandwich/stochastic.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sandwich::bernoulli {

struct BernoulliConfig {
  double rho = 0.1;
  int m = 10;
  int m1 = 5;  // number of successes

  int m0() const noexcept { return m - m1; }
  /// Throws std::invalid_argument unless 0 < rho < 1/2, m >= 1 and 0 <= m1 <= m.
  void validate() const;
};

/// (r, s) of parameter state 0..3.
std::array<double, 2> state_params(double rho, int state);

/// pi(r, s | z), computed in log space.
Distribution posterior(const BernoulliConfig& config);

/// log w_0, log w_1, log w_2. Each w_k is a positive double sum, accumulated by
/// log-sum-exp so that large m does not underflow.
struct WCoefficients {
  std::array<double, 3> log_w{};
  double w(int k) const;
};
WCoefficients w_coefficients(const BernoulliConfig& config);

/// The 4x4 MDA transition matrix assembled from the w coefficients.
TransitionMatrix mda_mtm(const BernoulliConfig& config);
/// The 4x4 FS matrix: the MDA matrix with the (2,2),(2,3) and (3,2),(3,3)
/// entries each replaced by their pair average.
TransitionMatrix fs_mtm(const BernoulliConfig& config);
/// The FS matrix built the long way: sandwich of the explicit conditionals
/// around the coin-flip relabeling kernel. m <= 12.
TransitionMatrix fs_mtm_sandwich(const BernoulliConfig& config);

struct ClosedFormEigen {
  double lambda1 = 0.0;  // eigenvector v1 = (0, 1, -1, 0)
  double lambda2 = 0.0;  // eigenvector v2 = (alpha, 1, 1, alpha)
  double lambda3 = 0.0;
  double alpha = 0.0;
  Vector v1;
  Vector v2;
};
ClosedFormEigen closed_form_eigenvalues(const BernoulliConfig& config);

/// Data with m0 zeros followed by m1 ones; the 4x4 chain depends only on m1.
std::vector<int> data_vector(const BernoulliConfig& config);

/// f_{X|Y}: row y holds pi(r, s | y, z), |Y| x 4.
ConditionalMatrix params_given_allocation(double rho, const std::vector<int>& z);
/// f_{Y|X}: row (r, s) holds pi(y | r, s, z), 4 x |Y|.
ConditionalMatrix allocation_given_params(double rho, const std::vector<int>& z);
/// pi(y | z) = sum over (r, s) of pi(y | r, s, z) pi(r, s | z).
Distribution allocation_posterior(double rho, const std::vector<int>& z);
/// The same model with k equally weighted components, each success probability
/// drawn independently and uniformly from {rho, 1 - rho}:
/// pi(y | z) proportional to prod_j sum_r r^{n_j1} (1 - r)^{n_j0}. Invariant under relabeling.
Distribution allocation_posterior(double rho, const std::vector<int>& z, int k);

/// Conjugate chain on Y: k_hat(y'|y) = sum_{(r,s)} pi(y'|r,s,z) pi(r,s|y,z). m <= 12.
TransitionMatrix conjugate_mtm(const BernoulliConfig& config, const std::vector<int>& z);

/// 4x4 matrix with rows (a,b,b,c), (d,e,f,cd/a), (d,f,e,cd/a), (a,b,b,c).
struct SpecialMtm {
  double a, b, c, d, e, f;

  Matrix matrix() const;
  /// Throws std::invalid_argument unless every entry is positive and both row sums are 1.
  void validate(double tol = 1e-12) const;
  /// Reads (a..f) off a matrix that has the special pattern (within `tol`).
  static SpecialMtm from_matrix(const Matrix& m, double tol = 1e-12);
};

struct EigenSolution {
  double value = 0.0;
  Vector vector;
};

struct SpecialAnalysis {
  Distribution stationary;
  /// (1, ones), (e-f, v1), ((a+c)(a-d)/a, v2), (0, (c,0,0,-a)).
  std::array<EigenSolution, 4> solutions;
  double alpha = 0.0;
};
SpecialAnalysis analyze_special_mtm(const SpecialMtm& special);

struct SweepRow {
  double rho = 0.0;
  int m = 0;
  int m1 = 0;
  Chain chain = Chain::MDA;
  double dominant = 0.0;
};

/// Dominant eigenvalue over a (rho, m) grid from the closed forms: lambda_1 for
/// MDA, lambda_2 for FS. Without `m1_override` every m must be even and m1 = m/2.
std::vector<SweepRow> eigenvalue_sweep(const std::vector<double>& rhos, const std::vector<int>& ms, Chain chain,
                                       std::optional<int> m1_override = std::nullopt);

}  // namespace sandwich::bernoulli
