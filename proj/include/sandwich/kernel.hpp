#pragma once

// Finite-state Markov kernel algebra: DA and sandwich composition, spectra,
// chi-square distances and the eigenvalue domination check.

#include "sandwich/stochastic.hpp"

#include <optional>

namespace sandwich::kernel {

/// Stationary law of an irreducible chain. Throws NonErgodicError when the
/// balance system is singular or the residual ||pi M - pi||_inf exceeds
/// `tol.stationary_residual`.
Distribution stationary_distribution(const TransitionMatrix& m, const Tolerances& tol = {});

/// max_{i,j} |pi_i M_ij - pi_j M_ji|
double detailed_balance_residual(const TransitionMatrix& m, const Distribution& pi);

struct DaChains {
  TransitionMatrix k;      // on X: k = B * A
  TransitionMatrix k_hat;  // conjugate chain on Y: k_hat = A * B
};

/// `x_given_y` is |Y| x |X| (f_{X|Y}); `y_given_x` is |X| x |Y| (f_{Y|X}).
DaChains compose_da(const ConditionalMatrix& x_given_y, const ConditionalMatrix& y_given_x);

struct SandwichChains {
  TransitionMatrix k_tilde;  // on X: B * R * A
  TransitionMatrix y_chain;  // on Y: R * (A * B) * R
};

SandwichChains sandwich_compose(const ConditionalMatrix& x_given_y, const TransitionMatrix& r,
                                const ConditionalMatrix& y_given_x);

/// With `pi`: similarity-symmetrize and run the reversible solver; requires the
/// detailed-balance residual to be within `tol.reversibility`. Without `pi`:
/// Hessenberg + shifted QR, real parts reported, `complex_warning` set when an
/// imaginary part exceeds `tol.imaginary`.
SpectrumReport spectrum(const TransitionMatrix& m, const std::optional<Distribution>& pi = std::nullopt,
                        const Tolerances& tol = {});

struct DominantEigenvalue {
  double value = 0.0;
  long iterations = 0;
  /// Convergence was slow enough to suggest |lambda_1| ~ |lambda_2|.
  bool degenerate = false;
};

/// Largest eigenvalue on the mean-zero subspace by deflated power iteration.
/// Works for matrices that are only approximately reversible.
DominantEigenvalue dominant_eigenvalue(const TransitionMatrix& m, const Tolerances& tol = {});

/// sum_x' (M^n[x0][x'] - pi[x'])^2 / pi[x'] by direct powering.
double chi_square_distance(const TransitionMatrix& m, const Distribution& pi, Eigen::Index x0, int steps);

/// sum_i lambda_i^{2n} g_i(x0)^2 from a report that carries eigenvectors.
double chi_square_spectral(const SpectrumReport& report, Eigen::Index x0, int steps);

struct DominationResult {
  bool dominated = true;
  /// 0-based position of the first i with sandwich_i > da_i + tol.
  std::optional<Eigen::Index> first_violation;
};

DominationResult domination_check(const SpectrumReport& sandwich, const SpectrumReport& da, double tol);

}  // namespace sandwich::kernel
