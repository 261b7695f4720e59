#pragma once

#include "sandwich/random.hpp"
#include "sandwich/stochastic.hpp"

#include <cmath>

namespace testing {

using sandwich::Matrix;
using sandwich::Vector;

// Metropolis chain for a random positive target over n states with a random
// symmetric proposal; reversible w.r.t. `target` by construction.
inline Matrix random_reversible(Eigen::Index n, sandwich::Rng& rng, Vector& target) {
  target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) target(i) = 0.1 + rng.uniform();
  target /= target.sum();
  // Symmetric proposal scaled so every row has some holding mass.
  Matrix q(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) q(i, j) = q(j, i) = 0.5 + rng.uniform();
  const double scale = q.rowwise().sum().maxCoeff() * 1.01;
  q /= scale;
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) m(i, j) = q(i, j) * std::min(1.0, target(j) / target(i));
    m(i, i) = 1.0 - m.row(i).sum();
  }
  return m;
}

// M^n by repeated multiplication.
inline Matrix matrix_power(const Matrix& m, int n) {
  Matrix out = Matrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) out = out * m;
  return out;
}

}  // namespace testing
