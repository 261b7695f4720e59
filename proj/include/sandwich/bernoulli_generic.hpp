#pragma once

// Scalar-generic versions of the 4-state Bernoulli posterior and DA matrix, by
// direct (not log-space) arithmetic. Meant for extended-precision types on
// moderate m; the double routines in bernoulli.hpp stay stable for large m.

#include "sandwich/generic_linalg.hpp"

#include <array>

namespace sandwich::bernoulli::generic {

using sandwich::generic::DenseMatrix;
using sandwich::generic::DenseVector;

template <class Scalar>
Scalar binomial(int n, int k) {
  Scalar out = 1;
  for (int i = 1; i <= k; ++i) out = out * Scalar(n - k + i) / Scalar(i);
  return out;
}

template <class Scalar>
Scalar ipow(const Scalar& x, int n) {
  Scalar out = 1;
  for (int i = 0; i < n; ++i) out *= x;
  return out;
}

/// Posterior over (r, s) in the order of state_params.
template <class Scalar>
DenseVector<Scalar> posterior(const Scalar& rho, int m, int m1) {
  const int m0 = m - m1;
  const Scalar q = 1 - rho;
  const Scalar lo[4] = {rho, rho, q, q};
  const Scalar hi[4] = {rho, q, rho, q};
  DenseVector<Scalar> w(4);
  for (int s = 0; s < 4; ++s) w(s) = ipow<Scalar>(lo[s] + hi[s], m1) * ipow<Scalar>(2 - lo[s] - hi[s], m0);
  return w / w.sum();
}

/// w_k = sum_{i,j} C(m1,i) C(m0,j) t^k / (first * second), k = 0, 1, 2.
template <class Scalar>
std::array<Scalar, 3> w_coefficients(const Scalar& rho, int m, int m1) {
  const int m0 = m - m1;
  const Scalar q = 1 - rho;
  std::array<Scalar, 3> w{Scalar(0), Scalar(0), Scalar(0)};
  for (int i = 0; i <= m1; ++i) {
    for (int j = 0; j <= m0; ++j) {
      const Scalar binom = binomial<Scalar>(m1, i) * binomial<Scalar>(m0, j);
      const Scalar first = ipow(rho, i) * ipow(q, j) + ipow(rho, j) * ipow(q, i);
      const Scalar second = ipow(rho, m1 - i) * ipow(q, m0 - j) + ipow(rho, m0 - j) * ipow(q, m1 - i);
      const Scalar base = binom / (first * second);
      const Scalar tilt = ipow(rho, m0 - j + i) * ipow(q, m1 - i + j);
      w[0] += base;
      w[1] += base * tilt;
      w[2] += base * tilt * tilt;
    }
  }
  return w;
}

/// The 4x4 DA transition matrix, same layout as mda_mtm.
template <class Scalar>
DenseMatrix<Scalar> mda_matrix(const Scalar& rho, int m, int m1) {
  const int m0 = m - m1;
  const Scalar q = 1 - rho;
  const auto w = w_coefficients<Scalar>(rho, m, m1);
  const Scalar g1 = ipow(rho, m1) * ipow(q, m0);
  const Scalar g2 = ipow(rho, m0) * ipow(q, m1);
  const Scalar pow2 = ipow(Scalar(2), m);
  const Scalar both = ipow(rho * q, m);
  DenseMatrix<Scalar> k(4, 4);
  k(0, 0) = g1 * w[0] / pow2;
  k(0, 1) = k(0, 2) = w[1] / pow2;
  k(0, 3) = g2 * w[0] / pow2;
  k(1, 0) = k(2, 0) = g1 * w[1];
  k(1, 1) = k(2, 2) = w[2];
  k(1, 2) = k(2, 1) = both * w[0];
  k(1, 3) = k(2, 3) = g2 * w[1];
  k.row(3) = k.row(0);
  return k;
}

}  // namespace sandwich::bernoulli::generic
