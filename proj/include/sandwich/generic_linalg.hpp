#pragma once

// Scalar-generic dense routines. Instantiated with double by the kernel and with
// boost::multiprecision floats where double cannot resolve the quantity (tiny
// chi-square distances late in a run).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace sandwich::generic {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
struct SymmetricEigen {
  DenseVector<Scalar> values;   // descending
  DenseMatrix<Scalar> vectors;  // column i belongs to values[i]
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic Jacobi for a symmetric matrix. Only the upper triangle is trusted;
/// the caller symmetrizes beforehand. Stops once the off-diagonal Frobenius
/// mass falls below eps * ||A||_F.
template <class Scalar>
SymmetricEigen<Scalar> jacobi_eigen(DenseMatrix<Scalar> a, int max_sweeps = 100) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = a.rows();
  DenseMatrix<Scalar> v = DenseMatrix<Scalar>::Identity(n, n);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar norm2 = a.squaredNorm();
  const Scalar threshold = eps * eps * norm2;

  SymmetricEigen<Scalar> out;
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    Scalar off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= threshold) {
      out.converged = true;
      out.sweeps = sweep;
      break;
    }
    if (sweep == max_sweeps) {
      out.sweeps = sweep;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == 0) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
        Scalar t = 1 / (abs(theta) + sqrt(theta * theta + 1));
        if (theta < 0) t = -t;
        const Scalar c = 1 / sqrt(t * t + 1);
        const Scalar s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[i], order[i]);
    out.vectors.col(i) = v.col(order[i]);
  }
  return out;
}

/// Solves pi M = pi, sum(pi) = 1 by replacing one balance equation with the
/// normalization. Returns an empty vector when a pivot falls below `min_pivot`
/// relative to the largest one.
template <class Scalar>
DenseVector<Scalar> stationary_solve(const DenseMatrix<Scalar>& m, double min_pivot = 1e-14) {
  const Eigen::Index n = m.rows();
  DenseMatrix<Scalar> system = m.transpose() - DenseMatrix<Scalar>::Identity(n, n);
  system.row(n - 1).setOnes();
  DenseVector<Scalar> rhs = DenseVector<Scalar>::Zero(n);
  rhs(n - 1) = 1;
  Eigen::FullPivLU<DenseMatrix<Scalar>> lu(system);
  lu.setThreshold(Scalar(min_pivot));
  if (!lu.isInvertible()) return {};
  DenseVector<Scalar> pi = lu.solve(rhs);
  // one step of iterative refinement
  const DenseVector<Scalar> residual = rhs - system * pi;
  pi += lu.solve(residual);
  return pi;
}

/// Sum over x' of (M^n[x0][x'] - pi[x'])^2 / pi[x'], by propagating the row e_x0^T M^t.
template <class Scalar>
Scalar chi_square_direct(const DenseMatrix<Scalar>& m, const DenseVector<Scalar>& pi,
                         Eigen::Index x0, int steps) {
  DenseVector<Scalar> row = DenseVector<Scalar>::Zero(m.rows());
  row(x0) = 1;
  for (int t = 0; t < steps; ++t) row = (row.transpose() * m).transpose();
  Scalar total = 0;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    const Scalar d = row(j) - pi(j);
    total += d * d / pi(j);
  }
  return total;
}

/// Sum_i lambda_i^{2n} g_i(x0)^2 for eigenfunctions g_i orthonormal in L2(pi).
template <class Scalar>
Scalar chi_square_spectral(const DenseVector<Scalar>& values, const DenseMatrix<Scalar>& functions,
                           Eigen::Index x0, int steps) {
  using std::pow;
  Scalar total = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Scalar g = functions(x0, i);
    total += pow(values(i), 2 * steps) * g * g;
  }
  return total;
}

/// Symmetrizes a matrix reversible w.r.t. pi: S = D^{1/2} M D^{-1/2}, averaged with S^T.
template <class Scalar>
DenseMatrix<Scalar> similarity_symmetrize(const DenseMatrix<Scalar>& m, const DenseVector<Scalar>& pi) {
  using std::sqrt;
  const Eigen::Index n = m.rows();
  DenseVector<Scalar> root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = sqrt(pi(i));
  DenseMatrix<Scalar> s(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) s(i, j) = root(i) * m(i, j) / root(j);
  DenseMatrix<Scalar> sym = (s + s.transpose()) / Scalar(2);
  return sym;
}

/// Eigen-decomposition of a pi-reversible matrix with the trivial eigenvalue dropped:
/// returns the remaining eigenvalues (descending) and their eigenfunctions
/// normalized in L2(pi). `trivial_ok` reports whether the dropped vector was
/// sqrt(pi) up to `vector_tol`.
template <class Scalar>
struct ReversibleEigen {
  DenseVector<Scalar> values;
  DenseMatrix<Scalar> functions;
  bool converged = false;
  bool trivial_ok = false;
  Eigen::Index dropped = -1;
};

template <class Scalar>
ReversibleEigen<Scalar> drop_trivial(const DenseVector<Scalar>& values, const DenseMatrix<Scalar>& vectors,
                                     const DenseVector<Scalar>& pi, double vector_tol) {
  using std::abs;
  using std::sqrt;
  const Eigen::Index n = values.size();
  DenseVector<Scalar> root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = sqrt(pi(i));
  root /= root.norm();

  // Among eigenvalues numerically equal to the one nearest 1, prefer the
  // vector best aligned with sqrt(pi); reducible chains have several.
  Eigen::Index nearest = 0;
  for (Eigen::Index i = 1; i < n; ++i)
    if (abs(values(i) - 1) < abs(values(nearest) - 1)) nearest = i;
  Eigen::Index best = nearest;
  Scalar best_align = abs(vectors.col(nearest).dot(root));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == nearest || abs(values(i) - values(nearest)) > Scalar(1e-10)) continue;
    const Scalar align = abs(vectors.col(i).dot(root));
    if (align > best_align) {
      best = i;
      best_align = align;
    }
  }

  ReversibleEigen<Scalar> out;
  out.dropped = best;
  {
    const Scalar sign = vectors.col(best).dot(root) < 0 ? Scalar(-1) : Scalar(1);
    Scalar deviation = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const Scalar d = abs(vectors(r, best) - sign * root(r));
      if (d > deviation) deviation = d;
    }
    out.trivial_ok = deviation <= Scalar(vector_tol);
  }
  out.values.resize(n - 1);
  out.functions.resize(n, n - 1);
  for (Eigen::Index i = 0, k = 0; i < n; ++i) {
    if (i == best) continue;
    out.values(k) = values(i);
    for (Eigen::Index r = 0; r < n; ++r) out.functions(r, k) = vectors(r, i) / sqrt(pi(r));
    ++k;
  }
  return out;
}

template <class Scalar>
ReversibleEigen<Scalar> reversible_eigen(const DenseMatrix<Scalar>& m, const DenseVector<Scalar>& pi,
                                         int max_sweeps = 100, double vector_tol = 1e-6) {
  const auto eig = jacobi_eigen<Scalar>(similarity_symmetrize<Scalar>(m, pi), max_sweeps);
  auto out = drop_trivial<Scalar>(eig.values, eig.vectors, pi, vector_tol);
  out.converged = eig.converged;
  return out;
}

}  // namespace sandwich::generic
