#include "sandwich/kernel.hpp"

#include "sandwich/generic_linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

namespace sandwich::kernel {

namespace {

void require_same_size(const TransitionMatrix& m, const Distribution& pi, const char* op) {
  if (m.size() != pi.size()) {
    std::ostringstream os;
    os << op << ": matrix has " << m.size() << " states, distribution has " << pi.size();
    throw DimensionError(os.str());
  }
}

Vector sorted_descending(Vector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

// Weighted inner product <a, b>_pi.
double pi_dot(const Vector& a, const Vector& b, const Vector& pi) { return (a.array() * b.array() * pi.array()).sum(); }

SpectrumReport reversible_spectrum(const TransitionMatrix& m, const Distribution& pi, const Tolerances& tol) {
  SpectrumReport report;
  report.method = SpectrumMethod::SymmetricExact;
  const Vector& w = pi.weights();

  generic::ReversibleEigen<double> eig;
  if (m.size() <= tol.jacobi_max_size) {
    eig = generic::reversible_eigen<double>(m.entries(), w, tol.jacobi_max_sweeps, tol.trivial_vector);
    if (!eig.converged) throw ConvergenceError("spectrum: Jacobi sweeps exhausted", eig.values);
  } else {
    const Matrix sym = generic::similarity_symmetrize<double>(m.entries(), w);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
      throw ConvergenceError("spectrum: tridiagonal QR did not converge", Vector());
    // Eigen returns ascending order.
    const Vector values = solver.eigenvalues().reverse();
    const Matrix vectors = solver.eigenvectors().rowwise().reverse();
    eig = generic::drop_trivial<double>(values, vectors, w, tol.trivial_vector);
    eig.converged = true;
  }
  report.eigenvalues = eig.values;
  report.eigenvectors = eig.functions;
  report.trivial_unverified = !eig.trivial_ok;
  return report;
}

SpectrumReport general_spectrum(const TransitionMatrix& m, const Tolerances& tol) {
  SpectrumReport report;
  report.method = SpectrumMethod::GeneralNumeric;
  Eigen::EigenSolver<Matrix> solver(m.entries(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw ConvergenceError("spectrum: shifted QR did not converge", Vector());
  const Eigen::VectorXcd values = solver.eigenvalues();
  Eigen::Index trivial = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (std::abs(values(i) - 1.0) < std::abs(values(trivial) - 1.0)) trivial = i;
  Vector real(values.size() - 1);
  for (Eigen::Index i = 0, k = 0; i < values.size(); ++i) {
    report.max_imaginary = std::max(report.max_imaginary, std::abs(values(i).imag()));
    if (i == trivial) continue;
    real(k++) = values(i).real();
  }
  report.complex_warning = report.max_imaginary > tol.imaginary;
  report.eigenvalues = sorted_descending(real);
  return report;
}

}  // namespace

Distribution stationary_distribution(const TransitionMatrix& m, const Tolerances& tol) {
  Vector pi = generic::stationary_solve<double>(m.entries());
  if (pi.size() == 0) throw NonErgodicError("stationary distribution: singular balance system (reducible chain?)");
  if (pi.minCoeff() < -tol.stationary_residual)
    throw NonErgodicError("stationary distribution: solution has negative mass");
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  const double residual = (m.entries().transpose() * pi - pi).cwiseAbs().maxCoeff();
  if (residual > tol.stationary_residual) {
    std::ostringstream os;
    os << "stationary distribution: residual " << residual << " exceeds tolerance (ill-conditioned chain)";
    throw NonErgodicError(os.str());
  }
  return Distribution(pi, 1e-10);
}

double detailed_balance_residual(const TransitionMatrix& m, const Distribution& pi) {
  require_same_size(m, pi, "detailed_balance_residual");
  const Matrix flow = pi.weights().asDiagonal() * m.entries();
  return (flow - flow.transpose()).cwiseAbs().maxCoeff();
}

DaChains compose_da(const ConditionalMatrix& x_given_y, const ConditionalMatrix& y_given_x) {
  if (x_given_y.rows() != y_given_x.cols() || x_given_y.cols() != y_given_x.rows())
    throw DimensionError("compose_da: f_{X|Y} must be |Y|x|X| and f_{Y|X} must be |X|x|Y|");
  Matrix k = y_given_x.entries() * x_given_y.entries();
  Matrix k_hat = x_given_y.entries() * y_given_x.entries();
  return {TransitionMatrix(std::move(k)), TransitionMatrix(std::move(k_hat))};
}

SandwichChains sandwich_compose(const ConditionalMatrix& x_given_y, const TransitionMatrix& r,
                                const ConditionalMatrix& y_given_x) {
  if (x_given_y.rows() != y_given_x.cols() || x_given_y.cols() != y_given_x.rows())
    throw DimensionError("sandwich_compose: f_{X|Y} must be |Y|x|X| and f_{Y|X} must be |X|x|Y|");
  if (r.size() != x_given_y.rows()) throw DimensionError("sandwich_compose: R must act on Y");
  const Matrix ra = r.entries() * x_given_y.entries();
  Matrix k_tilde = y_given_x.entries() * ra;
  Matrix y_chain = ra * y_given_x.entries() * r.entries();
  return {TransitionMatrix(std::move(k_tilde)), TransitionMatrix(std::move(y_chain))};
}

SpectrumReport spectrum(const TransitionMatrix& m, const std::optional<Distribution>& pi, const Tolerances& tol) {
  const ValidationReport v = validate(m.entries(), tol.row_sum);
  if (!v.valid) throw InvalidStochasticError("spectrum: matrix is not row-stochastic");
  if (m.size() == 1) {
    SpectrumReport trivial;
    trivial.eigenvalues = Vector(0);
    trivial.method = pi ? SpectrumMethod::SymmetricExact : SpectrumMethod::GeneralNumeric;
    if (pi) trivial.eigenvectors = Matrix(1, 0);
    return trivial;
  }
  if (!pi) return general_spectrum(m, tol);
  require_same_size(m, *pi, "spectrum");
  if (!pi->strictly_positive()) throw NotReversibleError("spectrum: reversible path needs strictly positive pi");
  const double residual = detailed_balance_residual(m, *pi);
  if (residual > tol.reversibility) {
    std::ostringstream os;
    os << "spectrum: detailed-balance residual " << residual << " exceeds " << tol.reversibility;
    throw NotReversibleError(os.str());
  }
  return reversible_spectrum(m, *pi, tol);
}

DominantEigenvalue dominant_eigenvalue(const TransitionMatrix& m, const Tolerances& tol) {
  DominantEigenvalue out;
  const Eigen::Index n = m.size();
  if (n == 1) return out;
  const Vector pi = stationary_distribution(m, tol).weights();
  const Matrix deflated = m.entries() - Vector::Ones(n) * pi.transpose();

  // Deterministic start with no special alignment to any eigenvector.
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::sin(1.0 + 2.718281828 * static_cast<double>(i + 1));
  v.array() -= pi_dot(v, Vector::Ones(n), pi);
  v /= std::sqrt(pi_dot(v, v, pi));

  double lambda = 0.0;
  double previous_residual = 0.0;
  double ratio = 0.0;
  for (long it = 1; it <= tol.power_max_iterations; ++it) {
    Vector w = deflated * v;
    lambda = pi_dot(v, w, pi);
    const double w_norm = std::sqrt(pi_dot(w, w, pi));
    const double residual = std::sqrt(std::max(0.0, pi_dot(w - lambda * v, w - lambda * v, pi)));
    out.iterations = it;
    if (residual <= tol.power_tolerance || w_norm <= tol.power_tolerance) {
      out.value = lambda;
      out.degenerate = it > 10'000 || ratio > 0.999;
      return out;
    }
    if (previous_residual > 0.0) ratio = residual / previous_residual;
    previous_residual = residual;
    v = w / w_norm;
  }
  Vector partial(1);
  partial(0) = lambda;
  throw ConvergenceError("dominant_eigenvalue: power iteration cap reached", partial);
}

double chi_square_distance(const TransitionMatrix& m, const Distribution& pi, Eigen::Index x0, int steps) {
  require_same_size(m, pi, "chi_square_distance");
  if (steps < 1) throw std::invalid_argument("chi_square_distance: step count must be >= 1");
  if (x0 < 0 || x0 >= m.size()) throw std::out_of_range("chi_square_distance: start state out of range");
  if (!pi.strictly_positive()) throw NonErgodicError("chi_square_distance: zero stationary mass");
  return generic::chi_square_direct<double>(m.entries(), pi.weights(), x0, steps);
}

double chi_square_spectral(const SpectrumReport& report, Eigen::Index x0, int steps) {
  if (!report.eigenvectors) throw std::invalid_argument("chi_square_spectral: report has no eigenvectors");
  if (x0 < 0 || x0 >= report.eigenvectors->rows())
    throw std::out_of_range("chi_square_spectral: start state out of range");
  return generic::chi_square_spectral<double>(report.eigenvalues, *report.eigenvectors, x0, steps);
}

DominationResult domination_check(const SpectrumReport& sandwich, const SpectrumReport& da, double tol) {
  if (sandwich.eigenvalues.size() != da.eigenvalues.size())
    throw DimensionError("domination_check: spectra have different lengths");
  const Vector lhs = sorted_descending(sandwich.eigenvalues);
  const Vector rhs = sorted_descending(da.eigenvalues);
  DominationResult out;
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    if (lhs(i) > rhs(i) + tol) {
      out.dominated = false;
      out.first_violation = i;
      break;
    }
  }
  return out;
}

}  // namespace sandwich::kernel
