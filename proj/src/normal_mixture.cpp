#include "sandwich/normal_mixture.hpp"

#include "sandwich/kernel.hpp"
#include "sandwich/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sandwich::normal {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log of the weighted normal density term w * N(z; mu, tau2)
double log_term(double weight, double z, double mu, double tau2) {
  const double d = z - mu;
  return std::log(weight) - 0.5 * std::log(tau2) - kLogSqrt2Pi - 0.5 * d * d / tau2;
}

// log P(y_i = 1) and log P(y_i = 2)
std::array<double, 2> log_allocation(double z, const MixtureParams& params) {
  const double l1 = log_term(params.p, z, params.mu[0], params.tau2[0]);
  const double l2 = log_term(1.0 - params.p, z, params.mu[1], params.tau2[1]);
  if (std::isnan(l1) || std::isnan(l2) || (std::isinf(l1) && std::isinf(l2))) {
    std::ostringstream os;
    os << "allocation probability undefined at z = " << z;
    throw DegeneratePointError(os.str());
  }
  const double d = l1 - l2;
  // log logistic(d) and log logistic(-d)
  const double lo = d >= 0 ? -std::log1p(std::exp(-d)) : d - std::log1p(std::exp(d));
  const double hi = d >= 0 ? -d - std::log1p(std::exp(-d)) : -std::log1p(std::exp(d));
  return {lo, hi};
}

void require_k2(const labels::AllocationState& y, const NormalMixtureProblem& problem) {
  if (y.k() != 2) throw DimensionError("normal mixture: allocations must have k = 2");
  if (y.m() != problem.m()) throw DimensionError("normal mixture: allocation length differs from data length");
}

// out[index_of(y)] = prod_i P(y_i); `out` is resized to 2^m.
void expand_masses(const NormalMixtureProblem& problem, const MixtureParams& params, Vector& out) {
  const int m = problem.m();
  out.resize(Eigen::Index{1} << m);
  out(0) = 1.0;
  Eigen::Index filled = 1;
  for (int i = 0; i < m; ++i) {
    const auto [lo, hi] = log_allocation(problem.data()[static_cast<std::size_t>(i)], params);
    const double q1 = std::exp(lo);
    const double q2 = std::exp(hi);
    // Walk backwards so each source entry is read before it is overwritten.
    for (Eigen::Index j = filled - 1; j >= 0; --j) {
      const double base = out(j);
      out(2 * j) = base * q1;
      out(2 * j + 1) = base * q2;
    }
    filled *= 2;
  }
}

// Label flip on the index: every digit 1 <-> 2, i.e. index -> 2^m - 1 - index.
void orbit_average(Vector& v) {
  const Eigen::Index n = v.size();
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const double mean = 0.5 * (v(i) + v(n - 1 - i));
    v(i) = v(n - 1 - i) = mean;
  }
}

}  // namespace

NormalMixtureProblem::NormalMixtureProblem(std::vector<double> z) : z_(std::move(z)) {
  if (z_.empty()) throw std::invalid_argument("normal mixture: need at least one observation");
  for (double v : z_)
    if (!std::isfinite(v)) throw std::invalid_argument("normal mixture: non-finite observation");
}

NormalMixtureProblem NormalMixtureProblem::prefix(int m) const {
  if (m < 1 || m > this->m()) throw std::out_of_range("normal mixture: prefix length out of range");
  return NormalMixtureProblem(std::vector<double>(z_.begin(), z_.begin() + m));
}

void MixtureParams::validate() const {
  for (double t : tau2)
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("mixture params: tau2 must be positive");
  for (double u : mu)
    if (!std::isfinite(u)) throw std::invalid_argument("mixture params: mu must be finite");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mixture params: p must lie in [0, 1]");
}

MixtureParams sample_prior(Rng& rng) {
  MixtureParams out;
  out.p = rng.uniform();
  for (int j = 0; j < 2; ++j) {
    out.tau2[j] = rng.inverse_gamma(kPriorShape, kPriorScale);
    out.mu[j] = rng.normal(0.0, std::sqrt(out.tau2[j]));
  }
  return out;
}

double allocation_probability(double z_i, const MixtureParams& params) {
  params.validate();
  if (!std::isfinite(z_i)) throw DegeneratePointError("allocation probability: non-finite observation");
  return std::exp(log_allocation(z_i, params)[0]);
}

labels::AllocationState sample_allocations(const NormalMixtureProblem& problem, const MixtureParams& params,
                                           Rng& rng) {
  params.validate();
  std::vector<int> y(problem.data().size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double q = std::exp(log_allocation(problem.data()[i], params)[0]);
    y[i] = rng.uniform() < q ? 1 : 2;
  }
  return labels::AllocationState(std::move(y), 2);
}

MixtureParams sample_params(const NormalMixtureProblem& problem, const labels::AllocationState& y, Rng& rng) {
  require_k2(y, problem);
  std::array<double, 2> count{0.0, 0.0};
  std::array<double, 2> sum{0.0, 0.0};
  const auto& z = problem.data();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto j = static_cast<std::size_t>(y[i] - 1);
    count[j] += 1.0;
    sum[j] += z[i];
  }
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 2> ss{0.0, 0.0};
  for (std::size_t j = 0; j < 2; ++j)
    if (count[j] > 0) mean[j] = sum[j] / count[j];
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto j = static_cast<std::size_t>(y[i] - 1);
    const double d = z[i] - mean[j];
    ss[j] += d * d;
  }

  MixtureParams out;
  out.p = rng.beta(count[0] + 1.0, count[1] + 1.0);
  for (std::size_t j = 0; j < 2; ++j) {
    const double c = count[j];
    const double shape = (c + 4.0) / 2.0;
    const double scale = (ss[j] + c * mean[j] * mean[j] / (c + 1.0) + 1.0) / 2.0;
    out.tau2[j] = rng.inverse_gamma(shape, scale);
    out.mu[j] = rng.normal(c * mean[j] / (c + 1.0), std::sqrt(out.tau2[j] / (c + 1.0)));
  }
  return out;
}

double y_mass_mda(const labels::AllocationState& y, const NormalMixtureProblem& problem,
                  const MixtureParams& params) {
  require_k2(y, problem);
  params.validate();
  double log_mass = 0.0;
  for (std::size_t i = 0; i < problem.data().size(); ++i)
    log_mass += log_allocation(problem.data()[i], params)[static_cast<std::size_t>(y[i] - 1)];
  return std::exp(log_mass);
}

double y_mass_fs(const labels::AllocationState& y, const NormalMixtureProblem& problem,
                 const MixtureParams& params) {
  require_k2(y, problem);
  const auto flip = labels::apply_permutation(labels::Permutation({2, 1}), y);
  return 0.5 * (y_mass_mda(y, problem, params) + y_mass_mda(flip, problem, params));
}

Vector y_masses(const NormalMixtureProblem& problem, const MixtureParams& params, Chain variant) {
  if (problem.m() > kMaxMatrixM) throw CapExceededError("normal mixture: allocation space limited to m <= 12");
  params.validate();
  Vector out;
  expand_masses(problem, params, out);
  if (variant == Chain::FS) orbit_average(out);
  return out;
}

void EstimationSettings::validate() const {
  if (samples_per_row < 1) throw std::invalid_argument("estimation: samples per row must be >= 1");
}

TransitionMatrix estimate_conjugate_matrix(const NormalMixtureProblem& problem, const EstimationSettings& settings) {
  settings.validate();
  if (problem.m() > kMaxMatrixM) throw CapExceededError("normal mixture: allocation space limited to m <= 12");
  const int m = problem.m();
  const auto n = static_cast<Eigen::Index>(labels::state_count(m, 2));
  const bool fs = settings.variant == Chain::FS;
  Matrix rows = Matrix::Zero(n, n);

  parallel_for(static_cast<std::size_t>(n), resolve_threads(settings.threads), [&](std::size_t row) {
    Rng rng = Rng::stream(settings.seed, row, fs ? 1 : 0);
    const labels::AllocationState y = labels::state_at(row, m, 2);
    Vector acc = Vector::Zero(n);
    Vector masses;
    for (long s = 0; s < settings.samples_per_row; ++s) {
      const MixtureParams params = fs ? sample_params(problem, labels::r_sample(y, rng), rng)
                                      : sample_params(problem, y, rng);
      expand_masses(problem, params, masses);
      acc += masses;
    }
    // The orbit average is linear, so it can be applied once to the sum.
    if (fs) orbit_average(acc);
    rows.row(static_cast<Eigen::Index>(row)) = acc.transpose() / static_cast<double>(settings.samples_per_row);
  });
  return TransitionMatrix::renormalized(std::move(rows));
}

std::vector<CurvePoint> dominant_eigenvalue_curve(const NormalMixtureProblem& full, EstimationSettings settings,
                                                  std::vector<int> ms, std::vector<Chain> variants) {
  if (ms.empty())
    for (int m = 1; m <= full.m(); ++m) ms.push_back(m);
  Tolerances tol;
  tol.stationary_residual = 1e-9;
  std::vector<CurvePoint> out;
  for (int m : ms) {
    const NormalMixtureProblem problem = full.prefix(m);
    for (Chain variant : variants) {
      settings.variant = variant;
      const TransitionMatrix k = estimate_conjugate_matrix(problem, settings);
      const auto dominant = kernel::dominant_eigenvalue(k, tol);
      out.push_back({m, variant, dominant.value, settings.seed, settings.samples_per_row, dominant.degenerate});
    }
  }
  return out;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points) {
  const auto precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "m,variant,lambda_hat,seed,N\n";
  for (const auto& p : points)
    os << p.m << ',' << to_string(p.variant) << ',' << p.lambda_hat << ',' << p.seed << ',' << p.samples_per_row
       << '\n';
  os.precision(precision);
}

const std::vector<double>& example_dataset(int which) {
  static const std::vector<double> first{0.2519, 2.529, -0.2930, 2.799, 3.397,
                                         0.5596, 2.810, 2.541,   2.487, -0.1937};
  static const std::vector<double> second{0.6699, 3.408,  0.1093, 3.289,   -0.1407,
                                          3.525,  2.454, 0.2716, -0.7443, 3.570};
  if (which == 1) return first;
  if (which == 2) return second;
  throw std::out_of_range("example_dataset: choose 1 or 2");
}

}  // namespace sandwich::normal
