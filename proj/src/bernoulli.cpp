#include "sandwich/bernoulli.hpp"

#include "sandwich/kernel.hpp"
#include "sandwich/label_switch.hpp"
#include "sandwich/log_math.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace sandwich::bernoulli {

namespace {

constexpr int kMaxExplicitM = 12;

double logistic(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

void check_data(double rho, const std::vector<int>& z) {
  if (!(rho > 0.0 && rho < 0.5)) throw std::invalid_argument("bernoulli: rho must lie in (0, 1/2)");
  if (z.empty()) throw std::invalid_argument("bernoulli: empty data");
  if (static_cast<int>(z.size()) > kMaxExplicitM)
    throw CapExceededError("bernoulli: explicit allocation space limited to m <= 12");
  for (int zi : z)
    if (zi != 0 && zi != 1) throw std::invalid_argument("bernoulli: data must be 0/1");
}

// log of r^z (1-r)^(1-z)
double log_lik(double r, int z) { return z == 1 ? std::log(r) : std::log1p(-r); }

}  // namespace

void BernoulliConfig::validate() const {
  if (!(rho > 0.0 && rho < 0.5)) throw std::invalid_argument("bernoulli: rho must lie in (0, 1/2)");
  if (m < 1) throw std::invalid_argument("bernoulli: m must be >= 1");
  if (m1 < 0 || m1 > m) throw std::invalid_argument("bernoulli: m1 must lie in [0, m]");
}

std::array<double, 2> state_params(double rho, int state) {
  const double lo = rho;
  const double hi = 1.0 - rho;
  switch (state) {
    case 0: return {lo, lo};
    case 1: return {lo, hi};
    case 2: return {hi, lo};
    case 3: return {hi, hi};
    default: throw std::out_of_range("bernoulli: parameter state must be 0..3");
  }
}

Distribution posterior(const BernoulliConfig& config) {
  config.validate();
  std::array<double, 4> logs{};
  for (int s = 0; s < 4; ++s) {
    const auto [r, q] = state_params(config.rho, s);
    logs[s] = config.m1 * std::log(r + q) + config.m0() * std::log(2.0 - r - q);
  }
  const double total = log_sum_exp(logs);
  Vector w(4);
  for (int s = 0; s < 4; ++s) w(s) = std::exp(logs[s] - total);
  return Distribution::normalized(w);
}

double WCoefficients::w(int k) const { return std::exp(log_w.at(static_cast<std::size_t>(k))); }

WCoefficients w_coefficients(const BernoulliConfig& config) {
  config.validate();
  const double lr = std::log(config.rho);
  const double lq = std::log1p(-config.rho);
  const int m1 = config.m1;
  const int m0 = config.m0();
  std::array<LogSum, 3> sums;
  for (int i = 0; i <= m1; ++i) {
    for (int j = 0; j <= m0; ++j) {
      const double binom = log_binomial(m1, i) + log_binomial(m0, j);
      const double first = log_add(i * lr + j * lq, j * lr + i * lq);
      const double second = log_add((m1 - i) * lr + (m0 - j) * lq, (m0 - j) * lr + (m1 - i) * lq);
      const double base = binom - first - second;
      const double tilt = (m0 - j + i) * lr + (m1 - i + j) * lq;
      for (int k = 0; k < 3; ++k) sums[k].add(base + k * tilt);
    }
  }
  WCoefficients out;
  for (int k = 0; k < 3; ++k) out.log_w[k] = sums[k].value();
  return out;
}

TransitionMatrix mda_mtm(const BernoulliConfig& config) {
  const WCoefficients w = w_coefficients(config);
  const double lr = std::log(config.rho);
  const double lq = std::log1p(-config.rho);
  const double g1 = config.m1 * lr + config.m0() * lq;  // rho^m1 (1-rho)^m0
  const double g2 = config.m0() * lr + config.m1 * lq;  // rho^m0 (1-rho)^m1
  const double pow2 = config.m * std::log(2.0);
  const double both = config.m * (lr + lq);             // rho^m (1-rho)^m
  const auto& [w0, w1, w2] = w.log_w;

  Matrix k(4, 4);
  k.row(0) << std::exp(g1 - pow2 + w0), std::exp(w1 - pow2), std::exp(w1 - pow2), std::exp(g2 - pow2 + w0);
  k.row(1) << std::exp(g1 + w1), std::exp(w2), std::exp(both + w0), std::exp(g2 + w1);
  k.row(2) << std::exp(g1 + w1), std::exp(both + w0), std::exp(w2), std::exp(g2 + w1);
  k.row(3) = k.row(0);
  return TransitionMatrix(std::move(k), 1e-9);
}

TransitionMatrix fs_mtm(const BernoulliConfig& config) {
  Matrix k = mda_mtm(config).entries();
  const double mid = 0.5 * (k(1, 1) + k(1, 2));
  k(1, 1) = k(1, 2) = k(2, 1) = k(2, 2) = mid;
  return TransitionMatrix(std::move(k), 1e-9);
}

TransitionMatrix fs_mtm_sandwich(const BernoulliConfig& config) {
  config.validate();
  const std::vector<int> z = data_vector(config);
  const auto chains = kernel::sandwich_compose(params_given_allocation(config.rho, z),
                                               labels::r_matrix(config.m, 2, std::size_t{1} << kMaxExplicitM),
                                               allocation_given_params(config.rho, z));
  return chains.k_tilde;
}

ClosedFormEigen closed_form_eigenvalues(const BernoulliConfig& config) {
  const WCoefficients w = w_coefficients(config);
  const double lr = std::log(config.rho);
  const double lq = std::log1p(-config.rho);
  const double lg = log_add(config.m1 * lr + config.m0() * lq, config.m0() * lr + config.m1 * lq);
  const double pow2 = config.m * std::log(2.0);
  const auto& [w0, w1, w2] = w.log_w;

  ClosedFormEigen out;
  out.lambda1 = std::exp(w2) - std::exp(config.m * (lr + lq) + w0);
  const double gw0 = std::exp(lg + w0 - pow2);  // g w0 / 2^m
  const double gw1 = std::exp(lg + w1);         // g w1
  out.lambda2 = gw0 - gw1;
  out.lambda3 = 0.0;
  out.alpha = (gw0 - 1.0) / gw1;
  out.v1 = Vector(4);
  out.v1 << 0.0, 1.0, -1.0, 0.0;
  out.v2 = Vector(4);
  out.v2 << out.alpha, 1.0, 1.0, out.alpha;
  return out;
}

std::vector<int> data_vector(const BernoulliConfig& config) {
  config.validate();
  std::vector<int> z(static_cast<std::size_t>(config.m), 0);
  for (int i = config.m0(); i < config.m; ++i) z[static_cast<std::size_t>(i)] = 1;
  return z;
}

ConditionalMatrix params_given_allocation(double rho, const std::vector<int>& z) {
  check_data(rho, z);
  const int m = static_cast<int>(z.size());
  const std::size_t n = labels::state_count(m, 2, std::size_t{1} << kMaxExplicitM);
  const double lr = std::log(rho);
  const double lq = std::log1p(-rho);
  Matrix a(static_cast<Eigen::Index>(n), 4);
  for (std::size_t index = 0; index < n; ++index) {
    const auto y = labels::state_at(index, m, 2);
    int counts[3][2] = {};  // counts[j][k] = #{i : y_i = j, z_i = k}
    for (int i = 0; i < m; ++i) ++counts[y[static_cast<std::size_t>(i)]][z[static_cast<std::size_t>(i)]];
    // log-odds of the low value rho against 1-rho for each component
    const double odds_r = (counts[1][1] * lr + counts[1][0] * lq) - (counts[1][0] * lr + counts[1][1] * lq);
    const double odds_s = (counts[2][1] * lr + counts[2][0] * lq) - (counts[2][0] * lr + counts[2][1] * lq);
    const double r_lo = logistic(odds_r);
    const double r_hi = logistic(-odds_r);
    const double s_lo = logistic(odds_s);
    const double s_hi = logistic(-odds_s);
    const auto row = static_cast<Eigen::Index>(index);
    a(row, 0) = r_lo * s_lo;
    a(row, 1) = r_lo * s_hi;
    a(row, 2) = r_hi * s_lo;
    a(row, 3) = r_hi * s_hi;
  }
  return ConditionalMatrix(std::move(a));
}

ConditionalMatrix allocation_given_params(double rho, const std::vector<int>& z) {
  check_data(rho, z);
  const int m = static_cast<int>(z.size());
  const std::size_t n = labels::state_count(m, 2, std::size_t{1} << kMaxExplicitM);
  Matrix b(4, static_cast<Eigen::Index>(n));
  for (int state = 0; state < 4; ++state) {
    const auto [r, s] = state_params(rho, state);
    std::vector<double> first(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      const double a1 = log_lik(r, z[static_cast<std::size_t>(i)]);
      const double a2 = log_lik(s, z[static_cast<std::size_t>(i)]);
      first[static_cast<std::size_t>(i)] = logistic(a1 - a2);  // P(y_i = 1)
    }
    // Expand the product measure with the last coordinate varying fastest.
    Vector mass = Vector::Ones(1);
    for (int i = 0; i < m; ++i) {
      const double p1 = first[static_cast<std::size_t>(i)];
      Vector next(mass.size() * 2);
      for (Eigen::Index j = 0; j < mass.size(); ++j) {
        next(2 * j) = mass(j) * p1;
        next(2 * j + 1) = mass(j) * (1.0 - p1);
      }
      mass = std::move(next);
    }
    b.row(state) = mass.transpose();
  }
  return ConditionalMatrix(std::move(b));
}

Distribution allocation_posterior(double rho, const std::vector<int>& z) {
  const ConditionalMatrix b = allocation_given_params(rho, z);
  int m1 = 0;
  for (int zi : z) m1 += zi;
  const Distribution post = posterior({rho, static_cast<int>(z.size()), m1});
  return Distribution::normalized(b.entries().transpose() * post.weights());
}

Distribution allocation_posterior(double rho, const std::vector<int>& z, int k) {
  check_data(rho, z);
  if (k < 1) throw std::invalid_argument("allocation_posterior: k must be >= 1");
  const int m = static_cast<int>(z.size());
  const std::size_t n = labels::state_count(m, k);
  const double lr = std::log(rho);
  const double lq = std::log1p(-rho);
  Vector logs(static_cast<Eigen::Index>(n));
  std::vector<std::array<int, 2>> counts(static_cast<std::size_t>(k));
  for (std::size_t index = 0; index < n; ++index) {
    const auto y = labels::state_at(index, m, k);
    std::fill(counts.begin(), counts.end(), std::array<int, 2>{0, 0});
    for (std::size_t i = 0; i < z.size(); ++i)
      ++counts[static_cast<std::size_t>(y[i] - 1)][static_cast<std::size_t>(z[i])];
    double total = 0.0;
    for (const auto& c : counts) total += log_add(c[1] * lr + c[0] * lq, c[1] * lq + c[0] * lr);
    logs(static_cast<Eigen::Index>(index)) = total;
  }
  const double norm = log_sum_exp(std::span<const double>(logs.data(), static_cast<std::size_t>(logs.size())));
  return Distribution::normalized((logs.array() - norm).exp().matrix());
}

TransitionMatrix conjugate_mtm(const BernoulliConfig& config, const std::vector<int>& z) {
  config.validate();
  if (static_cast<int>(z.size()) != config.m) throw DimensionError("conjugate_mtm: data length differs from m");
  int m1 = 0;
  for (int zi : z) m1 += zi;
  if (m1 != config.m1) throw std::invalid_argument("conjugate_mtm: data success count differs from m1");
  return kernel::compose_da(params_given_allocation(config.rho, z), allocation_given_params(config.rho, z)).k_hat;
}

Matrix SpecialMtm::matrix() const {
  Matrix m(4, 4);
  m << a, b, b, c,  //
      d, e, f, c * d / a,  //
      d, f, e, c * d / a,  //
      a, b, b, c;
  return m;
}

void SpecialMtm::validate(double tol) const {
  if (!(a > 0 && b > 0 && c > 0 && d > 0 && e > 0 && f > 0))
    throw std::invalid_argument("special matrix: entries must be strictly positive");
  if (std::abs(a + 2 * b + c - 1.0) > tol) throw std::invalid_argument("special matrix: a + 2b + c != 1");
  if (std::abs(d + e + f + c * d / a - 1.0) > tol) throw std::invalid_argument("special matrix: d + e + f + cd/a != 1");
}

SpecialMtm SpecialMtm::from_matrix(const Matrix& m, double tol) {
  if (m.rows() != 4 || m.cols() != 4) throw DimensionError("special matrix: must be 4x4");
  SpecialMtm s{m(0, 0), m(0, 1), m(0, 3), m(1, 0), m(1, 1), m(1, 2)};
  const Matrix rebuilt = s.matrix();
  if ((rebuilt - m).cwiseAbs().maxCoeff() > tol) throw std::invalid_argument("special matrix: pattern mismatch");
  return s;
}

SpecialAnalysis analyze_special_mtm(const SpecialMtm& sp) {
  sp.validate();
  const auto& [a, b, c, d, e, f] = sp;
  const double pi1 = a * d / (a * d + 2 * a * b + c * d);
  Vector pi(4);
  pi << pi1, b * pi1 / d, b * pi1 / d, c * pi1 / a;

  SpecialAnalysis out{Distribution::normalized(pi), {}, a * (a + c - 1.0) / (d * (a + c))};
  out.solutions[0] = {1.0, Vector::Ones(4)};
  Vector v1(4);
  v1 << 0.0, 1.0, -1.0, 0.0;
  out.solutions[1] = {e - f, v1};
  Vector v2(4);
  v2 << out.alpha, 1.0, 1.0, out.alpha;
  out.solutions[2] = {(a + c) * (a - d) / a, v2};
  Vector v3(4);
  v3 << c, 0.0, 0.0, -a;
  out.solutions[3] = {0.0, v3};
  return out;
}

std::vector<SweepRow> eigenvalue_sweep(const std::vector<double>& rhos, const std::vector<int>& ms, Chain chain,
                                       std::optional<int> m1_override) {
  std::vector<SweepRow> rows;
  rows.reserve(rhos.size() * ms.size());
  for (double rho : rhos) {
    for (int m : ms) {
      if (!m1_override && m % 2 != 0)
        throw std::invalid_argument("eigenvalue_sweep: odd m needs an explicit m1 (50:50 split undefined)");
      const BernoulliConfig config{rho, m, m1_override.value_or(m / 2)};
      const ClosedFormEigen eig = closed_form_eigenvalues(config);
      rows.push_back({rho, m, config.m1, chain, chain == Chain::MDA ? eig.lambda1 : eig.lambda2});
    }
  }
  return rows;
}

}  // namespace sandwich::bernoulli
