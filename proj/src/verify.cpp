#include "sandwich/verify.hpp"

#include "sandwich/bernoulli.hpp"
#include "sandwich/chain_sim.hpp"
#include "sandwich/kernel.hpp"
#include "sandwich/label_switch.hpp"
#include "sandwich/log_math.hpp"
#include "sandwich/normal_mixture.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sandwich::verify {

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

Outcome check(bool ok, const std::string& detail) { return {ok, detail}; }

// lambda2 = g w0 / 2^m - g w1, with the sign of the second term selectable.
double lambda2_formula(const bernoulli::BernoulliConfig& config, double sign) {
  const auto w = bernoulli::w_coefficients(config);
  const double lr = std::log(config.rho);
  const double lq = std::log1p(-config.rho);
  const double lg = log_add(config.m1 * lr + config.m0() * lq, config.m0() * lr + config.m1 * lq);
  return std::exp(lg + w.log_w[0] - config.m * std::log(2.0)) - sign * std::exp(lg + w.log_w[1]);
}

Outcome posterior_masses() {
  const Vector post = bernoulli::posterior({0.1, 10, 5}).weights();
  Vector expected(4);
  expected << 0.003, 0.497, 0.497, 0.003;
  const double err = (post - expected).cwiseAbs().maxCoeff();
  return check(err <= 5e-4, "max error " + fmt(err));
}

Outcome mda_matrix_entries() {
  const Matrix k = bernoulli::mda_mtm({0.1, 10, 5}).entries();
  Matrix expected(4, 4);
  expected << 0.10138, 0.39862, 0.39862, 0.10138,  //
      0.00241, 0.99457, 0.00061, 0.00241,          //
      0.00241, 0.00061, 0.99457, 0.00241,          //
      0.10138, 0.39862, 0.39862, 0.10138;
  const double err = (k - expected).cwiseAbs().maxCoeff();
  return check(err <= 5e-6, "max entry error " + fmt(err));
}

Outcome closed_form_vs_numeric(Mutation mutation) {
  const double sign = mutation == Mutation::Lambda2Sign ? -1.0 : 1.0;
  double worst = 0.0;
  for (const bernoulli::BernoulliConfig c : {bernoulli::BernoulliConfig{0.1, 10, 5}, {0.1, 20, 10}, {0.25, 2, 1},
                                             {1.0 / 3.0, 8, 4}, {0.45, 6, 2}}) {
    const TransitionMatrix k = bernoulli::mda_mtm(c);
    const Distribution pi = bernoulli::posterior(c);
    const Vector numeric = kernel::spectrum(k, pi).eigenvalues;
    const auto closed = bernoulli::closed_form_eigenvalues(c);
    const double lambda2 = lambda2_formula(c, sign);
    Vector expected(3);
    expected << closed.lambda1, lambda2, closed.lambda3;
    std::sort(expected.data(), expected.data() + 3, std::greater<>());
    worst = std::max(worst, (numeric - expected).cwiseAbs().maxCoeff());
  }
  return check(worst <= 1e-8, "max eigenvalue difference " + fmt(worst));
}

Outcome fs_two_routes() {
  double worst = 0.0;
  for (int m : {2, 4, 6, 8}) {
    const bernoulli::BernoulliConfig c{0.2, m, m / 2};
    worst = std::max(worst, (bernoulli::fs_mtm(c).entries() - bernoulli::fs_mtm_sandwich(c).entries())
                                .cwiseAbs()
                                .maxCoeff());
  }
  return check(worst <= 1e-12, "max entry difference " + fmt(worst));
}

Outcome conjugate_shares_spectrum() {
  double worst = 0.0;
  for (double rho : {0.1, 1.0 / 3.0}) {
    for (int m = 2; m <= 8; ++m) {
      const bernoulli::BernoulliConfig c{rho, m, m / 2};
      const auto z = bernoulli::data_vector(c);
      const TransitionMatrix big = bernoulli::conjugate_mtm(c, z);
      const Vector values = kernel::spectrum(big, bernoulli::allocation_posterior(rho, z)).eigenvalues;
      const Vector small = kernel::spectrum(bernoulli::mda_mtm(c), bernoulli::posterior(c)).eigenvalues;
      // The 2^m chain has the same nonzero eigenvalues; everything else is ~0.
      for (Eigen::Index i = 0; i < values.size(); ++i) {
        const double target = i < small.size() ? small(i) : 0.0;
        worst = std::max(worst, std::abs(values(i) - target));
      }
    }
  }
  return check(worst <= 1e-8, "max difference " + fmt(worst));
}

Outcome sandwich_domination() {
  int checked = 0;
  for (double rho : {0.1, 0.2, 1.0 / 3.0, 0.45}) {
    for (int m = 2; m <= 40; m += 2) {
      const bernoulli::BernoulliConfig c{rho, m, m / 2};
      const Distribution pi = bernoulli::posterior(c);
      const auto fs = kernel::spectrum(bernoulli::fs_mtm(c), pi);
      const auto mda = kernel::spectrum(bernoulli::mda_mtm(c), pi);
      const auto result = kernel::domination_check(fs, mda, 1e-10);
      if (!result.dominated)
        return check(false, "violated at rho=" + fmt(rho) + " m=" + std::to_string(m) + " index " +
                                std::to_string(*result.first_violation));
      ++checked;
    }
  }
  return check(true, std::to_string(checked) + " configurations");
}

Outcome chi_square_identity() {
  const bernoulli::BernoulliConfig c{0.1, 10, 5};
  const TransitionMatrix k = bernoulli::mda_mtm(c);
  const Distribution pi = bernoulli::posterior(c);
  const auto report = kernel::spectrum(k, pi);
  double worst = 0.0;
  for (Eigen::Index x0 = 0; x0 < 4; ++x0)
    for (int n = 1; n <= 50; ++n)
      worst = std::max(worst, std::abs(kernel::chi_square_distance(k, pi, x0, n) -
                                       kernel::chi_square_spectral(report, x0, n)));
  return check(worst <= 1e-8, "max absolute difference " + fmt(worst));
}

Outcome label_switch_kernel() {
  double idem = 0.0;
  double balance = 0.0;
  for (int k = 2; k <= 3; ++k) {
    for (int m = 1; m <= 6; ++m) {
      const TransitionMatrix r = labels::r_matrix(m, k);
      idem = std::max(idem, labels::idempotence_residual(r));
      std::vector<int> z(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) z[static_cast<std::size_t>(i)] = (i * 7 + 3) % 3 == 0 ? 1 : 0;
      balance = std::max(balance, kernel::detailed_balance_residual(r, bernoulli::allocation_posterior(0.2, z, k)));
    }
  }
  return check(idem <= 1e-14 && balance <= 1e-12,
               "idempotence " + fmt(idem) + ", detailed balance " + fmt(balance));
}

Outcome orbit_sizes() {
  for (int k = 1; k <= 4; ++k) {
    for (int m = 1; m <= 4; ++m) {
      const std::size_t n = labels::state_count(m, k);
      for (std::size_t index = 0; index < n; ++index) {
        const auto y = labels::state_at(index, m, k);
        if (labels::orbit_of(y).size() != labels::orbit_size(k, y.distinct()))
          return check(false, "orbit of " + y.to_string() + " has the wrong size");
      }
    }
  }
  return check(true, "k <= 4, m <= 4");
}

Outcome special_matrix(std::uint64_t seed) {
  Rng rng(seed);
  double eigen_residual = 0.0;
  double match = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    // Row 1 is (a, b, b, c); row 2 needs d + e + f + cd/a = 1.
    const double a = 0.05 + 0.4 * rng.uniform();
    const double c = 0.05 + (0.9 - a) * rng.uniform();
    const double b = (1.0 - a - c) / 2.0;
    const double d = (a / (a + c)) * (0.05 + 0.4 * rng.uniform());
    const double rest = 1.0 - d - c * d / a;
    const double e = rest * (0.05 + 0.9 * rng.uniform());
    const bernoulli::SpecialMtm sp{a, b, c, d, e, rest - e};
    const auto analysis = bernoulli::analyze_special_mtm(sp);
    const Matrix m = sp.matrix();
    for (const auto& s : analysis.solutions)
      eigen_residual = std::max(eigen_residual, (m * s.vector - s.value * s.vector).cwiseAbs().maxCoeff());
    const Vector numeric = kernel::spectrum(TransitionMatrix(m, 1e-12), analysis.stationary).eigenvalues;
    Vector closed(3);
    closed << analysis.solutions[1].value, analysis.solutions[2].value, analysis.solutions[3].value;
    std::sort(closed.data(), closed.data() + 3, std::greater<>());
    match = std::max(match, (numeric - closed).cwiseAbs().maxCoeff());
  }
  return check(eigen_residual <= 1e-10 && match <= 1e-8,
               "residual " + fmt(eigen_residual) + ", numeric match " + fmt(match));
}

Outcome y_mass_normalization(std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  std::vector<double> z;
  for (int m = 1; m <= 10; ++m) {
    z.push_back(rng.normal(1.5, 1.5));
    const normal::NormalMixtureProblem problem(z);
    const normal::MixtureParams params = normal::sample_prior(rng);
    for (Chain v : {Chain::MDA, Chain::FS})
      worst = std::max(worst, std::abs(normal::y_masses(problem, params, v).sum() - 1.0));
  }
  return check(worst <= 1e-10, "max |sum - 1| " + fmt(worst));
}

// Draws from sample_params at a fixed allocation; 4-sigma checks on the means
// of p, mu_1 and tau2_1 against their closed forms.
Outcome conditional_moments(std::uint64_t seed) {
  const normal::NormalMixtureProblem problem(normal::example_dataset(1));
  std::vector<int> labels;
  for (double v : problem.data()) labels.push_back(v > 1.5 ? 1 : 2);
  const labels::AllocationState y(labels, 2);
  double c = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) c += 1.0, sum += problem.data()[i];
  const double zbar = sum / c;
  double ss = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) ss += (problem.data()[i] - zbar) * (problem.data()[i] - zbar);
  const double m = static_cast<double>(problem.m());
  const double shape = (c + 4.0) / 2.0;
  const double scale = (ss + c * zbar * zbar / (c + 1.0) + 1.0) / 2.0;

  const double pa = c + 1.0, pb = m - c + 1.0;
  const double p_mean = pa / (pa + pb);
  const double p_var = pa * pb / ((pa + pb) * (pa + pb) * (pa + pb + 1.0));
  const double t_mean = scale / (shape - 1.0);
  const double t_var = t_mean * t_mean / (shape - 2.0);
  const double mu_mean = c * zbar / (c + 1.0);
  const double mu_var = t_mean / (c + 1.0);

  constexpr int n = 100'000;
  Rng rng(seed);
  double sp = 0.0, st = 0.0, sm = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto x = normal::sample_params(problem, y, rng);
    sp += x.p;
    st += x.tau2[0];
    sm += x.mu[0];
  }
  const double zp = (sp / n - p_mean) / std::sqrt(p_var / n);
  const double zt = (st / n - t_mean) / std::sqrt(t_var / n);
  const double zm = (sm / n - mu_mean) / std::sqrt(mu_var / n);
  const bool ok = std::abs(zp) < 4 && std::abs(zt) < 4 && std::abs(zm) < 4;
  return check(ok, "z-scores p " + fmt(zp) + ", tau2 " + fmt(zt) + ", mu " + fmt(zm));
}

Outcome fs_single_observation(std::uint64_t seed) {
  const normal::NormalMixtureProblem problem({normal::example_dataset(1)[0]});
  normal::EstimationSettings settings;
  settings.samples_per_row = 2000;
  settings.seed = seed;
  settings.variant = Chain::FS;
  const TransitionMatrix k = normal::estimate_conjugate_matrix(problem, settings);
  const double err = (k.entries().array() - 0.5).abs().maxCoeff();
  return check(err <= 1e-12, "max |entry - 1/2| " + fmt(err));
}

Outcome estimation_determinism(std::uint64_t seed) {
  const normal::NormalMixtureProblem problem(normal::example_dataset(2));
  normal::EstimationSettings settings;
  settings.samples_per_row = 300;
  settings.seed = seed;
  settings.variant = Chain::FS;
  const normal::NormalMixtureProblem small = problem.prefix(4);
  settings.threads = 1;
  const Matrix one = normal::estimate_conjugate_matrix(small, settings).entries();
  settings.threads = 3;
  const Matrix three = normal::estimate_conjugate_matrix(small, settings).entries();
  return check(one == three, one == three ? "bit-identical across thread counts" : "results differ");
}

Outcome fs_below_mda(std::uint64_t seed) {
  const normal::NormalMixtureProblem problem(normal::example_dataset(1));
  normal::EstimationSettings settings;
  settings.samples_per_row = 2000;
  settings.seed = seed;
  const auto points = normal::dominant_eigenvalue_curve(problem, settings, {2, 3, 4});
  for (std::size_t i = 0; i + 1 < points.size(); i += 2)
    if (!(points[i + 1].lambda_hat < points[i].lambda_hat))
      return check(false, "FS not below MDA at m=" + std::to_string(points[i].m));
  return check(true, "m = 2..4");
}

Outcome simulated_occupancy(std::uint64_t seed) {
  const bernoulli::BernoulliConfig c{0.1, 10, 5};
  constexpr long n = 200'000;
  const auto trace = sim::run_bernoulli(c, Chain::FS, n, seed);
  const Vector post = bernoulli::posterior(c).weights();
  // Batch means over 100 batches give the standard error of each occupancy.
  constexpr long batches = 100;
  const long len = n / batches;
  double worst = 0.0;
  for (int s = 0; s < 4; ++s) {
    std::vector<double> means(batches, 0.0);
    for (long b = 0; b < batches; ++b) {
      for (long i = b * len; i < (b + 1) * len; ++i) means[b] += trace.states[i] == s;
      means[b] /= static_cast<double>(len);
    }
    double mean = 0.0, var = 0.0;
    for (double v : means) mean += v / batches;
    for (double v : means) var += (v - mean) * (v - mean) / (batches - 1);
    const double se = std::sqrt(var / batches) + 1e-12;
    worst = std::max(worst, std::abs(mean - post(s)) / se);
  }
  return check(worst < 4.0, "max z-score " + fmt(worst));
}

Outcome sojourn_edge_cases() {
  const std::vector<int> constant(50, 1);
  const auto a = sim::sojourn_analysis(constant, 4, 1);
  std::vector<int> alternating;
  for (int i = 0; i < 50; ++i) alternating.push_back(i % 2 == 0 ? 1 : 2);
  const auto b = sim::sojourn_analysis(alternating, 4, 1);
  const auto c = sim::sojourn_analysis(constant, 4, 3);
  const bool ok = a.mean_stay == 50.0 && b.mean_stay == 1.0 && b.mode_switches == 49 && !c.target_visited &&
                  c.visits == 0;
  return check(ok, "constant " + fmt(a.mean_stay) + ", alternating " + fmt(b.mean_stay));
}

Outcome trace_determinism(std::uint64_t seed) {
  const normal::NormalMixtureProblem problem(normal::example_dataset(1));
  const auto a = sim::run_normal(problem, Chain::FS, 500, seed);
  const auto b = sim::run_normal(problem, Chain::FS, 500, seed);
  const auto c = sim::run_bernoulli({0.2, 6, 3}, Chain::MDA, 500, seed);
  const auto d = sim::run_bernoulli({0.2, 6, 3}, Chain::MDA, 500, seed);
  const bool ok = a.states == b.states && c.states == d.states && a.length() == 500;
  return check(ok, ok ? "identical traces" : "traces differ");
}

}  // namespace

Mutation parse_mutation(const std::string& text) {
  if (text.empty() || text == "none") return Mutation::None;
  if (text == "lambda2-sign") return Mutation::Lambda2Sign;
  throw std::invalid_argument("unknown mutation '" + text + "' (expected none or lambda2-sign)");
}

std::vector<PropertyResult> run_property_suite(const SuiteOptions& options) {
  const std::uint64_t seed = options.seed;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> properties{
      {"posterior masses", posterior_masses},
      {"MDA matrix entries", mda_matrix_entries},
      {"closed-form vs numeric spectrum", [&] { return closed_form_vs_numeric(options.mutation); }},
      {"FS matrix by averaging vs by composition", fs_two_routes},
      {"conjugate chain shares nonzero eigenvalues", conjugate_shares_spectrum},
      {"sandwich eigenvalues dominated", sandwich_domination},
      {"chi-square spectral identity", chi_square_identity},
      {"label-switch kernel idempotent and reversible", label_switch_kernel},
      {"orbit size formula", orbit_sizes},
      {"special matrix eigen-solutions", [&] { return special_matrix(seed); }},
      {"y-mass normalization", [&] { return y_mass_normalization(seed); }},
      {"conditional sampler moments", [&] { return conditional_moments(seed); }},
      {"FS single observation is iid", [&] { return fs_single_observation(seed); }},
      {"estimation independent of thread count", [&] { return estimation_determinism(seed); }},
      {"estimated FS below MDA", [&] { return fs_below_mda(seed); }},
      {"simulated occupancy matches posterior", [&] { return simulated_occupancy(seed); }},
      {"sojourn edge cases", sojourn_edge_cases},
      {"trace determinism", [&] { return trace_determinism(seed); }},
  };
  std::vector<PropertyResult> results;
  for (const auto& [name, run] : properties) {
    const auto start = std::chrono::steady_clock::now();
    PropertyResult r;
    r.name = name;
    try {
      const Outcome o = run();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back(std::move(r));
  }
  return results;
}

void print_table(std::ostream& os, const std::vector<PropertyResult>& results) {
  std::size_t width = 8;
  for (const auto& r : results) width = std::max(width, r.name.size());
  int failed = 0;
  for (const auto& r : results) {
    os << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2) << r.name
       << std::right << std::fixed << std::setprecision(2) << std::setw(7) << r.seconds << "s  " << r.detail
       << '\n';
    os.unsetf(std::ios::floatfield);
    failed += r.passed ? 0 : 1;
  }
  os << results.size() - static_cast<std::size_t>(failed) << '/' << results.size() << " properties passed\n";
}

}  // namespace sandwich::verify
