// Acceptance run: one PASS/FAIL line per criterion, each with its runtime
// budget. Exit status is nonzero when any criterion fails.

#include "sandwich/bernoulli.hpp"
#include "sandwich/bernoulli_generic.hpp"
#include "sandwich/chain_sim.hpp"
#include "sandwich/generic_linalg.hpp"
#include "sandwich/kernel.hpp"
#include "sandwich/label_switch.hpp"
#include "sandwich/normal_mixture.hpp"
#include "sandwich/random.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace sandwich;

namespace {

struct Verdict {
  bool ok = false;
  std::string detail;
};

std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(3) << v;
  return os.str();
}

Vector sorted_desc(Vector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

// 1. Exact eigenvalues of the 4-state chain.
Verdict exact_eigenvalues() {
  struct Case {
    bernoulli::BernoulliConfig config;
    double lambda1, lambda2;
  };
  double worst = 0.0;
  std::string detail;
  for (const Case& c : {Case{{0.1, 10, 5}, 0.99395, 0.19795}, Case{{0.1, 20, 10}, 0.99996, 0.15195}}) {
    const auto pi = bernoulli::posterior(c.config);
    const Vector numeric = kernel::spectrum(bernoulli::mda_mtm(c.config), pi).eigenvalues;
    const auto closed = bernoulli::closed_form_eigenvalues(c.config);
    worst = std::max({worst, std::abs(numeric(0) - c.lambda1), std::abs(numeric(1) - c.lambda2),
                      std::abs(closed.lambda1 - c.lambda1), std::abs(closed.lambda2 - c.lambda2)});
    std::ostringstream os;
    os << std::setprecision(7) << "m=" << c.config.m << ": (" << numeric(0) << ", " << numeric(1) << ") ";
    detail += os.str();
  }
  return {worst <= 5e-6, detail + "max error " + sci(worst)};
}

// 2. Posterior masses.
Verdict posterior_masses() {
  const Vector post = bernoulli::posterior({0.1, 10, 5}).weights();
  Vector expected(4);
  expected << 0.003, 0.497, 0.497, 0.003;
  const double err = (post - expected).cwiseAbs().maxCoeff();
  return {err <= 5e-4, "max error " + sci(err)};
}

// 3. All 16 matrix entries.
Verdict matrix_entries() {
  const Matrix k = bernoulli::mda_mtm({0.1, 10, 5}).entries();
  Matrix expected(4, 4);
  expected << 0.10138, 0.39862, 0.39862, 0.10138,  //
      0.00241, 0.99457, 0.00061, 0.00241,          //
      0.00241, 0.00061, 0.99457, 0.00241,          //
      0.10138, 0.39862, 0.39862, 0.10138;
  const double err = (k - expected).cwiseAbs().maxCoeff();
  return {err <= 5e-6, "max entry error " + sci(err)};
}

// 4. The 2^m conjugate chain has the 4-state chain's nonzero eigenvalues.
Verdict conjugate_spectrum() {
  double worst = 0.0;
  int configs = 0;
  for (double rho : {0.1, 1.0 / 3.0}) {
    for (int m = 2; m <= 10; ++m) {
      const bernoulli::BernoulliConfig c{rho, m, m / 2};
      const auto z = bernoulli::data_vector(c);
      const Vector big =
          kernel::spectrum(bernoulli::conjugate_mtm(c, z), bernoulli::allocation_posterior(rho, z)).eigenvalues;
      const Vector small = kernel::spectrum(bernoulli::mda_mtm(c), bernoulli::posterior(c)).eigenvalues;
      // Pair the nonzero eigenvalues; everything beyond them must vanish.
      Eigen::Index nonzero = 0;
      for (Eigen::Index i = 0; i < small.size(); ++i) nonzero += std::abs(small(i)) > 1e-8;
      for (Eigen::Index i = 0; i < nonzero; ++i) worst = std::max(worst, std::abs(big(i) - small(i)));
      for (Eigen::Index i = nonzero; i < big.size(); ++i) worst = std::max(worst, std::abs(big(i)));
      ++configs;
    }
  }
  return {worst <= 1e-8, std::to_string(configs) + " configurations, max difference " + sci(worst)};
}

// 5. Sandwich domination over the grid, and the FS dominant in closed form.
Verdict domination() {
  double closed_gap = 0.0;
  int configs = 0;
  for (double rho : {0.1, 0.2, 1.0 / 3.0, 0.45}) {
    for (int m = 2; m <= 40; m += 2) {
      const bernoulli::BernoulliConfig c{rho, m, m / 2};
      const auto pi = bernoulli::posterior(c);
      const auto fs = kernel::spectrum(bernoulli::fs_mtm(c), pi);
      const auto mda = kernel::spectrum(bernoulli::mda_mtm(c), pi);
      const auto result = kernel::domination_check(fs, mda, 1e-10);
      if (!result.dominated)
        return {false, "violated at rho=" + sci(rho) + " m=" + std::to_string(m)};
      closed_gap = std::max(closed_gap, std::abs(fs.eigenvalues(0) - bernoulli::closed_form_eigenvalues(c).lambda2));
      ++configs;
    }
  }
  return {closed_gap <= 1e-10,
          std::to_string(configs) + " configurations dominated, FS vs closed form " + sci(closed_gap)};
}

// 6. Chi-square spectral identity. Run in 50-digit arithmetic: from the two
// low-mass start states the distance falls to ~1e-70 by n = 50, far below what
// double can resolve.
Verdict chi_square_identity() {
  using Real = boost::multiprecision::cpp_bin_float_50;
  const Real rho = Real(1) / 10;
  const auto m = bernoulli::generic::mda_matrix<Real>(rho, 10, 5);
  const auto pi = bernoulli::generic::posterior<Real>(rho, 10, 5);
  const auto eig = generic::reversible_eigen<Real>(m, pi, 100, 1e-30);
  if (!eig.converged || !eig.trivial_ok) return {false, "extended-precision eigensolve failed"};
  Real worst = 0;
  Real smallest = 1;
  for (Eigen::Index x0 = 0; x0 < 4; ++x0) {
    for (int n = 1; n <= 50; ++n) {
      const Real direct = generic::chi_square_direct<Real>(m, pi, x0, n);
      const Real spectral = generic::chi_square_spectral<Real>(eig.values, eig.functions, x0, n);
      worst = std::max(worst, Real(boost::multiprecision::abs(direct - spectral) / direct));
      smallest = std::min(smallest, direct);
    }
  }
  // The double pipeline, for reference: absolute agreement only.
  const bernoulli::BernoulliConfig c{0.1, 10, 5};
  const auto k = bernoulli::mda_mtm(c);
  const auto dpi = bernoulli::posterior(c);
  const auto deig = kernel::spectrum(k, dpi);
  double absolute = 0.0;
  for (Eigen::Index x0 = 0; x0 < 4; ++x0)
    for (int n = 1; n <= 50; ++n)
      absolute = std::max(absolute, std::abs(kernel::chi_square_distance(k, dpi, x0, n) -
                                             kernel::chi_square_spectral(deig, x0, n)));
  const double rel = worst.convert_to<double>();
  return {rel <= 1e-8, "max relative difference " + sci(rel) + " (smallest distance " +
                           sci(smallest.convert_to<double>()) + "); double absolute " + sci(absolute)};
}

// 7. Label-switch kernel.
Verdict label_switch() {
  double idem = 0.0, balance = 0.0;
  for (int k = 1; k <= 3; ++k) {
    for (int m = 1; m <= 6; ++m) {
      const auto r = labels::r_matrix(m, k);
      idem = std::max(idem, labels::idempotence_residual(r));
      std::vector<int> z;
      for (int i = 0; i < m; ++i) z.push_back((i * 5 + 1) % 3 == 0 ? 1 : 0);
      balance = std::max(balance, kernel::detailed_balance_residual(r, bernoulli::allocation_posterior(0.15, z, k)));
    }
  }
  return {idem <= 1e-14 && balance <= 1e-12, "idempotence " + sci(idem) + ", detailed balance " + sci(balance)};
}

// 8. Closed-form eigen-solutions of the four-parameter matrix family.
Verdict special_matrices() {
  Rng rng(8);
  double residual = 0.0, match = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = 0.02 + 0.45 * rng.uniform();
    const double c = 0.02 + (0.95 - a) * rng.uniform();
    const double b = (1.0 - a - c) / 2.0;
    const double d = (a / (a + c)) * (0.02 + 0.9 * rng.uniform());
    const double rest = 1.0 - d - c * d / a;
    const double e = rest * (0.02 + 0.96 * rng.uniform());
    const bernoulli::SpecialMtm sp{a, b, c, d, e, rest - e};
    const auto analysis = bernoulli::analyze_special_mtm(sp);
    const Matrix m = sp.matrix();
    for (const auto& s : analysis.solutions)
      residual = std::max(residual, (m * s.vector - s.value * s.vector).cwiseAbs().maxCoeff());
    Vector closed(3);
    closed << analysis.solutions[1].value, analysis.solutions[2].value, analysis.solutions[3].value;
    const Vector numeric = kernel::spectrum(TransitionMatrix(m), analysis.stationary).eigenvalues;
    match = std::max(match, (numeric - sorted_desc(closed)).cwiseAbs().maxCoeff());
  }
  return {residual <= 1e-10 && match <= 1e-8, "1000 instances, residual " + sci(residual) + ", match " + sci(match)};
}

// 9. Normal mixture eigenvalue curve at desk scale.
Verdict normal_curve() {
  const normal::NormalMixtureProblem problem(normal::example_dataset(1));
  normal::EstimationSettings settings;
  settings.samples_per_row = 20'000;
  settings.seed = 1;
  const auto points = normal::dominant_eigenvalue_curve(problem, settings, {1, 2, 3, 4, 5, 6});
  std::ostringstream os;
  os << std::setprecision(4);
  bool ok = true;
  double mda5 = 0.0, fs1 = 1.0;
  for (std::size_t i = 0; i + 1 < points.size(); i += 2) {
    const auto& mda = points[i];
    const auto& fs = points[i + 1];
    os << "m=" << mda.m << " " << mda.lambda_hat << "/" << fs.lambda_hat << " ";
    if (mda.m == 5) mda5 = mda.lambda_hat;
    if (mda.m == 1) fs1 = fs.lambda_hat;
    if (mda.m >= 2 && !(fs.lambda_hat < mda.lambda_hat)) ok = false;
  }
  ok = ok && mda5 >= 0.95 && std::abs(fs1) <= 0.02;
  return {ok, "MDA/FS " + os.str()};
}

// 10. Sojourn time in (rho, 1 - rho).
Verdict sojourn() {
  const auto trace = sim::run_bernoulli({0.1, 10, 5}, Chain::MDA, 1'000'000, 1);
  const auto report = sim::sojourn_analysis(trace, 1);
  return {std::abs(report.mean_stay - 184.0) <= 18.4,
          "mean stay " + sci(report.mean_stay) + " over " + std::to_string(report.sojourns) + " sojourns"};
}

// 11. Conditional sampler moments and y-mass normalization.
Verdict sampler_moments() {
  const normal::NormalMixtureProblem problem(normal::example_dataset(1));
  const auto y = labels::AllocationState::parse("1212221221", 2);
  const double m = problem.m();
  double c = 0, sum = 0;
  for (std::size_t i = 0; i < problem.data().size(); ++i)
    if (y[i] == 1) c += 1, sum += problem.data()[i];
  const double zbar = sum / c;
  double ss = 0;
  for (std::size_t i = 0; i < problem.data().size(); ++i)
    if (y[i] == 1) ss += (problem.data()[i] - zbar) * (problem.data()[i] - zbar);
  const double shape = (c + 4) / 2, scale = (ss + c * zbar * zbar / (c + 1) + 1) / 2;

  struct Target {
    const char* name;
    double mean, var;
  };
  const double t_mean = scale / (shape - 1);
  const Target targets[3] = {
      {"beta", (c + 1) / (m + 2), (c + 1) * (m - c + 1) / ((m + 2) * (m + 2) * (m + 3))},
      {"normal", c * zbar / (c + 1), t_mean / (c + 1)},
      {"inverse-gamma", t_mean, t_mean * t_mean / (shape - 2)},
  };
  constexpr int n = 100'000;
  Rng rng(11);
  double s[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const auto x = normal::sample_params(problem, y, rng);
    s[0] += x.p;
    s[1] += x.mu[0];
    s[2] += x.tau2[0];
  }
  bool ok = true;
  std::string detail = "z-scores";
  for (int k = 0; k < 3; ++k) {
    const double z = (s[k] / n - targets[k].mean) / std::sqrt(targets[k].var / n);
    ok = ok && std::abs(z) < 4.0;
    detail += std::string(" ") + targets[k].name + " " + sci(z);
  }

  double norm = 0.0;
  std::vector<double> data;
  for (int mm = 1; mm <= 10; ++mm) {
    data.push_back(rng.normal(1.5, 1.5));
    const normal::NormalMixtureProblem p(data);
    for (int rep = 0; rep < 5; ++rep) {
      const auto params = normal::sample_prior(rng);
      for (Chain v : {Chain::MDA, Chain::FS}) norm = std::max(norm, std::abs(normal::y_masses(p, params, v).sum() - 1));
    }
  }
  ok = ok && norm <= 1e-10;
  return {ok, detail + "; y-mass normalization " + sci(norm)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "exact eigenvalues of the 4-state chain", 1, exact_eigenvalues},
      {2, "posterior masses", 1, posterior_masses},
      {3, "4x4 DA matrix entries", 1, matrix_entries},
      {4, "2^m conjugate chain shares nonzero eigenvalues", 30, conjugate_spectrum},
      {5, "sandwich eigenvalues dominated", 10, domination},
      {6, "chi-square spectral identity", 1, chi_square_identity},
      {7, "label-switch kernel idempotent and reversible", 5, label_switch},
      {8, "four-parameter matrix eigen-solutions", 10, special_matrices},
      {9, "normal mixture dominant eigenvalue curve", 600, normal_curve},
      {10, "sojourn time of the sticky chain", 30, sojourn},
      {11, "sampler moments and y-mass normalization", 30, sampler_moments},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.budget_seconds;
    const bool pass = v.ok && in_time;
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << c.id << "  " << c.name << "  ["
              << std::fixed << std::setprecision(3) << seconds << "s / " << std::setprecision(0) << c.budget_seconds
              << "s" << (in_time ? "" : ", over budget") << "]  " << v.detail << '\n';
    std::cout.unsetf(std::ios::floatfield);
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << '/' << criteria.size()
            << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
