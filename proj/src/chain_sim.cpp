#include "sandwich/chain_sim.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace sandwich::sim {

namespace {

double logistic(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

void check_lengths(long iters, long burn_in) {
  if (iters < 1) throw std::invalid_argument("simulation: iteration count must be >= 1");
  if (burn_in < 0) throw std::invalid_argument("simulation: burn-in must be >= 0");
}

}  // namespace

BernoulliTrace run_bernoulli(const bernoulli::BernoulliConfig& config, Chain variant, long iters,
                             std::uint64_t seed, long burn_in) {
  check_lengths(iters, burn_in);
  const std::vector<int> z = bernoulli::data_vector(config);
  const double lr = std::log(config.rho);
  const double lq = std::log1p(-config.rho);

  // first[state][z_i] = P(y_i = 1 | state, z_i)
  std::array<std::array<double, 2>, 4> first{};
  for (int s = 0; s < 4; ++s) {
    const auto [r, q] = bernoulli::state_params(config.rho, s);
    first[s][1] = r / (r + q);
    first[s][0] = (1.0 - r) / ((1.0 - r) + (1.0 - q));
  }

  BernoulliTrace trace;
  trace.seed = seed;
  trace.variant = variant;
  trace.burn_in = burn_in;
  trace.states.reserve(static_cast<std::size_t>(iters));
  Rng rng(seed);
  int state = 1;
  for (long it = 0; it < burn_in + iters; ++it) {
    // counts[j][v] = #{i : y_i = j + 1, z_i = v}
    long counts[2][2] = {};
    const bool flip = variant == Chain::FS && rng.bernoulli(0.5);
    for (int zi : z) {
      int label = rng.uniform() < first[state][zi] ? 0 : 1;
      if (flip) label = 1 - label;
      ++counts[label][zi];
    }
    // log-odds of rho against 1 - rho for each component
    const double odds_r = static_cast<double>(counts[0][1] - counts[0][0]) * (lr - lq);
    const double odds_s = static_cast<double>(counts[1][1] - counts[1][0]) * (lr - lq);
    const int r_hi = rng.uniform() < logistic(odds_r) ? 0 : 1;
    const int s_hi = rng.uniform() < logistic(odds_s) ? 0 : 1;
    state = 2 * r_hi + s_hi;
    if (it >= burn_in) trace.states.push_back(state);
  }
  return trace;
}

NormalTrace run_normal(const normal::NormalMixtureProblem& problem, Chain variant, long iters, std::uint64_t seed,
                       long burn_in) {
  check_lengths(iters, burn_in);
  NormalTrace trace;
  trace.seed = seed;
  trace.variant = variant;
  trace.burn_in = burn_in;
  trace.states.reserve(static_cast<std::size_t>(iters));
  Rng rng(seed);
  normal::MixtureParams x = normal::sample_prior(rng);
  for (long it = 0; it < burn_in + iters; ++it) {
    labels::AllocationState y = normal::sample_allocations(problem, x, rng);
    if (variant == Chain::FS) y = labels::r_sample(y, rng);
    x = normal::sample_params(problem, y, rng);
    if (it >= burn_in) trace.states.push_back(x);
  }
  return trace;
}

SojournReport sojourn_analysis(const std::vector<int>& states, int n_states, int target, std::array<int, 2> modes) {
  if (states.empty()) throw std::invalid_argument("sojourn analysis: empty trace");
  if (n_states < 1 || target < 0 || target >= n_states)
    throw std::out_of_range("sojourn analysis: target outside the state space");
  SojournReport out;
  out.target = target;
  out.modes = modes;
  Vector counts = Vector::Zero(n_states);
  long run = 0;
  int last_mode = -1;
  for (int s : states) {
    if (s < 0 || s >= n_states) throw std::out_of_range("sojourn analysis: trace state outside the state space");
    counts(s) += 1.0;
    if (s == target) {
      ++out.visits;
      if (run == 0) ++out.sojourns;
      ++run;
      out.longest_stay = std::max(out.longest_stay, run);
    } else {
      run = 0;
    }
    if (s == modes[0] || s == modes[1]) {
      if (last_mode >= 0 && s != last_mode) ++out.mode_switches;
      last_mode = s;
    }
  }
  out.target_visited = out.visits > 0;
  out.mean_stay = out.sojourns > 0 ? static_cast<double>(out.visits) / static_cast<double>(out.sojourns) : 0.0;
  out.occupancy = Distribution::normalized(counts);
  return out;
}

SojournReport sojourn_analysis(const BernoulliTrace& trace, int target) {
  return sojourn_analysis(trace.states, 4, target, {1, 2});
}

double lag1_autocorrelation(const std::vector<double>& series) {
  const std::size_t n = series.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = series[i] - mean;
    den += d * d;
    if (i + 1 < n) num += d * (series[i + 1] - mean);
  }
  return den > 0.0 ? num / den : 0.0;
}

void write_trace_csv(std::ostream& os, const BernoulliTrace& trace, double rho) {
  const auto precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "iteration,state,r,s\n";
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const auto [r, s] = bernoulli::state_params(rho, trace.states[i]);
    os << i + 1 << ',' << trace.states[i] << ',' << r << ',' << s << '\n';
  }
  os.precision(precision);
}

void write_trace_csv(std::ostream& os, const NormalTrace& trace) {
  const auto precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "iteration,mu1,mu2,tau2_1,tau2_2,p\n";
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const auto& x = trace.states[i];
    os << i + 1 << ',' << x.mu[0] << ',' << x.mu[1] << ',' << x.tau2[0] << ',' << x.tau2[1] << ',' << x.p << '\n';
  }
  os.precision(precision);
}

void write_sojourn_json(std::ostream& os, const SojournReport& report) {
  nlohmann::json j;
  j["target"] = report.target;
  j["target_visited"] = report.target_visited;
  j["visits"] = report.visits;
  j["sojourns"] = report.sojourns;
  j["mean_stay"] = report.mean_stay;
  j["longest_stay"] = report.longest_stay;
  j["modes"] = report.modes;
  j["mode_switches"] = report.mode_switches;
  const Vector& w = report.occupancy.weights();
  j["occupancy"] = std::vector<double>(w.data(), w.data() + w.size());
  os << j.dump(2) << '\n';
}

}  // namespace sandwich::sim
