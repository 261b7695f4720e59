#pragma once

// Direct simulation of the DA and label-switching sandwich chains by explicit
// conditional draws, plus run-length diagnostics on finite state traces.

#include "sandwich/bernoulli.hpp"
#include "sandwich/chain.hpp"
#include "sandwich/normal_mixture.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace sandwich::sim {

template <class State>
struct ChainTrace {
  std::vector<State> states;  // X_1, ..., X_n (the start state is not recorded)
  std::uint64_t seed = 0;
  Chain variant = Chain::MDA;
  long burn_in = 0;

  long length() const noexcept { return static_cast<long>(states.size()); }
};

/// States are parameter indices 0..3 as in bernoulli::state_params.
using BernoulliTrace = ChainTrace<int>;
using NormalTrace = ChainTrace<normal::MixtureParams>;

/// Starts at (rho, 1 - rho). Each step draws y | x, flips every label with
/// probability 1/2 for FS, then draws x | y. `burn_in` steps run first and
/// are not recorded.
BernoulliTrace run_bernoulli(const bernoulli::BernoulliConfig& config, Chain variant, long iters,
                             std::uint64_t seed, long burn_in = 0);

/// Starts from a prior draw; FS applies r_sample between the two conditional draws.
NormalTrace run_normal(const normal::NormalMixtureProblem& problem, Chain variant, long iters, std::uint64_t seed,
                       long burn_in = 0);

struct SojournReport {
  int target = 0;
  long visits = 0;
  long sojourns = 0;        // maximal runs of consecutive visits
  double mean_stay = 0.0;   // visits / sojourns; 0 when the target never appears
  long longest_stay = 0;
  long mode_switches = 0;   // moves from one mode to the other, ignoring time spent elsewhere
  std::array<int, 2> modes{1, 2};
  Distribution occupancy = Distribution::uniform(1);
  bool target_visited = false;
};

/// Run-length statistics for `target` and switch counts between `modes` on a
/// trace over {0, ..., n_states - 1}.
SojournReport sojourn_analysis(const std::vector<int>& states, int n_states, int target,
                               std::array<int, 2> modes = {1, 2});
SojournReport sojourn_analysis(const BernoulliTrace& trace, int target = 1);

/// Sample lag-1 autocorrelation; 0 for a constant series.
double lag1_autocorrelation(const std::vector<double>& series);

/// Header "iteration,state,r,s".
void write_trace_csv(std::ostream& os, const BernoulliTrace& trace, double rho);
/// Header "iteration,mu1,mu2,tau2_1,tau2_2,p".
void write_trace_csv(std::ostream& os, const NormalTrace& trace);
void write_sojourn_json(std::ostream& os, const SojournReport& report);

}  // namespace sandwich::sim
