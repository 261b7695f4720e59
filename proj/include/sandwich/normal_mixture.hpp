#pragma once

// Two-component normal mixture with conditionally conjugate priors:
//   p ~ U(0,1),  mu_j | tau2_j ~ N(0, tau2_j),  tau2_j ~ IG(2, 1/2).
// Gibbs conditionals and Monte Carlo estimates of the conjugate chain on the
// 2^m allocation vectors, for plain DA and for the label-switching sandwich.

#include "sandwich/chain.hpp"
#include "sandwich/label_switch.hpp"
#include "sandwich/random.hpp"
#include "sandwich/stochastic.hpp"

#include <array>
#include <iosfwd>
#include <cstdint>
#include <string>
#include <vector>

namespace sandwich::normal {

constexpr int kMaxMatrixM = 12;
constexpr double kPriorShape = 2.0;
constexpr double kPriorScale = 0.5;

class NormalMixtureProblem {
 public:
  explicit NormalMixtureProblem(std::vector<double> z);

  const std::vector<double>& data() const noexcept { return z_; }
  int m() const noexcept { return static_cast<int>(z_.size()); }
  /// The problem on the first `m` observations.
  NormalMixtureProblem prefix(int m) const;

 private:
  std::vector<double> z_;
};

struct MixtureParams {
  std::array<double, 2> mu{0.0, 0.0};
  std::array<double, 2> tau2{1.0, 1.0};
  double p = 0.5;

  /// Throws std::invalid_argument unless tau2 > 0 and p in [0, 1].
  void validate() const;
  friend bool operator==(const MixtureParams&, const MixtureParams&) = default;
};

/// One draw from the prior.
MixtureParams sample_prior(Rng& rng);

/// P(y_i = 1 | z_i, params), by differencing the two log densities.
/// Throws DegeneratePointError when both component terms vanish.
double allocation_probability(double z_i, const MixtureParams& params);

labels::AllocationState sample_allocations(const NormalMixtureProblem& problem, const MixtureParams& params,
                                           Rng& rng);

/// Conjugate update given the allocation. An empty component (c_j = 0) is
/// updated with zbar_j = 0 and s2_j = 0, which leaves its prior unchanged.
MixtureParams sample_params(const NormalMixtureProblem& problem, const labels::AllocationState& y, Rng& rng);

/// prod_i P(y_i | z_i, params)
double y_mass_mda(const labels::AllocationState& y, const NormalMixtureProblem& problem,
                  const MixtureParams& params);
/// Average of the DA mass over the orbit of y: (mass(y) + mass(flip y)) / 2.
double y_mass_fs(const labels::AllocationState& y, const NormalMixtureProblem& problem,
                 const MixtureParams& params);

/// Masses of all 2^m allocation vectors, indexed as labels::index_of.
Vector y_masses(const NormalMixtureProblem& problem, const MixtureParams& params, Chain variant);

struct EstimationSettings {
  long samples_per_row = 20'000;
  std::uint64_t seed = 1;
  Chain variant = Chain::MDA;
  /// 0: read SANDWICH_THREADS, else use the hardware concurrency.
  unsigned threads = 0;

  void validate() const;
};

/// Row y holds the average of y_masses over parameter draws from the row's
/// conditional. For FS the draw first relabels y uniformly (r_sample), then
/// applies sample_params; this is the mixture over the orbit that defines the
/// sandwich kernel. Each row uses its own stream (seed, row, variant), so the
/// result does not depend on the thread count.
TransitionMatrix estimate_conjugate_matrix(const NormalMixtureProblem& problem, const EstimationSettings& settings);

struct CurvePoint {
  int m = 0;
  Chain variant = Chain::MDA;
  double lambda_hat = 0.0;
  std::uint64_t seed = 0;
  long samples_per_row = 0;
  bool degenerate = false;
};

/// Dominant eigenvalue of the estimated matrix for each prefix length in `ms`
/// (all of 1..m when empty) and each variant.
std::vector<CurvePoint> dominant_eigenvalue_curve(const NormalMixtureProblem& full, EstimationSettings settings,
                                                  std::vector<int> ms = {},
                                                  std::vector<Chain> variants = {Chain::MDA, Chain::FS});

/// Header "m,variant,lambda_hat,seed,N".
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& points);

/// The two ten-point example datasets.
const std::vector<double>& example_dataset(int which);

}  // namespace sandwich::normal
