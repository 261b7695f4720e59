#pragma once

#include <cstdint>
#include <random>

namespace sandwich {

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence is
/// fixed by the standard; the variate transforms below are implemented here
/// rather than taken from <random> so results do not depend on the standard
/// library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for (master seed, a, b), e.g. (seed, row, variant).
  static Rng stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform on {0, ..., n-1}; n >= 1.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal by the Box-Muller transform (one value per call).
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma(shape, rate) by Marsaglia-Tsang; shape < 1 uses the U^{1/shape} boost.
  double gamma(double shape, double rate = 1.0);
  double beta(double a, double b);
  /// Density proportional to w^{-shape-1} exp(-scale / w).
  double inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sandwich
