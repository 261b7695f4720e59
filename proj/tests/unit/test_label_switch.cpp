#include "sandwich/bernoulli.hpp"
#include "sandwich/kernel.hpp"
#include "sandwich/label_switch.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

using namespace sandwich;
using labels::AllocationState;
using labels::Permutation;

namespace {

// Orbit by applying all k! mappings directly.
std::set<std::vector<int>> brute_orbit(const AllocationState& y) {
  std::vector<int> sigma(static_cast<std::size_t>(y.k()));
  std::iota(sigma.begin(), sigma.end(), 1);
  std::set<std::vector<int>> out;
  do {
    std::vector<int> image;
    for (int label : y.labels()) image.push_back(sigma[static_cast<std::size_t>(label - 1)]);
    out.insert(image);
  } while (std::next_permutation(sigma.begin(), sigma.end()));
  return out;
}

}  // namespace

TEST_SUITE("label_switch") {
  TEST_CASE("allocation parsing and printing") {
    const auto y = AllocationState::parse("33413343", 4);
    CHECK(y.m() == 8);
    CHECK(y.distinct() == 3);
    CHECK(y.to_string() == "33413343");
    CHECK(y.clustering() == std::vector<int>{1, 1, 2, 3, 1, 1, 2, 1});
    CHECK(AllocationState::parse("1,10,2", 10).labels() == std::vector<int>{1, 10, 2});
    CHECK_THROWS(AllocationState::parse("1231", 2));
    CHECK_THROWS(AllocationState({}, 2));
  }

  TEST_CASE("permutations in cycle and mapping form") {
    const auto sigma = Permutation::parse_cycles("(1324)", 4);
    CHECK(sigma.mapping() == std::vector<int>{3, 4, 2, 1});
    CHECK(sigma == Permutation::parse_mapping("3,4,2,1"));
    const auto y = AllocationState::parse("33413343", 4);
    CHECK(labels::apply_permutation(sigma, y).to_string() == "22132212");
    CHECK(labels::apply_permutation(sigma.inverse(), labels::apply_permutation(sigma, y)) == y);
    CHECK(Permutation::parse_cycles("(12)(34)", 4).mapping() == std::vector<int>{2, 1, 4, 3});
    CHECK(Permutation::parse_cycles("", 3) == Permutation::identity(3));
    CHECK_THROWS(Permutation({1, 1, 2}));
    CHECK_THROWS(Permutation::parse_cycles("(15)", 4));
  }

  TEST_CASE("orbit size matches enumeration over all relabelings") {
    for (int k = 1; k <= 4; ++k) {
      for (int m = 1; m <= 4; ++m) {
        const std::size_t n = labels::state_count(m, k);
        for (std::size_t i = 0; i < n; ++i) {
          const auto y = labels::state_at(i, m, k);
          const auto brute = brute_orbit(y);
          const auto orbit = labels::orbit_of(y);
          CHECK(orbit.size() == brute.size());
          CHECK(orbit.size() == labels::orbit_size(k, y.distinct()));
          CHECK(orbit.contains(y));
        }
      }
    }
    CHECK(labels::orbit_size(4, 3) == 24);
    CHECK(labels::orbit_size(3, 1) == 3);
  }

  TEST_CASE("index ordering puts the last coordinate fastest") {
    CHECK(labels::state_at(0, 2, 2).to_string() == "11");
    CHECK(labels::state_at(1, 2, 2).to_string() == "12");
    CHECK(labels::state_at(2, 2, 2).to_string() == "21");
    CHECK(labels::state_at(3, 2, 2).to_string() == "22");
    for (std::size_t i = 0; i < 81; ++i) CHECK(labels::index_of(labels::state_at(i, 4, 3)) == i);
    CHECK_THROWS_AS(labels::state_count(13, 2), CapExceededError);
    CHECK(labels::state_count(12, 2) == 4096);
  }

  TEST_CASE("label-switch matrix: uniform on orbits, idempotent, symmetric") {
    for (int k = 2; k <= 3; ++k) {
      for (int m = 1; m <= 5; ++m) {
        const auto r = labels::r_matrix(m, k);
        CHECK(labels::idempotence_residual(r) <= 1e-15);
        CHECK((r.entries() - r.entries().transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (Eigen::Index i = 0; i < r.size(); ++i) {
          const auto y = labels::state_at(static_cast<std::size_t>(i), m, k);
          const auto orbit = labels::orbit_of(y);
          for (Eigen::Index j = 0; j < r.size(); ++j) {
            const bool member = orbit.contains(labels::state_at(static_cast<std::size_t>(j), m, k));
            CHECK(r(i, j) == (member ? 1.0 / static_cast<double>(orbit.size()) : 0.0));
          }
        }
      }
    }
  }

  TEST_CASE("for two labels the kernel is a fair coin flip") {
    const auto r = labels::r_matrix(3, 2);
    for (Eigen::Index i = 0; i < 8; ++i) {
      CHECK(r(i, i) == 0.5);
      CHECK(r(i, 7 - i) == 0.5);
    }
  }

  TEST_CASE("reversible w.r.t. a relabeling-invariant posterior") {
    for (int k = 2; k <= 3; ++k) {
      for (int m = 1; m <= 6; ++m) {
        std::vector<int> z;
        for (int i = 0; i < m; ++i) z.push_back(i % 3 == 1 ? 1 : 0);
        const auto pi = bernoulli::allocation_posterior(0.2, z, k);
        const auto r = labels::r_matrix(m, k);
        CHECK(kernel::detailed_balance_residual(r, pi) <= 1e-12);
        // invariance of pi itself
        for (std::size_t i = 0; i < labels::state_count(m, k); ++i) {
          const auto y = labels::state_at(i, m, k);
          for (const auto& w : labels::orbit_of(y).members)
            CHECK(std::abs(pi[static_cast<Eigen::Index>(labels::index_of(w))] -
                           pi[static_cast<Eigen::Index>(i)]) <= 1e-15);
        }
      }
    }
  }

  TEST_CASE("r_sample is uniform on the orbit") {
    Rng rng(8);
    const auto y = AllocationState::parse("1123", 3);
    std::map<std::string, int> counts;
    constexpr int n = 60000;
    for (int i = 0; i < n; ++i) ++counts[labels::r_sample(y, rng).to_string()];
    REQUIRE(counts.size() == 6);
    const double p = 1.0 / 6.0;
    for (const auto& [state, c] : counts) {
      CHECK(labels::orbit_of(y).contains(AllocationState::parse(state, 3)));
      CHECK(std::abs(c - n * p) <= 4.0 * std::sqrt(n * p * (1 - p)));
    }
  }
}
