#pragma once

// Allocation space Y = {1..k}^m, component relabelings, orbits (clusterings)
// and the uniform label-switching kernel r(y'|y) = 1{y' in O_y} / |O_y|.

#include "sandwich/random.hpp"
#include "sandwich/stochastic.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sandwich::labels {

/// y = (y_1, ..., y_m) with labels in 1..k.
class AllocationState {
 public:
  AllocationState(std::vector<int> labels, int k);

  /// Digit string ("33413343") when k <= 9, otherwise comma-separated labels.
  static AllocationState parse(std::string_view text, int k);

  int k() const noexcept { return k_; }
  int m() const noexcept { return static_cast<int>(labels_.size()); }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int operator[](std::size_t i) const { return labels_[i]; }

  /// Number of distinct labels in use (u).
  int distinct() const;
  /// Labels renamed in order of first appearance; equal exactly when two states
  /// induce the same partition of the observations.
  std::vector<int> clustering() const;
  std::string to_string() const;

  friend bool operator==(const AllocationState&, const AllocationState&) = default;
  friend auto operator<=>(const AllocationState&, const AllocationState&) = default;

 private:
  std::vector<int> labels_;
  int k_;
};

/// Bijection of 1..k in mapping form: sigma(j) = mapping[j-1].
class Permutation {
 public:
  explicit Permutation(std::vector<int> mapping);

  static Permutation identity(int k);
  /// Cycle notation such as "(1324)" or "(12)(34)"; labels inside a cycle may be
  /// comma-separated when k > 9. Unlisted labels are fixed points.
  static Permutation parse_cycles(std::string_view text, int k);
  /// Mapping form "3,4,2,1" (sigma(1)=3, ...).
  static Permutation parse_mapping(std::string_view text);

  int k() const noexcept { return static_cast<int>(mapping_.size()); }
  int operator()(int j) const { return mapping_[static_cast<std::size_t>(j - 1)]; }
  const std::vector<int>& mapping() const noexcept { return mapping_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> mapping_;
};

/// y'_i = sigma(y_i).
AllocationState apply_permutation(const Permutation& sigma, const AllocationState& y);

struct Orbit {
  std::vector<AllocationState> members;  // sorted, deduplicated
  std::size_t size() const noexcept { return members.size(); }
  bool contains(const AllocationState& y) const;
};

/// All sigma y over the k! relabelings. Throws CapExceededError when k > max_k.
Orbit orbit_of(const AllocationState& y, int max_k = 8);

/// k! / (k - u)!
std::uint64_t orbit_size(int k, int u);

/// One label-switching move: sigma uniform on the symmetric group (Fisher-Yates), returns sigma y.
AllocationState r_sample(const AllocationState& y, Rng& rng);

/// |Y| = k^m; throws CapExceededError above `cap`.
std::size_t state_count(int m, int k, std::size_t cap = 4096);
/// Lexicographic index with the last coordinate varying fastest: (1,1),(1,2),(2,1),(2,2) -> 0,1,2,3.
std::size_t index_of(const AllocationState& y);
AllocationState state_at(std::size_t index, int m, int k);

/// R[y][y'] = 1{y' in O_y} / |O_y| over the whole of Y.
TransitionMatrix r_matrix(int m, int k, std::size_t cap = 4096);

/// max |R^2 - R| entrywise.
double idempotence_residual(const TransitionMatrix& r);

}  // namespace sandwich::labels
