#include "sandwich/label_switch.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sandwich::labels {

AllocationState::AllocationState(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw std::invalid_argument("allocation: component count k must be >= 1");
  if (labels_.empty()) throw std::invalid_argument("allocation: m must be >= 1");
  for (int label : labels_)
    if (label < 1 || label > k_) throw std::invalid_argument("allocation: label outside 1..k");
}

AllocationState AllocationState::parse(std::string_view text, int k) {
  std::vector<int> labels;
  if (text.find(',') != std::string_view::npos) {
    std::string field;
    std::istringstream in{std::string(text)};
    while (std::getline(in, field, ',')) labels.push_back(std::stoi(field));
  } else {
    for (char c : text) {
      if (c < '0' || c > '9') throw std::invalid_argument("allocation: expected digits");
      labels.push_back(c - '0');
    }
  }
  return AllocationState(std::move(labels), k);
}

int AllocationState::distinct() const {
  std::vector<bool> seen(static_cast<std::size_t>(k_) + 1, false);
  int u = 0;
  for (int label : labels_)
    if (!seen[label]) {
      seen[label] = true;
      ++u;
    }
  return u;
}

std::vector<int> AllocationState::clustering() const {
  std::vector<int> rename(static_cast<std::size_t>(k_) + 1, 0);
  std::vector<int> out;
  out.reserve(labels_.size());
  int next = 0;
  for (int label : labels_) {
    if (rename[label] == 0) rename[label] = ++next;
    out.push_back(rename[label]);
  }
  return out;
}

std::string AllocationState::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (k_ > 9 && i > 0) out += ',';
    out += std::to_string(labels_[i]);
  }
  return out;
}

Permutation::Permutation(std::vector<int> mapping) : mapping_(std::move(mapping)) {
  std::vector<bool> hit(mapping_.size() + 1, false);
  for (int image : mapping_) {
    if (image < 1 || image > static_cast<int>(mapping_.size()) || hit[image])
      throw std::invalid_argument("permutation: mapping is not a bijection of 1..k");
    hit[image] = true;
  }
  if (mapping_.empty()) throw std::invalid_argument("permutation: k must be >= 1");
}

Permutation Permutation::identity(int k) {
  std::vector<int> mapping(static_cast<std::size_t>(k));
  std::iota(mapping.begin(), mapping.end(), 1);
  return Permutation(std::move(mapping));
}

Permutation Permutation::parse_cycles(std::string_view text, int k) {
  std::vector<int> mapping(static_cast<std::size_t>(k));
  std::iota(mapping.begin(), mapping.end(), 1);
  std::size_t pos = 0;
  while ((pos = text.find('(', pos)) != std::string_view::npos) {
    const std::size_t close = text.find(')', pos);
    if (close == std::string_view::npos) throw std::invalid_argument("permutation: unbalanced '('");
    const std::string_view body = text.substr(pos + 1, close - pos - 1);
    std::vector<int> cycle;
    if (body.find(',') != std::string_view::npos) {
      std::string field;
      std::istringstream in{std::string(body)};
      while (std::getline(in, field, ',')) cycle.push_back(std::stoi(field));
    } else {
      for (char c : body) {
        if (c == ' ') continue;
        if (c < '0' || c > '9') throw std::invalid_argument("permutation: bad cycle entry");
        cycle.push_back(c - '0');
      }
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int from = cycle[i];
      const int to = cycle[(i + 1) % cycle.size()];
      if (from < 1 || from > k || to < 1 || to > k) throw std::invalid_argument("permutation: label outside 1..k");
      mapping[static_cast<std::size_t>(from - 1)] = to;
    }
    pos = close + 1;
  }
  return Permutation(std::move(mapping));
}

Permutation Permutation::parse_mapping(std::string_view text) {
  std::vector<int> mapping;
  std::string field;
  std::istringstream in{std::string(text)};
  while (std::getline(in, field, ',')) mapping.push_back(std::stoi(field));
  return Permutation(std::move(mapping));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(mapping_.size());
  for (std::size_t j = 0; j < mapping_.size(); ++j) inv[static_cast<std::size_t>(mapping_[j] - 1)] = static_cast<int>(j + 1);
  return Permutation(std::move(inv));
}

AllocationState apply_permutation(const Permutation& sigma, const AllocationState& y) {
  if (sigma.k() != y.k()) throw std::invalid_argument("apply_permutation: permutation and state disagree on k");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(y.m()));
  for (int label : y.labels()) out.push_back(sigma(label));
  return AllocationState(std::move(out), y.k());
}

bool Orbit::contains(const AllocationState& y) const { return std::binary_search(members.begin(), members.end(), y); }

Orbit orbit_of(const AllocationState& y, int max_k) {
  if (y.k() > max_k) throw CapExceededError("orbit_of: k! enumeration exceeds the configured cap");
  std::vector<int> mapping(static_cast<std::size_t>(y.k()));
  std::iota(mapping.begin(), mapping.end(), 1);
  Orbit orbit;
  do {
    orbit.members.push_back(apply_permutation(Permutation(mapping), y));
  } while (std::next_permutation(mapping.begin(), mapping.end()));
  std::sort(orbit.members.begin(), orbit.members.end());
  orbit.members.erase(std::unique(orbit.members.begin(), orbit.members.end()), orbit.members.end());
  return orbit;
}

std::uint64_t orbit_size(int k, int u) {
  std::uint64_t size = 1;
  for (int j = k - u + 1; j <= k; ++j) size *= static_cast<std::uint64_t>(j);
  return size;
}

AllocationState r_sample(const AllocationState& y, Rng& rng) {
  std::vector<int> mapping(static_cast<std::size_t>(y.k()));
  std::iota(mapping.begin(), mapping.end(), 1);
  for (std::size_t i = mapping.size(); i > 1; --i) std::swap(mapping[i - 1], mapping[rng.uniform_index(i)]);
  return apply_permutation(Permutation(std::move(mapping)), y);
}

std::size_t state_count(int m, int k, std::size_t cap) {
  if (m < 1 || k < 1) throw std::invalid_argument("state_count: m and k must be >= 1");
  std::size_t n = 1;
  for (int i = 0; i < m; ++i) {
    if (n > cap / static_cast<std::size_t>(k)) throw CapExceededError("state_count: k^m exceeds the configured cap");
    n *= static_cast<std::size_t>(k);
  }
  if (n > cap) throw CapExceededError("state_count: k^m exceeds the configured cap");
  return n;
}

std::size_t index_of(const AllocationState& y) {
  std::size_t index = 0;
  for (int label : y.labels()) index = index * static_cast<std::size_t>(y.k()) + static_cast<std::size_t>(label - 1);
  return index;
}

AllocationState state_at(std::size_t index, int m, int k) {
  std::vector<int> labels(static_cast<std::size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::size_t>(k)) + 1;
    index /= static_cast<std::size_t>(k);
  }
  return AllocationState(std::move(labels), k);
}

TransitionMatrix r_matrix(int m, int k, std::size_t cap) {
  const std::size_t n = state_count(m, k, cap);
  std::map<std::vector<int>, std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[state_at(i, m, k).clustering()].push_back(static_cast<Eigen::Index>(i));
  Matrix r = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [key, members] : groups) {
    const double mass = 1.0 / static_cast<double>(members.size());
    for (Eigen::Index i : members)
      for (Eigen::Index j : members) r(i, j) = mass;
  }
  return TransitionMatrix(std::move(r));
}

double idempotence_residual(const TransitionMatrix& r) {
  const Matrix square = r.entries() * r.entries();
  return (square - r.entries()).cwiseAbs().maxCoeff();
}

}  // namespace sandwich::labels
