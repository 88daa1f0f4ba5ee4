#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace lfa::rng {

/// 64-bit finalizer (splitmix64). Statistically strong on sequential inputs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the value at index i is a pure function of
/// (seed, stream, i), so draws are reproducible and random-access.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))) {}

  std::uint64_t at(std::uint64_t i) const { return mix64(key_ + 0xbf58476d1ce4e5b9ULL * i); }

  /// Uniform in [0, n) via the multiply-shift map.
  std::uint32_t index_at(std::uint64_t i, std::uint32_t n) const {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(at(i)) * n) >> 64);
  }

  /// Uniform double in [0, 1).
  double real_at(std::uint64_t i) const {
    return static_cast<double>(at(i) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Vose alias table for O(1) weighted sampling from one 64-bit draw:
/// r*n splits into a bin index (high word) and an exact uniform residual
/// (low word) deciding between the bin and its alias.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("alias table needs at least one weight");
    double sum = 0;
    for (double w : weights) {
      if (w < 0) throw std::invalid_argument("alias table weights must be non-negative");
      sum += w;
    }
    if (sum <= 0) throw std::invalid_argument("alias table weights must not all be zero");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / sum;
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i)
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
      std::uint32_t s = small.back(), l = large.back();
      small.pop_back();
      large.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (auto i : large) prob_[i] = 1.0;
    for (auto i : small) prob_[i] = 1.0;
  }

  std::uint32_t sample(std::uint64_t r) const {
    unsigned __int128 prod = static_cast<unsigned __int128>(r) * prob_.size();
    auto k = static_cast<std::uint32_t>(prod >> 64);
    double u = static_cast<double>(static_cast<std::uint64_t>(prod)) * 0x1.0p-64;
    return u < prob_[k] ? k : alias_[k];
  }

  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace lfa::rng
