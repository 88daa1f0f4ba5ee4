#pragma once

#include <cstdint>
#include <vector>

namespace lfa::bins {

/// One phase: the interval between two resets. At a phase start every bin
/// holds zero or one ball, so a_start + b_start = n.
struct PhaseRecord {
  std::uint32_t a_start = 0;  // bins with one ball
  std::uint32_t b_start = 0;  // bins with zero balls
  std::uint64_t length = 0;   // throws until (and including) the reset
  std::uint8_t range = 1;     // 1: a >= n/3, 2: n/c <= a < n/3, 3: a < n/c
};

struct BinsConfig {
  std::uint32_t n = 1;
  std::uint64_t phases = 1;
  std::uint64_t seed = 0;
  double alpha = 4.0;  // phase-length bound constant, >= 4
  double c = 10.0;     // range-boundary constant, >= 10
};

/// The iterated game state: n bins, initially one ball each. A throw into a
/// two-ball bin triggers a reset: that bin drops to one ball and every other
/// two-ball bin empties.
class BinsGame {
 public:
  explicit BinsGame(std::uint32_t n);

  /// Throws one ball into `bin`; returns true if a reset occurred.
  bool step(std::uint32_t bin);

  std::uint32_t ones() const { return a_; }    // bins with one ball
  std::uint32_t zeros() const { return b_; }   // bins with zero balls
  std::uint32_t twos() const { return n_ - a_ - b_; }
  std::uint32_t n() const { return n_; }
  std::uint8_t balls(std::uint32_t bin) const { return balls_[bin]; }

 private:
  std::uint32_t n_, a_, b_;
  std::vector<std::uint8_t> balls_;
  std::vector<std::uint32_t> two_ball_bins_;
};

/// Simulates `config.phases` phases with uniform throws; deterministic given
/// the seed.
std::vector<PhaseRecord> run_bins(const BinsConfig& config);

struct RangeStats {
  std::uint64_t count = 0;
  double fraction = 0;
  double mean_length = 0;
  double p50 = 0;
  double p90 = 0;
  double p99 = 0;
};

struct RangeReport {
  RangeStats range[3];  // index 0 = range 1
  double bound_violation_fraction = 0;  // of phases with an applicable bound
  std::uint64_t bound_checked = 0;
  std::uint64_t max_consecutive_range3 = 0;
  double beta = 0;                  // 2 c^2 + 1
  bool range3_persistence_ok = false;  // max consecutive range-3 run < beta
};

/// Range occupancies, per-range length statistics, and the fraction of
/// phases violating length <= 2 alpha min(n sqrt(ln n)/sqrt(a),
/// n (ln n)^{1/3} / b^{1/3}) (a = 0 or b = 0 drops that argument; n = 1,
/// where ln n = 0, is excluded from the check).
RangeReport phase_stats(const std::vector<PhaseRecord>& records, double alpha = 4.0,
                        double c = 10.0);

struct EquivalenceReport {
  std::uint64_t phases = 0;
  double mean_phase_length = 0;
  double exact_latency = 0;       // from the exact scan-validate system chain
  double latency_rel_error = 0;
  double max_start_deviation = 0;  // empirical phase-start mass vs exact
                                   // post-success conditional, max over states
};

/// Compares the bins game against the exact system chain: mean phase length
/// vs the chain's expected steps between successes, and the phase-start
/// (a, b) distribution vs the chain's post-success conditional distribution.
EquivalenceReport bins_vs_chain(std::uint32_t n, std::uint64_t phases, std::uint64_t seed);

}  // namespace lfa::bins
