#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lfa/simulator.hpp"

namespace lfa::metrics {

/// Empirical latencies from a trace. System latency W is the mean gap
/// between consecutive completions (any process); individual latency W_i is
/// the mean gap between completions of process i. Standard errors come from
/// batch means over the gap sequences.
struct LatencyReport {
  double W = 0;
  double W_se = 0;
  std::vector<double> W_i;     // NaN for processes with fewer than two completions
  std::vector<double> W_i_se;  // NaN likewise
  double completion_rate = 0;  // completions per step after warm-up
  double mu = 0;               // same as completion_rate
  std::uint64_t successes_used = 0;
  std::uint64_t steps_used = 0;
  std::uint64_t warmup_steps = 0;
};

/// Discards a warm-up prefix of 10 n (q + s + 1) steps, then estimates W and
/// W_i. Throws std::runtime_error if fewer than 100 completions remain.
LatencyReport estimate_latencies(const sim::Trace& trace);

enum class Model { Scu, Fai, Parallel };

struct ComparisonReport {
  double W_exact = 0;
  double W_emp = 0;
  double w_rel_error = 0;
  std::vector<double> wi_rel_errors;  // vs n * W_exact; NaN where W_i is NaN
  double max_wi_rel_error = 0;        // over non-NaN entries
  LatencyReport sim;
};

/// Runs the step-level simulator under the uniform scheduler and compares
/// against the exact chain latency. The scan-validate chain models the
/// preamble-free single-scan loop, so model Scu requires q = 0, s = 1.
ComparisonReport compare_exact_vs_sim(Model model, std::uint32_t n, std::uint32_t q,
                                      std::uint32_t s, std::uint64_t steps,
                                      std::uint64_t seed);

struct SweepRow {
  std::uint32_t n = 0;
  std::uint32_t k_correct = 0;  // non-crashed processes (= n without crashes)
  std::uint32_t q = 0;
  std::uint32_t s = 0;
  double W = 0;
  double W_over_sqrt_n = 0;  // W / sqrt(k_correct)
  double completion_rate = 0;
  std::string source;  // "exact", "sim", "bins", "crash-sim"
};

enum class SweepMode { Exact, Sim, Bins };

struct SweepBudget {
  std::uint64_t steps = 1000000;   // per point, mode Sim
  std::uint64_t phases = 100000;   // per point, mode Bins
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Least-squares fit of ln(W - q) = gamma ln n + ln C over the larger-n
  // half of the rows; rows with W - q <= 0 are excluded. Degenerate if
  // fewer than two rows survive.
  double gamma = 0;
  double C = 0;
  bool degenerate = false;
  std::uint32_t fit_points = 0;
};

/// Latency as a function of n. Mode Exact solves the system chain (model
/// Scu/Fai/Parallel), Sim runs the step-level simulator, Bins plays the
/// bins game (model Scu only). n_list must be strictly increasing.
SweepResult sweep(Model model, const std::vector<std::uint32_t>& n_list, std::uint32_t q,
                  std::uint32_t s, SweepMode mode, const SweepBudget& budget);

/// One scan-validate run with processes k_correct..n-1 crashed from step 0;
/// the surviving k processes see an undisturbed k-process system.
SweepRow crash_sweep_point(std::uint32_t n, std::uint32_t k_correct, std::uint32_t q,
                           std::uint32_t s, std::uint64_t steps, std::uint64_t seed);

struct CurvePoint {
  std::uint32_t n = 0;
  double completion_rate = 0;
  double scaled_prediction = 0;  // rate_0 * sqrt(n_0) / sqrt(n)
  double worst_case = 0;         // rate_0 * n_0 / n
};

/// Scales the first row's completion rate by 1/sqrt(n) and 1/n for plotting
/// measured throughput against the predicted and worst-case decay.
std::vector<CurvePoint> make_completion_curve(const std::vector<SweepRow>& rows);

}  // namespace lfa::metrics
