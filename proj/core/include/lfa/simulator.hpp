#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lfa/rng.hpp"

namespace lfa::sim {

enum class SchedulerKind { Uniform, Weighted, UniformWithCrashes };

/// Per-step scheduling distribution over the active processes. Invariants
/// (checked by make_scheduler): weights sum to 1, every active weight is at
/// least theta, crashed processes are never scheduled, and the active set
/// never regrows.
struct SchedulerSpec {
  SchedulerKind kind = SchedulerKind::Uniform;
  std::vector<double> weights;                     // Weighted only, size n
  double theta = 0;                                // fairness floor, in (0, 1]
  std::map<std::uint32_t, std::uint64_t> crash_times;  // process -> first dead step

  static SchedulerSpec uniform() { return {}; }
  static SchedulerSpec weighted(std::vector<double> w, double theta);
  static SchedulerSpec with_crashes(std::map<std::uint32_t, std::uint64_t> crashes);
};

/// Deterministic-given-seed source of process choices. Steps must be queried
/// in non-decreasing order (crash epochs advance monotonically).
class Scheduler {
 public:
  Scheduler(const SchedulerSpec& spec, std::uint32_t n, std::uint64_t seed);

  std::uint32_t process_at(std::uint64_t step);
  bool active(std::uint32_t process, std::uint64_t step) const;
  std::uint32_t num_processes() const { return n_; }
  /// Number of processes still active at `step`.
  std::uint32_t active_count(std::uint64_t step) const;

 private:
  void advance_epoch(std::uint64_t step);

  std::uint32_t n_;
  SchedulerSpec spec_;
  rng::CounterRng rng_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> crash_events_;  // (step, process)
  std::size_t next_crash_ = 0;
  std::vector<std::uint32_t> active_list_;
  std::optional<rng::AliasTable> alias_;  // Weighted only
};

/// Validates `spec` and builds a scheduler. Throws std::invalid_argument
/// on violations (weights not summing to 1, weight below theta, crash times
/// for out-of-range processes).
Scheduler make_scheduler(const SchedulerSpec& spec, std::uint32_t n, std::uint64_t seed);

/// A scan-validate method: q preamble steps, then a loop of s scan reads
/// (the first one reads the decision register and arms the CAS) plus the
/// CAS itself.
struct ScuProgram {
  std::uint32_t q = 0;
  std::uint32_t s = 1;
};

struct Trace {
  std::uint32_t n = 0;
  std::uint32_t q = 0;
  std::uint32_t s = 0;
  std::uint64_t total_steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t final_version = 0;  // register version = total success count
  std::vector<std::vector<std::uint64_t>> completions;  // per-process step indices
  std::vector<char> success_at_step;                    // size total_steps
  std::map<std::uint32_t, std::uint64_t> crash_times;

  std::uint64_t total_successes() const { return final_version; }
};

/// Simulates n processes running the scan-validate method under `sched`.
/// The shared register is a version counter; a CAS succeeds iff the version
/// still equals the version observed at the process's scan start. Success
/// increments the version and restarts the method (preamble included),
/// failure restarts the loop (scan only).
Trace run_scu(const ScuProgram& program, std::uint32_t n, std::uint64_t steps,
              std::uint64_t seed, const SchedulerSpec& sched);

/// Parallel pattern: every scheduled step advances the process's private
/// counter mod q; a wrap to 0 completes an operation. q >= 1.
Trace run_parallel(std::uint32_t q, std::uint32_t n, std::uint64_t steps,
                   std::uint64_t seed, const SchedulerSpec& sched);

/// Fetch-and-increment holder dynamics: a scheduled process holding the
/// current value wins (success) and becomes the only holder; any other
/// scheduled process learns the value and joins the holder set.
Trace run_fai(std::uint32_t n, std::uint64_t steps, std::uint64_t seed,
              const SchedulerSpec& sched);

struct MonopolyStats {
  std::uint32_t first_winner = 0;           // process with the first success
  std::uint64_t total_successes = 0;
  std::uint64_t successes_by_first_winner = 0;
  std::vector<std::uint64_t> longest_losing_streak;  // max consecutive failed CAS per process

  bool monopoly() const { return successes_by_first_winner == total_successes; }
};

struct UnboundedResult {
  Trace trace;
  MonopolyStats stats;
};

/// Unbounded-backoff counter: CAS(C, v, v+1); on success v tracks the new
/// value; on failure the process learns the current value v and performs
/// n^2 * v dummy reads (one per scheduling) before retrying. Uniform
/// scheduler.
UnboundedResult run_unbounded_lf(std::uint32_t n, std::uint64_t steps, std::uint64_t seed);

struct ProgressReport {
  std::vector<std::uint64_t> max_completion_gap;  // per process, in steps
  std::vector<char> completed_every_window;       // per process
  bool all_complete_every_window = false;         // over non-crashed processes
};

/// Per-process maximum gap between consecutive completions and whether every
/// non-crashed process completed at least once in each `window`-step window.
ProgressReport check_progress(const Trace& trace, std::uint64_t window);

/// Expected maximal-progress bound (1/theta)^T for a scheduler with fairness
/// floor theta and a minimal-progress bound of T steps.
double max_progress_bound(double theta, std::uint64_t T);

}  // namespace lfa::sim
