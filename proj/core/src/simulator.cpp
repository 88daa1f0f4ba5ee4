#include "lfa/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lfa::sim {

SchedulerSpec SchedulerSpec::weighted(std::vector<double> w, double theta) {
  SchedulerSpec spec;
  spec.kind = SchedulerKind::Weighted;
  spec.weights = std::move(w);
  spec.theta = theta;
  return spec;
}

SchedulerSpec SchedulerSpec::with_crashes(std::map<std::uint32_t, std::uint64_t> crashes) {
  SchedulerSpec spec;
  spec.kind = SchedulerKind::UniformWithCrashes;
  spec.crash_times = std::move(crashes);
  return spec;
}

Scheduler::Scheduler(const SchedulerSpec& spec, std::uint32_t n, std::uint64_t seed)
    : n_(n), spec_(spec), rng_(seed) {
  if (spec.kind == SchedulerKind::Weighted) {
    alias_.emplace(spec.weights);
  } else {
    active_list_.reserve(n);
    for (std::uint32_t p = 0; p < n; ++p)
      if (spec.crash_times.count(p) == 0 || spec.crash_times.at(p) > 0)
        active_list_.push_back(p);
    for (const auto& [p, step] : spec.crash_times)
      if (step > 0) crash_events_.push_back({step, p});
    std::sort(crash_events_.begin(), crash_events_.end());
  }
}

void Scheduler::advance_epoch(std::uint64_t step) {
  while (next_crash_ < crash_events_.size() && crash_events_[next_crash_].first <= step) {
    std::uint32_t p = crash_events_[next_crash_].second;
    active_list_.erase(std::remove(active_list_.begin(), active_list_.end(), p),
                       active_list_.end());
    ++next_crash_;
  }
}

std::uint32_t Scheduler::process_at(std::uint64_t step) {
  if (spec_.kind == SchedulerKind::Weighted) return alias_->sample(rng_.at(step));
  advance_epoch(step);
  if (active_list_.empty()) throw std::runtime_error("scheduler: no active processes");
  if (active_list_.size() == n_) return rng_.index_at(step, n_);
  return active_list_[rng_.index_at(step, static_cast<std::uint32_t>(active_list_.size()))];
}

bool Scheduler::active(std::uint32_t process, std::uint64_t step) const {
  auto it = spec_.crash_times.find(process);
  return it == spec_.crash_times.end() || step < it->second;
}

std::uint32_t Scheduler::active_count(std::uint64_t step) const {
  std::uint32_t count = 0;
  for (std::uint32_t p = 0; p < n_; ++p) count += active(p, step);
  return count;
}

Scheduler make_scheduler(const SchedulerSpec& spec, std::uint32_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("scheduler needs at least one process");
  switch (spec.kind) {
    case SchedulerKind::Uniform:
      if (!spec.weights.empty())
        throw std::invalid_argument("uniform scheduler takes no weights");
      if (!spec.crash_times.empty())
        throw std::invalid_argument("uniform scheduler takes no crash times");
      break;
    case SchedulerKind::Weighted: {
      if (!spec.crash_times.empty())
        throw std::invalid_argument("weighted scheduler does not support crashes");
      if (spec.weights.size() != n)
        throw std::invalid_argument("weighted scheduler needs one weight per process");
      if (!(spec.theta > 0 && spec.theta <= 1))
        throw std::invalid_argument("theta must be in (0, 1]");
      double sum = 0;
      for (double w : spec.weights) {
        if (w < spec.theta)
          throw std::invalid_argument("weight below theta violates weak fairness");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("weights must sum to 1");
      break;
    }
    case SchedulerKind::UniformWithCrashes:
      if (!spec.weights.empty())
        throw std::invalid_argument("uniform-with-crashes scheduler takes no weights");
      for (const auto& [p, step] : spec.crash_times) {
        (void)step;
        if (p >= n) throw std::invalid_argument("crash time for out-of-range process");
      }
      break;
  }
  return Scheduler(spec, n, seed);
}

namespace {

Trace make_trace(std::uint32_t n, std::uint32_t q, std::uint32_t s, std::uint64_t steps,
                 std::uint64_t seed, const SchedulerSpec& sched) {
  Trace tr;
  tr.n = n;
  tr.q = q;
  tr.s = s;
  tr.total_steps = steps;
  tr.seed = seed;
  tr.completions.resize(n);
  tr.success_at_step.assign(steps, 0);
  tr.crash_times = sched.crash_times;
  return tr;
}

}  // namespace

Trace run_scu(const ScuProgram& program, std::uint32_t n, std::uint64_t steps,
              std::uint64_t seed, const SchedulerSpec& sched) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (program.s < 1) throw std::invalid_argument("scan length s must be >= 1");
  Scheduler scheduler = make_scheduler(sched, n, seed);
  Trace tr = make_trace(n, program.q, program.s, steps, seed, sched);

  const std::uint32_t q = program.q, s = program.s;
  std::vector<std::uint32_t> pos(n, 0);
  std::vector<std::uint64_t> armed(n, 0);
  std::uint64_t version = 0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    std::uint32_t p = scheduler.process_at(t);
    if (pos[p] < q) {
      ++pos[p];
    } else if (pos[p] < q + s) {
      if (pos[p] == q) armed[p] = version;  // scan start: read the decision register
      ++pos[p];
    } else {
      if (armed[p] == version) {
        ++version;
        tr.success_at_step[t] = 1;
        tr.completions[p].push_back(t);
        pos[p] = 0;
      } else {
        pos[p] = q;
      }
    }
  }
  tr.final_version = version;
  return tr;
}

Trace run_parallel(std::uint32_t q, std::uint32_t n, std::uint64_t steps,
                   std::uint64_t seed, const SchedulerSpec& sched) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  Scheduler scheduler = make_scheduler(sched, n, seed);
  Trace tr = make_trace(n, q, 0, steps, seed, sched);

  std::vector<std::uint32_t> counter(n, 0);
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    std::uint32_t p = scheduler.process_at(t);
    if (++counter[p] == q) {
      counter[p] = 0;
      ++successes;
      tr.success_at_step[t] = 1;
      tr.completions[p].push_back(t);
    }
  }
  tr.final_version = successes;
  return tr;
}

Trace run_fai(std::uint32_t n, std::uint64_t steps, std::uint64_t seed,
              const SchedulerSpec& sched) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  Scheduler scheduler = make_scheduler(sched, n, seed);
  Trace tr = make_trace(n, 0, 0, steps, seed, sched);

  std::vector<char> holds(n, 1);  // initially every process has the current value
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    std::uint32_t p = scheduler.process_at(t);
    if (holds[p]) {
      std::fill(holds.begin(), holds.end(), 0);
      holds[p] = 1;
      ++successes;
      tr.success_at_step[t] = 1;
      tr.completions[p].push_back(t);
    } else {
      holds[p] = 1;
    }
  }
  tr.final_version = successes;
  return tr;
}

UnboundedResult run_unbounded_lf(std::uint32_t n, std::uint64_t steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  SchedulerSpec uniform;
  Scheduler scheduler = make_scheduler(uniform, n, seed);
  UnboundedResult result;
  result.trace = make_trace(n, 0, 0, steps, seed, uniform);
  result.stats.longest_losing_streak.assign(n, 0);

  std::vector<std::uint64_t> v(n, 0), backoff(n, 0), streak(n, 0);
  std::uint64_t c = 0;
  bool have_winner = false;
  for (std::uint64_t t = 0; t < steps; ++t) {
    std::uint32_t p = scheduler.process_at(t);
    if (backoff[p] > 0) {
      --backoff[p];  // dummy read
      continue;
    }
    if (v[p] == c) {
      ++c;
      v[p] = c;
      streak[p] = 0;
      result.trace.success_at_step[t] = 1;
      result.trace.completions[p].push_back(t);
      if (!have_winner) {
        have_winner = true;
        result.stats.first_winner = p;
      }
      if (p == result.stats.first_winner) ++result.stats.successes_by_first_winner;
      ++result.stats.total_successes;
    } else {
      v[p] = c;
      backoff[p] = static_cast<std::uint64_t>(n) * n * v[p];
      ++streak[p];
      result.stats.longest_losing_streak[p] =
          std::max(result.stats.longest_losing_streak[p], streak[p]);
    }
  }
  result.trace.final_version = c;
  return result;
}

ProgressReport check_progress(const Trace& trace, std::uint64_t window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  ProgressReport report;
  report.max_completion_gap.assign(trace.n, 0);
  report.completed_every_window.assign(trace.n, 0);
  const std::uint64_t num_windows = trace.total_steps / window;
  report.all_complete_every_window = true;
  for (std::uint32_t p = 0; p < trace.n; ++p) {
    const auto& comps = trace.completions[p];
    // Longest interval without a completion, counting the censored stretches
    // before the first and after the last one.
    std::uint64_t max_gap = trace.total_steps;
    if (!comps.empty()) {
      max_gap = std::max(comps.front() + 1, trace.total_steps - comps.back());
      for (std::size_t k = 1; k < comps.size(); ++k)
        max_gap = std::max(max_gap, comps[k] - comps[k - 1]);
    }
    report.max_completion_gap[p] = max_gap;

    bool every_window = true;
    std::size_t idx = 0;
    for (std::uint64_t w = 0; w < num_windows; ++w) {
      std::uint64_t lo = w * window, hi = lo + window;
      while (idx < comps.size() && comps[idx] < lo) ++idx;
      if (idx >= comps.size() || comps[idx] >= hi) {
        every_window = false;
        break;
      }
    }
    report.completed_every_window[p] = every_window;

    auto it = trace.crash_times.find(p);
    bool crashed = it != trace.crash_times.end() && it->second < trace.total_steps;
    if (!crashed && !every_window) report.all_complete_every_window = false;
  }
  return report;
}

double max_progress_bound(double theta, std::uint64_t T) {
  if (!(theta > 0 && theta <= 1)) throw std::invalid_argument("theta must be in (0, 1]");
  if (T < 1) throw std::invalid_argument("T must be >= 1");
  return std::pow(1.0 / theta, static_cast<double>(T));
}

}  // namespace lfa::sim
