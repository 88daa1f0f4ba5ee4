#include "lfa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lfa/binsgame.hpp"
#include "lfa/markov.hpp"
#include "lfa/models.hpp"
#include "lfa/rng.hpp"

namespace lfa::metrics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct GapEstimate {
  double mean = kNaN;
  double se = kNaN;
};

/// Mean and batch-means standard error of the gaps between consecutive
/// entries of `events` (which must be sorted step indices).
GapEstimate gap_estimate(const std::vector<std::uint64_t>& events) {
  if (events.size() < 2) return {};
  std::size_t gaps = events.size() - 1;
  GapEstimate est;
  est.mean = static_cast<double>(events.back() - events.front()) / static_cast<double>(gaps);
  std::size_t batches = std::min<std::size_t>(30, gaps);
  if (batches < 2) return est;
  std::size_t per_batch = gaps / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    std::size_t lo = b * per_batch;
    std::size_t hi = (b + 1 == batches) ? gaps : lo + per_batch;
    means[b] = static_cast<double>(events[hi] - events[lo]) / static_cast<double>(hi - lo);
  }
  double mean_of_means = 0;
  for (double m : means) mean_of_means += m;
  mean_of_means /= static_cast<double>(batches);
  double var = 0;
  for (double m : means) var += (m - mean_of_means) * (m - mean_of_means);
  var /= static_cast<double>(batches - 1);
  est.se = std::sqrt(var / static_cast<double>(batches));
  return est;
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t n) {
  return rng::mix64(seed ^ (n * 0x9e3779b97f4a7c15ULL));
}

}  // namespace

LatencyReport estimate_latencies(const sim::Trace& trace) {
  LatencyReport report;
  report.warmup_steps =
      10ull * trace.n * (static_cast<std::uint64_t>(trace.q) + trace.s + 1);
  if (report.warmup_steps >= trace.total_steps)
    throw std::runtime_error("trace shorter than the warm-up window; run longer");
  report.steps_used = trace.total_steps - report.warmup_steps;

  std::vector<std::uint64_t> all;
  for (const std::vector<std::uint64_t>& c : trace.completions)
    for (std::uint64_t t : c)
      if (t >= report.warmup_steps) all.push_back(t);
  std::sort(all.begin(), all.end());
  report.successes_used = all.size();
  if (report.successes_used < 100)
    throw std::runtime_error("fewer than 100 completions after warm-up; run longer");

  GapEstimate global = gap_estimate(all);
  report.W = global.mean;
  report.W_se = global.se;
  report.completion_rate =
      static_cast<double>(report.successes_used) / static_cast<double>(report.steps_used);
  report.mu = report.completion_rate;

  report.W_i.assign(trace.n, kNaN);
  report.W_i_se.assign(trace.n, kNaN);
  for (std::uint32_t p = 0; p < trace.n; ++p) {
    std::vector<std::uint64_t> own;
    for (std::uint64_t t : trace.completions[p])
      if (t >= report.warmup_steps) own.push_back(t);
    GapEstimate e = gap_estimate(own);
    report.W_i[p] = e.mean;
    report.W_i_se[p] = e.se;
  }
  return report;
}

namespace {

double exact_latency(Model model, std::uint32_t n, std::uint32_t q) {
  markov::Chain chain;
  switch (model) {
    case Model::Scu:
      chain = models::build_scu_system(n);
      break;
    case Model::Fai:
      return models::fai_expected_return_time(n);
    case Model::Parallel:
      chain = models::build_parallel_system(n, q);
      break;
  }
  markov::Distribution pi = markov::stationary(chain);
  return markov::event_rate(chain, pi).latency;
}

sim::Trace run_model(Model model, std::uint32_t n, std::uint32_t q, std::uint32_t s,
                     std::uint64_t steps, std::uint64_t seed) {
  sim::SchedulerSpec sched = sim::SchedulerSpec::uniform();
  switch (model) {
    case Model::Scu:
      return sim::run_scu({q, s}, n, steps, seed, sched);
    case Model::Fai:
      return sim::run_fai(n, steps, seed, sched);
    case Model::Parallel:
      return sim::run_parallel(q, n, steps, seed, sched);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

ComparisonReport compare_exact_vs_sim(Model model, std::uint32_t n, std::uint32_t q,
                                      std::uint32_t s, std::uint64_t steps,
                                      std::uint64_t seed) {
  if (model == Model::Scu && (q != 0 || s != 1))
    throw std::invalid_argument("exact scan-validate chain covers q = 0, s = 1 only");
  ComparisonReport report;
  report.W_exact = exact_latency(model, n, q);
  report.sim = estimate_latencies(run_model(model, n, q, s, steps, seed));
  report.W_emp = report.sim.W;
  report.w_rel_error = std::abs(report.W_emp - report.W_exact) / report.W_exact;
  double exact_wi = static_cast<double>(n) * report.W_exact;
  report.wi_rel_errors.assign(n, kNaN);
  for (std::uint32_t p = 0; p < n; ++p) {
    double wi = report.sim.W_i[p];
    if (std::isnan(wi)) continue;
    report.wi_rel_errors[p] = std::abs(wi - exact_wi) / exact_wi;
    report.max_wi_rel_error = std::max(report.max_wi_rel_error, report.wi_rel_errors[p]);
  }
  return report;
}

SweepResult sweep(Model model, const std::vector<std::uint32_t>& n_list, std::uint32_t q,
                  std::uint32_t s, SweepMode mode, const SweepBudget& budget) {
  if (n_list.empty()) throw std::invalid_argument("empty n list");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    throw std::invalid_argument("n list must be strictly increasing");
  if (mode == SweepMode::Bins && model != Model::Scu)
    throw std::invalid_argument("the bins game models scan-validate only");

  SweepResult result;
  for (std::uint32_t n : n_list) {
    SweepRow row;
    row.n = n;
    row.k_correct = n;
    row.q = q;
    row.s = s;
    switch (mode) {
      case SweepMode::Exact: {
        markov::Chain chain;
        markov::EventRate rate{};
        if (model == Model::Fai) {
          rate.latency = models::fai_expected_return_time(n);
          rate.mu = 1.0 / rate.latency;
        } else {
          chain = model == Model::Scu ? models::build_scu_system(n)
                                      : models::build_parallel_system(n, q);
          markov::Distribution pi = markov::stationary(chain);
          rate = markov::event_rate(chain, pi);
        }
        // The chain schedules one process per step; n steps of the system
        // clock pass per chain step, so the per-process rate is mu / 1 and
        // the system completion rate per scheduled step is mu.
        row.W = rate.latency;
        row.completion_rate = rate.mu;
        row.source = "exact";
        break;
      }
      case SweepMode::Sim: {
        LatencyReport rep = estimate_latencies(
            run_model(model, n, q, s, budget.steps, point_seed(budget.seed, n)));
        row.W = rep.W;
        row.completion_rate = rep.completion_rate;
        row.source = "sim";
        break;
      }
      case SweepMode::Bins: {
        bins::BinsConfig config;
        config.n = n;
        config.phases = budget.phases;
        config.seed = point_seed(budget.seed, n);
        std::vector<bins::PhaseRecord> recs = bins::run_bins(config);
        long double total = 0;
        for (const bins::PhaseRecord& r : recs) total += r.length;
        row.W = static_cast<double>(total / static_cast<long double>(recs.size()));
        row.completion_rate = 1.0 / row.W;
        row.source = "bins";
        break;
      }
    }
    row.W_over_sqrt_n = row.W / std::sqrt(static_cast<double>(row.k_correct));
    result.rows.push_back(row);
  }

  // Fit the tail: the larger-n half of the rows.
  std::size_t first = result.rows.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::uint32_t m = 0;
  for (std::size_t i = first; i < result.rows.size(); ++i) {
    double excess = result.rows[i].W - static_cast<double>(q);
    if (excess <= 0) continue;
    double x = std::log(static_cast<double>(result.rows[i].n));
    double y = std::log(excess);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  result.fit_points = m;
  double denom = m * sxx - sx * sx;
  if (m < 2 || std::abs(denom) < 1e-12) {
    result.degenerate = true;
  } else {
    result.gamma = (m * sxy - sx * sy) / denom;
    result.C = std::exp((sy - result.gamma * sx) / m);
  }
  return result;
}

SweepRow crash_sweep_point(std::uint32_t n, std::uint32_t k_correct, std::uint32_t q,
                           std::uint32_t s, std::uint64_t steps, std::uint64_t seed) {
  if (k_correct == 0 || k_correct > n)
    throw std::invalid_argument("k_correct must be in [1, n]");
  std::map<std::uint32_t, std::uint64_t> crashes;
  for (std::uint32_t p = k_correct; p < n; ++p) crashes[p] = 0;
  sim::SchedulerSpec sched = sim::SchedulerSpec::with_crashes(crashes);
  LatencyReport rep = estimate_latencies(sim::run_scu({q, s}, n, steps, seed, sched));
  SweepRow row;
  row.n = n;
  row.k_correct = k_correct;
  row.q = q;
  row.s = s;
  row.W = rep.W;
  row.W_over_sqrt_n = rep.W / std::sqrt(static_cast<double>(k_correct));
  row.completion_rate = rep.completion_rate;
  row.source = "crash-sim";
  return row;
}

std::vector<CurvePoint> make_completion_curve(const std::vector<SweepRow>& rows) {
  std::vector<CurvePoint> curve;
  if (rows.empty()) return curve;
  double base_rate = rows.front().completion_rate;
  double base_n = static_cast<double>(rows.front().n);
  for (const SweepRow& row : rows) {
    CurvePoint pt;
    pt.n = row.n;
    pt.completion_rate = row.completion_rate;
    pt.scaled_prediction = base_rate * std::sqrt(base_n / static_cast<double>(row.n));
    pt.worst_case = base_rate * base_n / static_cast<double>(row.n);
    curve.push_back(pt);
  }
  return curve;
}

}  // namespace lfa::metrics
