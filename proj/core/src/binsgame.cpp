#include "lfa/binsgame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lfa/markov.hpp"
#include "lfa/models.hpp"
#include "lfa/rng.hpp"

namespace lfa::bins {

BinsGame::BinsGame(std::uint32_t n) : n_(n), a_(n), b_(0), balls_(n, 1) {
  if (n == 0) throw std::invalid_argument("bins game needs at least one bin");
}

bool BinsGame::step(std::uint32_t bin) {
  switch (balls_[bin]) {
    case 0:
      balls_[bin] = 1;
      ++a_;
      --b_;
      return false;
    case 1:
      balls_[bin] = 2;
      --a_;
      two_ball_bins_.push_back(bin);
      return false;
    default:
      for (std::uint32_t tb : two_ball_bins_) balls_[tb] = 0;
      two_ball_bins_.clear();
      balls_[bin] = 1;
      b_ = n_ - a_ - 1;
      ++a_;
      return true;
  }
}

namespace {

std::uint8_t classify(std::uint32_t a, std::uint32_t n, double c) {
  if (3.0 * a >= n) return 1;
  if (a * c >= n) return 2;
  return 3;
}

}  // namespace

std::vector<PhaseRecord> run_bins(const BinsConfig& config) {
  if (config.n == 0) throw std::invalid_argument("bins game needs at least one bin");
  if (config.c <= 3.0) throw std::invalid_argument("range constant c must exceed 3");
  BinsGame game(config.n);
  rng::CounterRng rng(config.seed);
  std::vector<PhaseRecord> records;
  records.reserve(config.phases);
  std::uint64_t t = 0;
  while (records.size() < config.phases) {
    PhaseRecord rec;
    rec.a_start = game.ones();
    rec.b_start = game.zeros();
    rec.range = classify(rec.a_start, config.n, config.c);
    std::uint64_t len = 0;
    bool reset = false;
    while (!reset) {
      reset = game.step(rng.index_at(t++, config.n));
      ++len;
    }
    rec.length = len;
    records.push_back(rec);
  }
  return records;
}

namespace {

double percentile(std::vector<std::uint64_t>& sorted, double p) {
  if (sorted.empty()) return 0;
  double idx = p * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(idx);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = idx - static_cast<double>(lo);
  return static_cast<double>(sorted[lo]) * (1.0 - frac) +
         static_cast<double>(sorted[hi]) * frac;
}

}  // namespace

RangeReport phase_stats(const std::vector<PhaseRecord>& records, double alpha, double c) {
  if (alpha < 4.0) throw std::invalid_argument("alpha must be at least 4");
  if (c < 10.0) throw std::invalid_argument("c must be at least 10");
  RangeReport report;
  report.beta = 2.0 * c * c + 1.0;

  std::vector<std::uint64_t> lengths[3];
  std::uint64_t violations = 0;
  std::uint64_t run3 = 0;
  for (const PhaseRecord& rec : records) {
    std::size_t r = rec.range - 1;
    lengths[r].push_back(rec.length);

    if (rec.range == 3) {
      ++run3;
      report.max_consecutive_range3 = std::max(report.max_consecutive_range3, run3);
    } else {
      run3 = 0;
    }

    std::uint32_t n = rec.a_start + rec.b_start;
    double ln_n = std::log(static_cast<double>(n));
    if (ln_n <= 0 || (rec.a_start == 0 && rec.b_start == 0)) continue;
    double bound = std::numeric_limits<double>::infinity();
    if (rec.a_start > 0)
      bound = std::min(bound, n * std::sqrt(ln_n) / std::sqrt(static_cast<double>(rec.a_start)));
    if (rec.b_start > 0)
      bound = std::min(bound, n * std::cbrt(ln_n) / std::cbrt(static_cast<double>(rec.b_start)));
    bound *= 2.0 * alpha;
    ++report.bound_checked;
    if (static_cast<double>(rec.length) > bound) ++violations;
  }

  for (int r = 0; r < 3; ++r) {
    RangeStats& s = report.range[r];
    std::vector<std::uint64_t>& ls = lengths[r];
    s.count = ls.size();
    if (!records.empty())
      s.fraction = static_cast<double>(s.count) / static_cast<double>(records.size());
    if (ls.empty()) continue;
    long double total = 0;
    for (std::uint64_t l : ls) total += l;
    s.mean_length = static_cast<double>(total / static_cast<long double>(ls.size()));
    std::sort(ls.begin(), ls.end());
    s.p50 = percentile(ls, 0.50);
    s.p90 = percentile(ls, 0.90);
    s.p99 = percentile(ls, 0.99);
  }
  if (report.bound_checked > 0)
    report.bound_violation_fraction =
        static_cast<double>(violations) / static_cast<double>(report.bound_checked);
  report.range3_persistence_ok =
      static_cast<double>(report.max_consecutive_range3) < report.beta;
  return report;
}

EquivalenceReport bins_vs_chain(std::uint32_t n, std::uint64_t phases, std::uint64_t seed) {
  BinsConfig config;
  config.n = n;
  config.phases = phases;
  config.seed = seed;
  std::vector<PhaseRecord> records = run_bins(config);

  EquivalenceReport report;
  report.phases = phases;
  long double total = 0;
  for (const PhaseRecord& rec : records) total += rec.length;
  report.mean_phase_length = static_cast<double>(total / static_cast<long double>(phases));

  markov::Chain chain = models::build_scu_system(n);
  markov::Distribution pi = markov::stationary(chain);
  markov::EventRate rate = markov::event_rate(chain, pi);
  report.exact_latency = rate.latency;
  report.latency_rel_error =
      std::abs(report.mean_phase_length - rate.latency) / rate.latency;

  // Post-success conditional: nu(y) = sum over success edges (x, y) of
  // pi_x p_xy / mu. Phase starts sample exactly this distribution (the first
  // phase starts from the all-ones state instead; its weight is 1/phases).
  std::vector<double> nu(chain.num_states, 0.0);
  for (std::uint32_t x = 0; x < chain.num_states; ++x) {
    for (const markov::Edge& e : chain.row(x)) {
      if (e.event) nu[e.to] += pi[x] * e.prob();
    }
  }
  for (double& v : nu) v /= rate.mu;

  std::vector<double> emp(chain.num_states, 0.0);
  for (const PhaseRecord& rec : records) {
    std::uint32_t idx = models::scu_system_index(n, rec.a_start, rec.b_start);
    emp[idx] += 1.0 / static_cast<double>(phases);
  }
  double dev = 0;
  for (std::uint32_t i = 0; i < chain.num_states; ++i)
    dev = std::max(dev, std::abs(emp[i] - nu[i]));
  report.max_start_deviation = dev;
  return report;
}

}  // namespace lfa::bins
