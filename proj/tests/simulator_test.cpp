#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "lfa/simulator.hpp"

using namespace lfa;

TEST_CASE("a lone process completes on every second step") {
  sim::Trace tr = sim::run_scu({0, 1}, 1, 10, 42, sim::SchedulerSpec::uniform());
  REQUIRE(tr.total_steps == 10);
  CHECK(tr.total_successes() == 5);
  // Read at even steps, successful CAS at odd steps.
  std::vector<std::uint64_t> expect = {1, 3, 5, 7, 9};
  CHECK(tr.completions[0] == expect);
  for (std::uint64_t t = 0; t < 10; ++t) CHECK(static_cast<bool>(tr.success_at_step[t]) == (t % 2 == 1));
}

TEST_CASE("preamble and extra scan reads stretch the solo cycle to q+s+1 steps") {
  sim::Trace tr = sim::run_scu({2, 2}, 1, 25, 7, sim::SchedulerSpec::uniform());
  std::vector<std::uint64_t> expect = {4, 9, 14, 19, 24};
  CHECK(tr.completions[0] == expect);
}

TEST_CASE("uniform scheduler is balanced and deterministic") {
  sim::Scheduler sched = sim::make_scheduler(sim::SchedulerSpec::uniform(), 4, 99);
  std::vector<std::uint64_t> counts(4, 0);
  const std::uint64_t steps = 100000;
  for (std::uint64_t t = 0; t < steps; ++t) ++counts[sched.process_at(t)];
  for (std::uint64_t c : counts) {
    double dev = std::abs(static_cast<double>(c) - steps / 4.0);
    CHECK(dev < 5 * std::sqrt(steps * 0.25 * 0.75));  // five sigma
  }

  sim::Scheduler replay = sim::make_scheduler(sim::SchedulerSpec::uniform(), 4, 99);
  for (std::uint64_t t = 0; t < 100; ++t) CHECK(replay.process_at(t) == sched.process_at(t));
}

TEST_CASE("weighted scheduler follows the weights and validates them") {
  sim::SchedulerSpec spec = sim::SchedulerSpec::weighted({0.7, 0.3}, 0.3);
  sim::Scheduler sched = sim::make_scheduler(spec, 2, 5);
  std::uint64_t zero = 0;
  const std::uint64_t steps = 100000;
  for (std::uint64_t t = 0; t < steps; ++t) zero += sched.process_at(t) == 0;
  CHECK(std::abs(zero / static_cast<double>(steps) - 0.7) < 0.01);

  CHECK_THROWS_WITH_AS(
      sim::make_scheduler(sim::SchedulerSpec::weighted({0.9, 0.1}, 0.2), 2, 0),
      "weight below theta violates weak fairness", std::invalid_argument);
  CHECK_THROWS_WITH_AS(sim::make_scheduler(sim::SchedulerSpec::weighted({0.7, 0.2}, 0.1), 2, 0),
                       "weights must sum to 1", std::invalid_argument);
  CHECK_THROWS_AS(sim::make_scheduler(sim::SchedulerSpec::weighted({1.0}, 0.5), 2, 0),
                  std::invalid_argument);
}

TEST_CASE("crashed processes stop being scheduled at their crash step") {
  std::map<std::uint32_t, std::uint64_t> crashes = {{2, 100}};
  sim::Scheduler sched = sim::make_scheduler(sim::SchedulerSpec::with_crashes(crashes), 3, 11);
  CHECK(sched.active_count(0) == 3);
  CHECK(sched.active_count(100) == 2);
  CHECK(sched.active(2, 99));
  CHECK_FALSE(sched.active(2, 100));
  bool seen_after = false;
  for (std::uint64_t t = 100; t < 5000; ++t) seen_after |= (sched.process_at(t) == 2);
  CHECK_FALSE(seen_after);

  // Survivors stay balanced.
  std::uint64_t zero = 0;
  const std::uint64_t steps = 100000;
  for (std::uint64_t t = 100; t < steps; ++t) zero += sched.process_at(t) == 0;
  CHECK(std::abs(zero / static_cast<double>(steps - 100) - 0.5) < 0.02);

  CHECK_THROWS_AS(
      sim::make_scheduler(sim::SchedulerSpec::with_crashes({{5, 0}}), 3, 0),
      std::invalid_argument);
}

TEST_CASE("crashing every process leaves nothing to schedule") {
  sim::Scheduler sched =
      sim::make_scheduler(sim::SchedulerSpec::with_crashes({{0, 0}, {1, 0}}), 2, 3);
  CHECK_THROWS_AS(sched.process_at(0), std::runtime_error);
}

TEST_CASE("traces are reproducible by seed") {
  sim::Trace a = sim::run_scu({0, 1}, 4, 20000, 123, sim::SchedulerSpec::uniform());
  sim::Trace b = sim::run_scu({0, 1}, 4, 20000, 123, sim::SchedulerSpec::uniform());
  sim::Trace c = sim::run_scu({0, 1}, 4, 20000, 124, sim::SchedulerSpec::uniform());
  CHECK(a.completions == b.completions);
  CHECK(a.final_version == b.final_version);
  CHECK(a.completions != c.completions);
}

TEST_CASE("contended scan-validate loop has failed attempts but keeps completing") {
  sim::Trace tr = sim::run_scu({0, 1}, 2, 10000, 9, sim::SchedulerSpec::uniform());
  std::uint64_t total = 0;
  for (const std::vector<std::uint64_t>& c : tr.completions) {
    CHECK_FALSE(c.empty());
    total += c.size();
  }
  CHECK(total == tr.total_successes());
  // Contention forces retries: strictly fewer completions than the solo rate.
  CHECK(tr.total_successes() < 5000);
  CHECK(tr.total_successes() > 2000);
}

TEST_CASE("parallel processes complete every q-th own step") {
  const std::uint32_t n = 2, q = 3;
  const std::uint64_t steps = 9000, seed = 31;
  sim::Trace tr = sim::run_parallel(q, n, steps, seed, sim::SchedulerSpec::uniform());

  // Replay the schedule and count per-process steps.
  sim::Scheduler sched = sim::make_scheduler(sim::SchedulerSpec::uniform(), n, seed);
  std::vector<std::uint64_t> own(n, 0);
  std::vector<std::vector<std::uint64_t>> expect(n);
  for (std::uint64_t t = 0; t < steps; ++t) {
    std::uint32_t p = sched.process_at(t);
    if (++own[p] % q == 0) expect[p].push_back(t);
  }
  CHECK(tr.completions == expect);
}

TEST_CASE("counter simulation matches its chain's stationary success rate") {
  // Two processes: the exact per-step success probability is 2/3.
  const std::uint64_t steps = 300000;
  sim::Trace tr = sim::run_fai(2, steps, 17, sim::SchedulerSpec::uniform());
  double rate = static_cast<double>(tr.total_successes()) / static_cast<double>(steps);
  CHECK(rate == doctest::Approx(2.0 / 3).epsilon(0.01));

  sim::Trace solo = sim::run_fai(1, 100, 3, sim::SchedulerSpec::uniform());
  CHECK(solo.total_successes() == 100);
}

TEST_CASE("unbounded counter race: first winner starves the rest") {
  std::uint32_t monopolies = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sim::UnboundedResult res = sim::run_unbounded_lf(8, 20000, seed);
    CHECK(res.stats.total_successes == res.trace.total_successes());
    CHECK(res.stats.successes_by_first_winner <= res.stats.total_successes);
    monopolies += res.stats.monopoly();
  }
  CHECK(monopolies >= 18);

  sim::UnboundedResult solo = sim::run_unbounded_lf(1, 50, 0);
  CHECK(solo.stats.total_successes == 50);
  CHECK(solo.stats.monopoly());
}

TEST_CASE("progress windows and completion gaps") {
  sim::Trace tr;
  tr.n = 2;
  tr.total_steps = 30;
  tr.completions = {{5, 15, 25}, {29}};
  tr.success_at_step.assign(30, 0);
  tr.final_version = 4;

  sim::ProgressReport rep = sim::check_progress(tr, 10);
  CHECK(rep.completed_every_window[0]);
  CHECK_FALSE(rep.completed_every_window[1]);
  CHECK_FALSE(rep.all_complete_every_window);
  CHECK(rep.max_completion_gap[0] == 10);
  CHECK(rep.max_completion_gap[1] == 30);

  tr.crash_times[1] = 0;
  CHECK(sim::check_progress(tr, 10).all_complete_every_window);

  CHECK_THROWS_AS(sim::check_progress(tr, 0), std::invalid_argument);
}

TEST_CASE("scheduled-progress bound is (1/theta)^T") {
  CHECK(sim::max_progress_bound(0.5, 3) == doctest::Approx(8.0));
  CHECK(sim::max_progress_bound(1.0, 10) == doctest::Approx(1.0));
  CHECK_THROWS_AS(sim::max_progress_bound(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sim::max_progress_bound(1.5, 1), std::invalid_argument);
}
