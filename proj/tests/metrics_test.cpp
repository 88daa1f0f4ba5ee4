#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lfa/metrics.hpp"
#include "lfa/simulator.hpp"

using namespace lfa;

TEST_CASE("solo latency is exactly two steps") {
  sim::Trace tr = sim::run_scu({0, 1}, 1, 10000, 1, sim::SchedulerSpec::uniform());
  metrics::LatencyReport rep = metrics::estimate_latencies(tr);
  CHECK(rep.W == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.W_i[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.completion_rate == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(rep.mu == rep.completion_rate);
  CHECK(rep.warmup_steps == 20);
}

TEST_CASE("short traces are rejected") {
  sim::Trace tr = sim::run_scu({0, 1}, 2, 150, 1, sim::SchedulerSpec::uniform());
  CHECK_THROWS_AS(metrics::estimate_latencies(tr), std::runtime_error);
}

TEST_CASE("latency and completion rate are reciprocal within the standard error") {
  sim::Trace tr = sim::run_scu({0, 1}, 2, 1000000, 8, sim::SchedulerSpec::uniform());
  metrics::LatencyReport rep = metrics::estimate_latencies(tr);
  CHECK(rep.W == doctest::Approx(1.0 / rep.mu).epsilon(1e-3));
  CHECK(rep.W_se > 0);
  CHECK(rep.W_se < 0.05);
}

TEST_CASE("uniform scheduling spreads completions fairly across processes") {
  sim::Trace tr = sim::run_scu({0, 1}, 4, 1000000, 15, sim::SchedulerSpec::uniform());
  metrics::LatencyReport rep = metrics::estimate_latencies(tr);
  REQUIRE(rep.successes_used > 10000);
  double wi_min = rep.W_i[0], wi_max = rep.W_i[0];
  for (double wi : rep.W_i) {
    wi_min = std::min(wi_min, wi);
    wi_max = std::max(wi_max, wi);
  }
  CHECK(wi_max / wi_min <= 1.1);
  for (double wi : rep.W_i) CHECK(wi / (4 * rep.W) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("simulation agrees with the exact chains") {
  SUBCASE("scan-validate, two processes") {
    metrics::ComparisonReport rep =
        metrics::compare_exact_vs_sim(metrics::Model::Scu, 2, 0, 1, 1000000, 5);
    CHECK(rep.W_exact == doctest::Approx(20.0 / 7).epsilon(1e-9));
    CHECK(rep.w_rel_error < 0.02);
    CHECK(rep.max_wi_rel_error < 0.03);
  }
  SUBCASE("counter, four processes") {
    metrics::ComparisonReport rep =
        metrics::compare_exact_vs_sim(metrics::Model::Fai, 4, 0, 0, 1000000, 6);
    CHECK(rep.W_exact == doctest::Approx(71.0 / 32).epsilon(1e-9));
    CHECK(rep.w_rel_error < 0.02);
  }
  SUBCASE("parallel, three processes") {
    metrics::ComparisonReport rep =
        metrics::compare_exact_vs_sim(metrics::Model::Parallel, 3, 2, 0, 1000000, 7);
    CHECK(rep.W_exact == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.w_rel_error < 0.02);
    CHECK(rep.max_wi_rel_error < 0.03);
  }
  SUBCASE("scan-validate chain only covers the bare loop") {
    CHECK_THROWS_AS(metrics::compare_exact_vs_sim(metrics::Model::Scu, 2, 3, 1, 1000, 1),
                    std::invalid_argument);
  }
}

TEST_CASE("exact sweep rows reproduce the solved latencies") {
  metrics::SweepResult result = metrics::sweep(
      metrics::Model::Scu, {2, 4, 8}, 0, 1, metrics::SweepMode::Exact, {});
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].W == doctest::Approx(20.0 / 7).epsilon(1e-9));
  CHECK(result.rows[1].W == doctest::Approx(3.992960422).epsilon(1e-8));
  CHECK(result.rows[2].W == doctest::Approx(5.530627093).epsilon(1e-8));
  for (const metrics::SweepRow& row : result.rows) {
    CHECK(row.source == "exact");
    CHECK(row.k_correct == row.n);
    CHECK(row.W_over_sqrt_n == doctest::Approx(row.W / std::sqrt(row.n)));
    CHECK(row.completion_rate == doctest::Approx(1.0 / row.W));
  }
}

TEST_CASE("parallel latency is flat in n, so the fit is degenerate") {
  metrics::SweepResult result = metrics::sweep(
      metrics::Model::Parallel, {2, 4, 8, 16}, 5, 0, metrics::SweepMode::Exact, {});
  for (const metrics::SweepRow& row : result.rows)
    CHECK(row.W == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(result.degenerate);
  CHECK(result.gamma == 0.0);
}

TEST_CASE("counter sweep follows the return-time series") {
  metrics::SweepResult result = metrics::sweep(
      metrics::Model::Fai, {4, 16, 64}, 0, 0, metrics::SweepMode::Exact, {});
  CHECK(result.rows[0].W == doctest::Approx(71.0 / 32).epsilon(1e-12));
  // Return times grow like sqrt(pi n / 2): the fitted exponent reflects it.
  CHECK(result.gamma > 0.3);
  CHECK(result.gamma < 0.7);
}

TEST_CASE("simulated sweep stays close to the exact chain") {
  metrics::SweepBudget budget;
  budget.steps = 200000;
  budget.seed = 77;
  metrics::SweepResult result =
      metrics::sweep(metrics::Model::Scu, {2, 4}, 0, 1, metrics::SweepMode::Sim, budget);
  CHECK(result.rows[0].W == doctest::Approx(20.0 / 7).epsilon(0.1));
  CHECK(result.rows[1].W == doctest::Approx(3.992960422).epsilon(0.1));
  CHECK(result.rows[0].source == "sim");

  metrics::SweepResult again =
      metrics::sweep(metrics::Model::Scu, {2, 4}, 0, 1, metrics::SweepMode::Sim, budget);
  CHECK(result.rows[0].W == again.rows[0].W);
  CHECK(result.rows[1].W == again.rows[1].W);
}

TEST_CASE("bins sweep is reproducible and restricted to scan-validate") {
  metrics::SweepBudget budget;
  budget.phases = 5000;
  budget.seed = 3;
  metrics::SweepResult a =
      metrics::sweep(metrics::Model::Scu, {4, 8}, 0, 1, metrics::SweepMode::Bins, budget);
  metrics::SweepResult b =
      metrics::sweep(metrics::Model::Scu, {4, 8}, 0, 1, metrics::SweepMode::Bins, budget);
  CHECK(a.rows[0].W == b.rows[0].W);
  CHECK(a.rows[0].W == doctest::Approx(3.992960422).epsilon(0.05));
  CHECK(a.rows[0].source == "bins");

  CHECK_THROWS_AS(
      metrics::sweep(metrics::Model::Fai, {4, 8}, 0, 0, metrics::SweepMode::Bins, budget),
      std::invalid_argument);
}

TEST_CASE("sweep validates its n list") {
  CHECK_THROWS_AS(metrics::sweep(metrics::Model::Scu, {}, 0, 1, metrics::SweepMode::Exact, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      metrics::sweep(metrics::Model::Scu, {4, 2}, 0, 1, metrics::SweepMode::Exact, {}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      metrics::sweep(metrics::Model::Scu, {2, 2}, 0, 1, metrics::SweepMode::Exact, {}),
      std::invalid_argument);
}

TEST_CASE("crashing all but one process recovers the solo latency") {
  metrics::SweepRow row = metrics::crash_sweep_point(4, 1, 0, 1, 200000, 9);
  CHECK(row.k_correct == 1);
  CHECK(row.W == doctest::Approx(2.0).epsilon(0.01));
  CHECK(row.source == "crash-sim");
  CHECK(row.W_over_sqrt_n == doctest::Approx(row.W));

  CHECK_THROWS_AS(metrics::crash_sweep_point(4, 0, 0, 1, 1000, 1), std::invalid_argument);
  CHECK_THROWS_AS(metrics::crash_sweep_point(4, 5, 0, 1, 1000, 1), std::invalid_argument);
}

TEST_CASE("completion curve anchors the prediction at the first point") {
  metrics::SweepResult result = metrics::sweep(
      metrics::Model::Scu, {2, 4, 8}, 0, 1, metrics::SweepMode::Exact, {});
  std::vector<metrics::CurvePoint> curve = metrics::make_completion_curve(result.rows);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].scaled_prediction == doctest::Approx(curve[0].completion_rate));
  CHECK(curve[0].worst_case == doctest::Approx(curve[0].completion_rate));
  CHECK(curve[2].scaled_prediction == doctest::Approx(curve[0].completion_rate / 2));
  CHECK(curve[2].worst_case == doctest::Approx(curve[0].completion_rate / 4));
}
