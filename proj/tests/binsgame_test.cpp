#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lfa/binsgame.hpp"
#include "lfa/rng.hpp"

using namespace lfa;

TEST_CASE("a single bin cycles one-two-reset forever") {
  bins::BinsConfig config{1, 100, 5};
  std::vector<bins::PhaseRecord> records = bins::run_bins(config);
  REQUIRE(records.size() == 100);
  for (const bins::PhaseRecord& rec : records) {
    CHECK(rec.length == 2);
    CHECK(rec.a_start == 1);
    CHECK(rec.b_start == 0);
    CHECK(rec.range == 1);
  }
}

TEST_CASE("phase starts always split the bins into ones and zeros") {
  bins::BinsConfig config{16, 2000, 9};
  for (const bins::PhaseRecord& rec : bins::run_bins(config)) {
    CHECK(rec.a_start + rec.b_start == 16);
    CHECK(rec.length >= 1);
    CHECK(rec.range >= 1);
    CHECK(rec.range <= 3);
  }
}

TEST_CASE("throw-by-throw bookkeeping follows the transition rule") {
  // Replay the game and recompute (ones, zeros) from the prior category of
  // each hit bin; the game's own counters must match at every throw.
  const std::uint32_t n = 6;
  bins::BinsGame game(n);
  rng::CounterRng rng(33);
  std::uint32_t a = n, b = 0;
  for (std::uint64_t t = 0; t < 20000; ++t) {
    std::uint32_t bin = rng.index_at(t, n);
    std::uint8_t before = game.balls(bin);
    bool reset = game.step(bin);
    if (before == 0) {
      ++a;
      --b;
      CHECK_FALSE(reset);
    } else if (before == 1) {
      --a;
      CHECK_FALSE(reset);
    } else {
      CHECK(reset);
      b = n - a - 1;
      ++a;
    }
    CHECK(game.ones() == a);
    CHECK(game.zeros() == b);
    CHECK(game.ones() + game.zeros() + game.twos() == n);
  }
}

TEST_CASE("mean phase length approaches the two-process chain latency") {
  bins::BinsConfig config{2, 100000, 12};
  std::vector<bins::PhaseRecord> records = bins::run_bins(config);
  long double total = 0;
  for (const bins::PhaseRecord& rec : records) total += rec.length;
  double mean = static_cast<double>(total / static_cast<long double>(records.size()));
  CHECK(mean == doctest::Approx(20.0 / 7).epsilon(0.03));
}

TEST_CASE("phase records are deterministic in the seed") {
  bins::BinsConfig config{8, 500, 77};
  std::vector<bins::PhaseRecord> a = bins::run_bins(config);
  std::vector<bins::PhaseRecord> b = bins::run_bins(config);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].a_start == b[i].a_start);
    CHECK(a[i].length == b[i].length);
  }
  config.seed = 78;
  std::vector<bins::PhaseRecord> c = bins::run_bins(config);
  bool differs = false;
  for (std::size_t i = 0; i < std::min(a.size(), c.size()); ++i)
    differs |= a[i].length != c[i].length;
  CHECK(differs);
}

TEST_CASE("range statistics, length bound, and persistence") {
  bins::BinsConfig config{1024, 10000, 21};
  std::vector<bins::PhaseRecord> records = bins::run_bins(config);
  bins::RangeReport report = bins::phase_stats(records);

  CHECK(report.range[0].fraction + report.range[1].fraction + report.range[2].fraction ==
        doctest::Approx(1.0));
  // Contention keeps the game in the first range almost always.
  CHECK(report.range[0].fraction > 0.9);
  CHECK(report.range[2].fraction <= 0.001);
  CHECK(report.bound_violation_fraction <= 0.01);
  CHECK(report.range3_persistence_ok);
  CHECK(report.beta == doctest::Approx(201.0));
  CHECK(report.range[0].p50 <= report.range[0].p90);
  CHECK(report.range[0].p90 <= report.range[0].p99);
  CHECK(report.range[0].mean_length > 1.0);

  SUBCASE("constant floors are enforced") {
    CHECK_THROWS_AS(bins::phase_stats(records, 3.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(bins::phase_stats(records, 4.0, 9.0), std::invalid_argument);
  }
}

TEST_CASE("synthetic records with full bins all land in range one") {
  std::vector<bins::PhaseRecord> records(50);
  for (bins::PhaseRecord& rec : records) {
    rec.a_start = 100;
    rec.b_start = 0;
    rec.length = 5;
    rec.range = 1;
  }
  bins::RangeReport report = bins::phase_stats(records);
  CHECK(report.range[0].count == 50);
  CHECK(report.range[0].mean_length == doctest::Approx(5.0));
  CHECK(report.max_consecutive_range3 == 0);
}

TEST_CASE("game-versus-chain equivalence at small n") {
  bins::EquivalenceReport report = bins::bins_vs_chain(2, 100000, 3);
  CHECK(report.exact_latency == doctest::Approx(20.0 / 7).epsilon(1e-9));
  CHECK(report.latency_rel_error < 0.02);
  CHECK(report.max_start_deviation < 0.02);

  bins::EquivalenceReport big = bins::bins_vs_chain(8, 100000, 4);
  CHECK(big.latency_rel_error < 0.02);
}
