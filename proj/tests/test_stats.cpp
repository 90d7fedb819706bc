#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <vector>

#include "hsfsim/stats.hpp"

using namespace hsf;

namespace {

bool rows_identical(const EstimateRow& a, const EstimateRow& b) {
  return a.ordering == b.ordering && a.variant == b.variant &&
         a.runs == b.runs && a.mean_acks == b.mean_acks &&
         a.hw_acks == b.hw_acks && a.mean_time == b.mean_time &&
         a.hw_time == b.hw_time &&
         a.deadlock_fraction == b.deadlock_fraction &&
         a.deadlock_count == b.deadlock_count;
}

}  // namespace

TEST_CASE("sample mean and confidence half-width", "[stats]") {
  SECTION("constant samples have zero width") {
    auto [mean, hw] = estimate({3.0, 3.0, 3.0, 3.0});
    CHECK(mean == 3.0);
    CHECK(hw == 0.0);
  }
  SECTION("two-point sample") {
    auto [mean, hw] = estimate({0.0, 10.0});
    CHECK_THAT(mean, Catch::Matchers::WithinAbs(5.0, 1e-12));
    // s = sqrt(50), hw = 1.96 * s / sqrt(2) = 1.96 * 5
    CHECK_THAT(hw, Catch::Matchers::WithinAbs(9.80, 1e-9));
  }
  SECTION("width shrinks like 1/sqrt(k) for a repeated sample") {
    std::vector<double> small, big;
    for (int i = 0; i < 50; ++i) {
      small.push_back(i % 2 ? 1.0 : 0.0);
    }
    for (int rep = 0; rep < 4; ++rep)
      big.insert(big.end(), small.begin(), small.end());
    auto [m1, h1] = estimate(small);
    auto [m2, h2] = estimate(big);
    CHECK_THAT(m2, Catch::Matchers::WithinAbs(m1, 1e-12));
    CHECK_THAT(h1 / h2, Catch::Matchers::WithinAbs(2.0, 0.02));
  }
  SECTION("fewer than two samples is an error") {
    CHECK_THROWS_AS(estimate({}), std::invalid_argument);
    CHECK_THROWS_AS(estimate({1.0}), std::invalid_argument);
  }
}

TEST_CASE("exact binomial proportion intervals", "[stats]") {
  struct OracleRow {
    uint32_t k, n;
    double lo, hi;
  };
  // Reference values computed with an independent beta-quantile
  // implementation (scipy.stats.beta.ppf), alpha = 0.05.
  const OracleRow table[] = {
      {0, 1000, 0.000000, 0.003682},  {1, 10, 0.002529, 0.445016},
      {5, 100, 0.016432, 0.112835},   {500, 1000, 0.468549, 0.531451},
      {997, 1000, 0.991258, 0.999381}, {1000, 1000, 0.996318, 1.000000},
      {0, 10, 0.000000, 0.308497},    {3, 3, 0.292402, 1.000000},
      {845, 1000, 0.821059, 0.866889}, {117, 1000, 0.097729, 0.138557},
  };
  for (const OracleRow& row : table) {
    CAPTURE(row.k, row.n);
    const Interval ci = clopper_pearson(row.k, row.n);
    CHECK_THAT(ci.lo, Catch::Matchers::WithinAbs(row.lo, 1e-4));
    CHECK_THAT(ci.hi, Catch::Matchers::WithinAbs(row.hi, 1e-4));
    const double phat = static_cast<double>(row.k) / row.n;
    CHECK(ci.lo <= phat);
    CHECK(ci.hi >= phat);
  }
  SECTION("degenerate endpoints are exact") {
    CHECK(clopper_pearson(0, 50).lo == 0.0);
    CHECK(clopper_pearson(50, 50).hi == 1.0);
  }
  SECTION("bad inputs") {
    CHECK_THROWS_AS(clopper_pearson(0, 0), std::invalid_argument);
    CHECK_THROWS_AS(clopper_pearson(5, 4), std::invalid_argument);
  }
}

TEST_CASE("experiments are reproducible from their seed", "[stats]") {
  const GridSpec spec{4, variants::basic()};
  const EstimateRow a =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 200, 777);
  const EstimateRow b =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 200, 777);
  CHECK(rows_identical(a, b));

  const EstimateRow c =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 200, 778);
  CHECK_FALSE(rows_identical(a, c));

  CHECK(a.runs == 200);
  CHECK(a.variant == variants::basic());
  CHECK(a.ordering == Ordering::SWtoNE_x);
  CHECK(a.deadlock_fraction ==
        static_cast<double>(a.deadlock_count) / 200.0);
}

TEST_CASE("batched runs pool into the full experiment", "[stats]") {
  const GridSpec spec{4, variants::basic()};
  const uint64_t seed = 42;
  const EstimateRow full =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 1000, seed);

  double acks_sum = 0, time_sum = 0;
  uint32_t deadlocks = 0;
  for (uint32_t first = 0; first < 1000; first += 250) {
    const EstimateRow part = run_experiment(spec, Ordering::SWtoNE_x, 300,
                                            250, seed, {}, first);
    acks_sum += 250.0 * part.mean_acks;
    time_sum += 250.0 * part.mean_time;
    deadlocks += part.deadlock_count;
  }
  CHECK_THAT(acks_sum / 1000.0,
             Catch::Matchers::WithinAbs(full.mean_acks, 1e-9));
  CHECK_THAT(time_sum / 1000.0,
             Catch::Matchers::WithinAbs(full.mean_time, 1e-9));
  CHECK(deadlocks == full.deadlock_count);

  // Quadrupling the sample count roughly halves the interval.
  const EstimateRow quarter =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 250, seed);
  REQUIRE(full.hw_acks > 0.0);
  const double ratio = quarter.hw_acks / full.hw_acks;
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
}

TEST_CASE("worker count does not change results", "[stats]") {
  const GridSpec spec{4, variants::acks_ne()};
  setenv("HSF_SIM_THREADS", "1", 1);
  const EstimateRow serial =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 96, 5);
  setenv("HSF_SIM_THREADS", "4", 1);
  const EstimateRow threaded =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 96, 5);
  unsetenv("HSF_SIM_THREADS");
  CHECK(rows_identical(serial, threaded));
}

TEST_CASE("a deadlock-free cell reports full delivery", "[stats]") {
  const GridSpec spec{4, variants::acks_ne_queue(1)};
  const EstimateRow row =
      run_experiment(spec, Ordering::SWtoNE_x, 300, 100, 99);
  CHECK(row.mean_acks == 16.0);
  CHECK(row.hw_acks == 0.0);
  CHECK(row.deadlock_fraction == 0.0);
  CHECK(row.deadlock_count == 0);
  CHECK(row.mean_time < 300.0);
}

TEST_CASE("an experiment needs at least two runs", "[stats]") {
  const GridSpec spec{2, variants::basic()};
  CHECK_THROWS_AS(run_experiment(spec, Ordering::SWtoNE_x, 50, 1, 1),
                  std::invalid_argument);
}
