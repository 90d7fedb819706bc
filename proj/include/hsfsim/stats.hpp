#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "hsfsim/engine.hpp"

namespace hsf {

// Mean and 95% confidence half-width (normal approximation, z = 1.96,
// sample standard deviation).
inline std::pair<double, double> estimate(const std::vector<double>& samples) {
  const size_t k = samples.size();
  if (k < 2)
    throw std::invalid_argument("estimate needs at least 2 samples, got " +
                                std::to_string(k));
  double sum = 0;
  for (double x : samples) sum += x;
  const double mean = sum / static_cast<double>(k);
  double ss = 0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sdev = std::sqrt(ss / static_cast<double>(k - 1));
  const double half_width = 1.96 * sdev / std::sqrt(static_cast<double>(k));
  return {mean, half_width};
}

struct Interval {
  double lo = 0;
  double hi = 1;
};

namespace detail {

// P(X <= k) for X ~ Binomial(n, p), summed in log space.
inline double binom_cdf(uint32_t k, uint32_t n, double p) {
  if (p <= 0) return 1.0;
  if (p >= 1) return k >= n ? 1.0 : 0.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(n + 1.0);
  double sum = 0;
  for (uint32_t i = 0; i <= k; ++i) {
    const double lterm = lgn - std::lgamma(i + 1.0) -
                         std::lgamma(n - i + 1.0) + i * lp + (n - i) * lq;
    sum += std::exp(lterm);
  }
  return sum < 1.0 ? sum : 1.0;
}

}  // namespace detail

// Exact (Clopper-Pearson) binomial confidence interval for a proportion,
// located by bisection on the binomial tails.
inline Interval clopper_pearson(uint32_t successes, uint32_t trials,
                                double alpha = 0.05) {
  if (trials == 0) throw std::invalid_argument("interval over zero trials");
  if (successes > trials)
    throw std::invalid_argument("more successes than trials");
  Interval out;
  const double tail = alpha / 2;
  if (successes == 0) {
    out.lo = 0;
  } else {
    // Smallest p with P(X >= successes) = tail; the tail grows with p.
    double lo = 0, hi = 1;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double upper_tail =
          1.0 - detail::binom_cdf(successes - 1, trials, mid);
      (upper_tail < tail ? lo : hi) = mid;
    }
    out.lo = 0.5 * (lo + hi);
  }
  if (successes == trials) {
    out.hi = 1;
  } else {
    // Largest p with P(X <= successes) = tail; that tail shrinks with p.
    double lo = 0, hi = 1;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      const double lower_tail = detail::binom_cdf(successes, trials, mid);
      (lower_tail > tail ? lo : hi) = mid;
    }
    out.hi = 0.5 * (lo + hi);
  }
  return out;
}

// One Monte Carlo sweep cell.
struct EstimateRow {
  Ordering ordering = Ordering::SWtoNE_x;
  Variant variant{};
  uint32_t runs = 0;
  double mean_acks = 0;
  double hw_acks = 0;
  double mean_time = 0;
  double hw_time = 0;
  double deadlock_fraction = 0;
  uint32_t deadlock_count = 0;
};

inline unsigned worker_count(uint32_t runs) {
  unsigned workers = std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (const char* env = std::getenv("HSF_SIM_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) workers = static_cast<unsigned>(parsed);
  }
  if (workers > runs) workers = runs ? runs : 1;
  return workers;
}

// Runs `runs` independent seeded simulations and aggregates them. Run i
// always uses derive_seed(base_seed, first_run + i) and lands in slot i,
// so the row never depends on how many workers executed it.
inline EstimateRow run_experiment(const GridSpec& spec, Ordering ordering,
                                  uint32_t horizon, uint32_t runs,
                                  uint64_t base_seed, EngineOptions opts = {},
                                  uint32_t first_run = 0) {
  if (runs < 2) throw std::invalid_argument("an experiment needs >= 2 runs");
  const LinkTable links = build_links(spec);
  const std::vector<Coord> seq = generate_sequence(spec.n, ordering);

  std::vector<double> acks(runs), times(runs);
  std::vector<char> deadlocked(runs, 0);
  std::atomic<uint32_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure;
  bool failure_was_invariant = false;
  std::mutex failure_mutex;

  auto work = [&]() {
    for (;;) {
      const uint32_t i = next.fetch_add(1);
      if (i >= runs || failed.load()) return;
      try {
        World w = make_world(spec, links, seq, opts);
        RandomResolver r(derive_seed(base_seed, first_run + i));
        const RunResult res = run(w, horizon, r);
        acks[i] = res.acks;
        times[i] = res.time;
        deadlocked[i] = res.deadlocked ? 1 : 0;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        failed.store(true);
        if (failure.empty()) {
          failure = e.what();
          failure_was_invariant =
              dynamic_cast<const invariant_error*>(&e) != nullptr;
        }
        return;
      }
    }
  };

  const unsigned workers = worker_count(runs);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) {
    if (failure_was_invariant) throw invariant_error(failure);
    throw std::runtime_error("experiment run failed: " + failure);
  }

  EstimateRow row;
  row.ordering = ordering;
  row.variant = spec.variant;
  row.runs = runs;
  std::tie(row.mean_acks, row.hw_acks) = estimate(acks);
  std::tie(row.mean_time, row.hw_time) = estimate(times);
  for (char d : deadlocked) row.deadlock_count += d;
  row.deadlock_fraction =
      static_cast<double>(row.deadlock_count) / static_cast<double>(runs);
  return row;
}

}  // namespace hsf
