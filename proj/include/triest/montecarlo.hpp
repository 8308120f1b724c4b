#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace triest {

/// Worker count from TRIEST_THREADS, else the hardware concurrency.
inline unsigned default_threads() {
  if (const char* env = std::getenv("TRIEST_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, trials) on up to `threads` workers and returns the
/// results indexed by trial, so the output does not depend on scheduling.
template <class Fn>
auto run_trials(std::size_t trials, unsigned threads, Fn&& fn) {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> results(trials);
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < trials; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < trials; i = next++) {
        try {
          results[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Sample moments of a set of Monte-Carlo outcomes.
struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;  // of the mean
  double min = 0.0;
  double max = 0.0;
  double fourth_central = 0.0;

  /// Asymptotic standard error of the sample variance.
  double variance_std_error() const {
    if (n < 4) return std::numeric_limits<double>::infinity();
    const double nd = static_cast<double>(n);
    const double v = variance;
    return std::sqrt(std::max(0.0, (fourth_central - v * v * (nd - 3.0) / (nd - 1.0)) / nd));
  }
};

inline Moments summarize(std::span<const double> xs) {
  Moments m;
  m.n = xs.size();
  if (xs.empty()) return m;
  m.min = *std::ranges::min_element(xs);
  m.max = *std::ranges::max_element(xs);
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  double s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  if (m.n > 1) {
    m.variance = s2 / static_cast<double>(m.n - 1);
    m.std_error = std::sqrt(m.variance / static_cast<double>(m.n));
  }
  m.fourth_central = s4 / static_cast<double>(m.n);
  return m;
}

/// Query points of a stream of `total` events: every multiple of `cadence`
/// plus the final event, i.e. ceil(total / cadence) points.
inline bool is_query_point(std::uint64_t t, std::uint64_t total, std::uint64_t cadence) {
  return t % cadence == 0 || t == total;
}

}  // namespace triest
