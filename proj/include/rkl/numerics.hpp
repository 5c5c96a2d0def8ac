#pragma once

// Small numerical utilities shared across the library: compensated
// summation, the digamma function, shortest round-trip float formatting
// and a minimal deterministic parallel loop.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <thread>
#include <vector>

namespace rkl {

// Raised when an algorithm detects that its own result cannot be trusted
// (lost positivity, failed stability recheck).  Parameter and domain
// violations use std::invalid_argument / std::domain_error instead.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Kahan-Babuska-Neumaier compensated accumulator.  The carry term is kept
// across the whole summation so the result is exact to ~1 ulp of the
// condition of the sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double v) : sum_(v) {}

  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      carry_ += (sum_ - t) + v;
    else
      carry_ += (v - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

// Digamma for positive real argument: recurrence shift into x >= 12, then
// the asymptotic series.  Absolute error below 1e-15 on (0, inf).
inline double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: argument must be positive");
  double acc = 0.0;
  while (x < 12.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli tail: 1/12 x^-2 - 1/120 x^-4 + 1/252 x^-6 - 1/240 x^-8 + 1/132 x^-10
  const double series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return acc + std::log(x) - 0.5 * inv - series;
}

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_double: cannot parse '" + std::string(s) + "'");
  return v;
}

// Blocked parallel loop.  Each index is processed exactly once and workers
// write to disjoint slots chosen by the caller, so results do not depend on
// scheduling.  threads <= 1 runs inline.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned use = threads == 0 ? hw : std::min(threads, hw);
  use = static_cast<unsigned>(std::min<std::size_t>(use, n));
  if (use <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(use);
  const std::size_t chunk = (n + use - 1) / use;
  for (unsigned t = 0; t < use; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace rkl
