#pragma once

// Point configurations: a finite window of a strictly increasing doubly
// infinite sequence p_n, indexed so that ... < p_{-1} < 0 <= p_0 < ...
// Outside the window the sequence is either an exact shifted integer
// lattice (LatticeTail) or declared absent (NoTail, diagnostics only).
// The lattice tail gives closed forms for every sum/product over the
// exterior points, so no truncation error enters the weights.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rkl/numerics.hpp"

namespace rkl {

enum class TailKind { Lattice, None };

struct TailModel {
  TailKind kind = TailKind::None;
  double shift = 0.0;  // lattice points sit at m + shift, m integer

  static TailModel lattice(double shift) { return {TailKind::Lattice, shift}; }
  static TailModel none() { return {TailKind::None, 0.0}; }
};

struct PointConfiguration {
  std::vector<double> points;  // sorted window positions, |p| <= window_radius
  double window_radius = 0.0;
  int index_offset = 0;  // index of points.front(): -(# negative points)
  TailModel tail;

  bool has_lattice_tail() const { return tail.kind == TailKind::Lattice; }

  // position of index n; n must lie inside the stored window
  double at_index(int n) const { return points[static_cast<std::size_t>(n - index_offset)]; }
  int first_index() const { return index_offset; }
  int last_index() const { return index_offset + static_cast<int>(points.size()) - 1; }
};

namespace detail {

// First lattice value strictly above S and the magnitude of the last one
// strictly below -S.  Nudge loops make the result immune to rounding at
// the window edge.
struct TailStart {
  double a_plus;   // smallest m + shift > S
  double a_minus;  // -(largest m + shift < -S), positive
};

inline TailStart lattice_tail_start(double S, double shift) {
  long long mp = static_cast<long long>(std::floor(S - shift)) + 1;
  while (mp + shift <= S) ++mp;
  while (mp - 1 + shift > S) --mp;
  long long mm = static_cast<long long>(std::ceil(-S - shift)) - 1;
  while (mm + shift >= -S) --mm;
  while (mm + 1 + shift < -S) ++mm;
  return {mp + shift, -(mm + shift)};
}

inline int computed_index_offset(const std::vector<double>& pts) {
  int neg = 0;
  for (double p : pts)
    if (p < 0.0) ++neg;
  return -neg;
}

}  // namespace detail

// Checks the structural invariants: strict monotonicity, the
// p_{-1} < 0 <= p_0 numbering, and window/tail separation.
inline void validate(const PointConfiguration& cfg) {
  if (!(cfg.window_radius > 0.0))
    throw std::invalid_argument("PointConfiguration: window_radius must be positive");
  for (std::size_t i = 0; i + 1 < cfg.points.size(); ++i)
    if (!(cfg.points[i] < cfg.points[i + 1]))
      throw std::invalid_argument("PointConfiguration: points must be strictly increasing");
  for (double p : cfg.points)
    if (std::abs(p) > cfg.window_radius)
      throw std::invalid_argument("PointConfiguration: point outside window");
  if (!cfg.points.empty()) {
    if (cfg.index_offset != detail::computed_index_offset(cfg.points))
      throw std::invalid_argument("PointConfiguration: index_offset breaks p_{-1} < 0 <= p_0");
  }
  if (cfg.has_lattice_tail()) {
    const auto ts = detail::lattice_tail_start(cfg.window_radius, cfg.tail.shift);
    if (!cfg.points.empty()) {
      if (!(cfg.points.back() < ts.a_plus))
        throw std::invalid_argument("PointConfiguration: window overlaps positive tail");
      if (!(cfg.points.front() > -ts.a_minus))
        throw std::invalid_argument("PointConfiguration: window overlaps negative tail");
    }
  }
}

/// Canonical test configuration: the full shifted integer lattice
/// {n + shift} windowed at radius S, exact lattice tail beyond.
inline PointConfiguration make_lattice_config(double window_radius, double shift) {
  if (!(window_radius > 1.0))
    throw std::invalid_argument("make_lattice_config: window_radius must exceed 1");
  if (!(std::abs(shift) < 1.0))
    throw std::invalid_argument("make_lattice_config: |shift| must be < 1");
  if (shift == 0.0)
    throw std::invalid_argument(
        "make_lattice_config: shift places a point at 0; the numbering assigns 0 to index 0 "
        "but a point at the origin is rejected here");
  PointConfiguration cfg;
  cfg.window_radius = window_radius;
  cfg.tail = TailModel::lattice(shift);
  const long long m_lo = static_cast<long long>(std::ceil(-window_radius - shift));
  const long long m_hi = static_cast<long long>(std::floor(window_radius - shift));
  for (long long m = m_lo; m <= m_hi; ++m) {
    const double p = m + shift;
    if (std::abs(p) <= window_radius) cfg.points.push_back(p);
  }
  cfg.index_offset = detail::computed_index_offset(cfg.points);
  validate(cfg);
  return cfg;
}

/// Lattice with deterministic seeded jitter |delta_n| <= min(amplitude *
/// (1+|n|)^exponent, 0.49).  The 0.49 cap keeps the sequence strictly
/// increasing without rejection; an extra cap at the window edge keeps the
/// jittered point inside the window so the lattice tail stays consistent.
inline PointConfiguration make_jittered_config(double window_radius, double amplitude,
                                               double exponent, std::uint64_t seed) {
  if (!(window_radius > 1.0))
    throw std::invalid_argument("make_jittered_config: window_radius must exceed 1");
  if (!(exponent >= 0.0 && exponent < 1.0))
    throw std::invalid_argument("make_jittered_config: exponent must be in [0, 1)");
  if (!(amplitude >= 0.0))
    throw std::invalid_argument("make_jittered_config: amplitude must be >= 0");
  PointConfiguration cfg;
  cfg.window_radius = window_radius;
  cfg.tail = TailModel::lattice(0.5);
  std::mt19937_64 rng(seed);
  auto uniform_pm1 = [&rng] {
    // 53-bit uniform in [0,1); fixed construction keeps streams portable
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  };
  const long long m_lo = static_cast<long long>(std::ceil(-window_radius - 0.5));
  const long long m_hi = static_cast<long long>(std::floor(window_radius - 0.5));
  for (long long n = m_lo; n <= m_hi; ++n) {
    const double base = n + 0.5;
    if (std::abs(base) > window_radius) continue;
    double cap = std::min(amplitude * std::pow(1.0 + std::abs(static_cast<double>(n)), exponent), 0.49);
    cap = std::min(cap, window_radius - std::abs(base));
    cfg.points.push_back(base + cap * uniform_pm1());
  }
  cfg.index_offset = detail::computed_index_offset(cfg.points);
  validate(cfg);
  return cfg;
}

/// N(R): number of points with |p_n| <= R.  Boundary points count as
/// inside; the complementary exterior sums below use the strict |p| > R.
inline long long count_points(const PointConfiguration& cfg, double R) {
  if (!(R >= 0.0)) throw std::invalid_argument("count_points: R must be >= 0");
  long long cnt = 0;
  if (R <= cfg.window_radius) {
    for (double p : cfg.points)
      if (std::abs(p) <= R) ++cnt;
    return cnt;
  }
  if (!cfg.has_lattice_tail())
    throw std::invalid_argument("count_points: R beyond window and no analytic tail");
  cnt = static_cast<long long>(cfg.points.size());
  const auto ts = detail::lattice_tail_start(cfg.window_radius, cfg.tail.shift);
  if (R >= ts.a_plus) cnt += static_cast<long long>(std::floor(R - ts.a_plus)) + 1;
  if (R >= ts.a_minus) cnt += static_cast<long long>(std::floor(R - ts.a_minus)) + 1;
  return cnt;
}

namespace detail {

// Accumulates term(p) over window points selected by sel(p), pairing the
// k-th positive point with the k-th negative one (indices n = k and
// -1-k under the numbering p_{-1} < 0 <= p_0) before adding.  Principal-
// value cancellation then happens term by term: a configuration with
// p_n = -p_{-1-n} cancels exactly.  Unpaired remainders go last.
template <class Term, class Sel>
double paired_window_sum(const PointConfiguration& cfg, Term term, Sel sel) {
  CompensatedSum acc;
  const int lo = cfg.first_index();
  const int hi = cfg.last_index();
  const int kmax = std::max(hi, -1 - lo);
  CompensatedSum leftovers;
  for (int k = 0; k <= kmax; ++k) {
    const bool pos_in = k >= lo && k <= hi;
    const bool neg_in = -1 - k >= lo && -1 - k <= hi;
    double pair = 0.0;
    int used = 0;
    if (pos_in) {
      const double p = cfg.at_index(k);
      if (sel(p)) {
        pair += term(p);
        ++used;
      }
    }
    if (neg_in) {
      const double p = cfg.at_index(-1 - k);
      if (sel(p)) {
        pair += term(p);
        ++used;
      }
    }
    if (used == 2)
      acc.add(pair);
    else if (used == 1)
      leftovers.add(pair);
  }
  acc.add(leftovers.value());
  return acc.value();
}

// Exterior tail sum of 1/p over the lattice beyond radius S:
//   sum_{k>=0} [ 1/(a_plus + k) - 1/(a_minus + k) ] = digamma(a-) - digamma(a+)
inline double lattice_tail_reciprocal_sum(double S, double shift) {
  const auto ts = lattice_tail_start(S, shift);
  return digamma(ts.a_minus) - digamma(ts.a_plus);
}

}  // namespace detail

/// (2R/N) * sum_{|p_n| > R} 1/p_n.  The window part is paired (n, -n);
/// the lattice tail is the closed-form digamma difference.
inline double exterior_tilt(const PointConfiguration& cfg, double R, long long N) {
  if (!(R > 0.0) || R > cfg.window_radius)
    throw std::invalid_argument("exterior_tilt: need 0 < R <= window_radius");
  if (N < 1) throw std::invalid_argument("exterior_tilt: N must be >= 1");
  if (!cfg.has_lattice_tail())
    throw std::invalid_argument("exterior_tilt: undefined without a lattice tail");
  const double win = detail::paired_window_sum(
      cfg, [](double p) { return 1.0 / p; }, [R](double p) { return std::abs(p) > R; });
  const double tail = detail::lattice_tail_reciprocal_sum(cfg.window_radius, cfg.tail.shift);
  return (2.0 * R / static_cast<double>(N)) * (win + tail);
}

struct AssumptionReport {
  bool monotone = false;
  bool tail_analytic = false;  // false => principal value defined only on window
  std::vector<std::pair<double, double>> pv_partial_sums;  // (S, paired sum over 0<|p|<S)
  std::vector<std::pair<int, double>> ratio_samples;       // (n, p_n / n), n != 0
  double pv_estimate = 0.0;
  double max_ratio_deviation = 0.0;  // over |n| >= 10 when available, else all n != 0
};

/// Diagnostics for the structural assumptions: monotonicity, principal-value
/// partial sums over increasing S, and the p_n/n ratios.
inline AssumptionReport check_assumptions(const PointConfiguration& cfg,
                                          const std::vector<double>& S_grid) {
  for (std::size_t i = 0; i + 1 < S_grid.size(); ++i)
    if (!(S_grid[i] < S_grid[i + 1]))
      throw std::invalid_argument("check_assumptions: S_grid must be increasing");
  if (!S_grid.empty() && S_grid.back() > cfg.window_radius)
    throw std::invalid_argument("check_assumptions: S_grid exceeds window");

  AssumptionReport rep;
  rep.monotone = std::is_sorted(cfg.points.begin(), cfg.points.end(),
                                [](double a, double b) { return a <= b; });
  rep.tail_analytic = cfg.has_lattice_tail();
  for (double S : S_grid) {
    const double s = detail::paired_window_sum(
        cfg, [](double p) { return 1.0 / p; },
        [S](double p) { return p != 0.0 && std::abs(p) < S; });
    rep.pv_partial_sums.emplace_back(S, s);
  }
  rep.pv_estimate = detail::paired_window_sum(
      cfg, [](double p) { return 1.0 / p; }, [](double p) { return p != 0.0; });
  if (rep.tail_analytic)
    rep.pv_estimate += detail::lattice_tail_reciprocal_sum(cfg.window_radius, cfg.tail.shift);

  double dev10 = 0.0, dev_all = 0.0;
  bool have10 = false;
  for (int n = cfg.first_index(); n <= cfg.last_index(); ++n) {
    if (n == 0) continue;
    const double r = cfg.at_index(n) / n;
    rep.ratio_samples.emplace_back(n, r);
    dev_all = std::max(dev_all, std::abs(r - 1.0));
    if (std::abs(n) >= 10) {
      dev10 = std::max(dev10, std::abs(r - 1.0));
      have10 = true;
    }
  }
  rep.max_ratio_deviation = have10 ? dev10 : dev_all;
  return rep;
}

// ---------------------------------------------------------------------------
// plain-text serialization
//
//   window_radius=<float>
//   tail=lattice:<shift>  |  tail=none
//   <one point per line>
//
// Floats are written in shortest round-trip form, so save/load is exact.

inline void save_configuration(const PointConfiguration& cfg, std::ostream& os) {
  os << "window_radius=" << format_double(cfg.window_radius) << "\n";
  if (cfg.has_lattice_tail())
    os << "tail=lattice:" << format_double(cfg.tail.shift) << "\n";
  else
    os << "tail=none\n";
  for (double p : cfg.points) os << format_double(p) << "\n";
}

inline void save_configuration(const PointConfiguration& cfg, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_configuration: cannot open " + path);
  save_configuration(cfg, f);
}

inline PointConfiguration load_configuration(std::istream& is) {
  PointConfiguration cfg;
  std::string line;
  if (!std::getline(is, line) || line.rfind("window_radius=", 0) != 0)
    throw std::invalid_argument("load_configuration: missing window_radius line");
  cfg.window_radius = parse_double(std::string_view(line).substr(14));
  if (!std::getline(is, line) || line.rfind("tail=", 0) != 0)
    throw std::invalid_argument("load_configuration: missing tail line");
  std::string_view tail(line);
  tail.remove_prefix(5);
  if (tail == "none")
    cfg.tail = TailModel::none();
  else if (tail.rfind("lattice:", 0) == 0)
    cfg.tail = TailModel::lattice(parse_double(tail.substr(8)));
  else
    throw std::invalid_argument("load_configuration: bad tail spec '" + std::string(tail) + "'");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    cfg.points.push_back(parse_double(line));
  }
  cfg.index_offset = detail::computed_index_offset(cfg.points);
  validate(cfg);
  return cfg;
}

inline PointConfiguration load_configuration(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_configuration: cannot open " + path);
  return load_configuration(f);
}

}  // namespace rkl
