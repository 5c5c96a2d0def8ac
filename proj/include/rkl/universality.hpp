#pragma once

// End-to-end experiments: rescaled conditional-ensemble kernels against
// the sine kernel, the diagonal kernel sandwich between the comparison
// weights, and the Lubinsky off-diagonal comparison bound.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "rkl/equilibrium.hpp"
#include "rkl/numerics.hpp"
#include "rkl/orthopoly.hpp"
#include "rkl/pointconf.hpp"
#include "rkl/sampler.hpp"
#include "rkl/weights.hpp"

namespace rkl {

inline int default_quad_order(long long n) {
  return static_cast<int>(std::max<long long>(4 * n, 256));
}

/// Weighted kernel of the conditional ensemble at window radius R,
/// rescaled so that the sine kernel is the large-R limit:
///   K_{N(R)}(x, y; rho_R) = (1/R) K_N(x/R, y/R; w_R).
inline double rescaled_kernel(const PointConfiguration& cfg, double R, double x, double y,
                              int quad_order = 0) {
  if (!(std::abs(x) < R && std::abs(y) < R))
    throw std::domain_error("rescaled_kernel: |x|, |y| must be < R");
  const long long n = count_points(cfg, R);
  if (quad_order == 0) quad_order = default_quad_order(n);
  const auto rc = stieltjes_recurrence(WeightSpec::rescaled(cfg, R), static_cast<int>(n),
                                       quad_order);
  return cd_kernel(rc, static_cast<int>(n), x / R, y / R, /*with_weight=*/true) / R;
}

/// Variant with N prescribed independently of the configuration count:
/// (2/N) K_N(2x/N, 2y/N; w_R) with N = floor(2R).
inline double rescaled_kernel_fixed_n(const PointConfiguration& cfg, double R, double x, double y,
                                      int quad_order = 0) {
  const long long n = static_cast<long long>(std::floor(2.0 * R));
  if (quad_order == 0) quad_order = default_quad_order(n);
  const double scale = 2.0 / static_cast<double>(n);
  if (!(std::abs(x) * scale < 1.0 && std::abs(y) * scale < 1.0))
    throw std::domain_error("rescaled_kernel_fixed_n: arguments leave the support");
  const auto rc = stieltjes_recurrence(WeightSpec::rescaled(cfg, R), static_cast<int>(n),
                                       quad_order);
  return scale * cd_kernel(rc, static_cast<int>(n), scale * x, scale * y, /*with_weight=*/true);
}

struct KernelGrid {
  std::vector<double> coords;      // grid coordinates (shared by x and y)
  std::vector<double> values;      // row-major K(coords[i], coords[j])
  std::vector<double> reference;   // sine kernel on the same grid
  double sup_error = 0.0;
  double diag_error = 0.0;

  double at(std::size_t i, std::size_t j) const { return values[i * coords.size() + j]; }
};

namespace detail {

// Evaluates the rescaled kernel on a square grid.  Each coordinate needs
// one O(N) recurrence sweep; grid cells are then O(1) via the
// Christoffel-Darboux form, filled in parallel into disjoint slots.
inline KernelGrid rescaled_kernel_grid(const RecurrenceCoeffs& rc, long long n, double R,
                                       bool fixed_n, std::span<const double> coords,
                                       unsigned threads) {
  const double scale = fixed_n ? 2.0 / static_cast<double>(n) : 1.0 / R;
  const std::size_t m = coords.size();
  KernelGrid grid;
  grid.coords.assign(coords.begin(), coords.end());
  grid.values.resize(m * m);
  grid.reference.resize(m * m);

  std::vector<detail::EdgeEval> edges(m);
  std::vector<double> half_logw(m);
  parallel_for(m, threads, [&](std::size_t i) {
    const double u = scale * coords[i];
    edges[i] = detail::eval_edge(rc, static_cast<int>(n), u);
    half_logw[i] = 0.5 * (rc.weight.log_value(u) - rc.log_scale);
  });
  parallel_for(m * m, threads, [&](std::size_t cell) {
    const std::size_t i = cell / m, j = cell % m;
    const double xi = scale * coords[i], yj = scale * coords[j];
    const double s = detail::cd_sum(rc, static_cast<int>(n), xi, yj, edges[i], edges[j]);
    grid.values[cell] = scale * s * std::exp(half_logw[i] + half_logw[j]);
    grid.reference[cell] = sine_kernel(coords[i], coords[j]);
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double err = std::abs(grid.at(i, j) - grid.reference[i * m + j]);
      grid.sup_error = std::max(grid.sup_error, err);
      if (i == j) grid.diag_error = std::max(grid.diag_error, err);
    }
  return grid;
}

}  // namespace detail

struct ConvergenceRow {
  double R = 0.0;
  long long n = 0;
  double eps_r = 0.0;
  double sup_error = 0.0;
  double diag_error = 0.0;
  int quad_order = 0;
  double wall_ms = 0.0;
  bool ok = false;  // false when the stability recheck rejected the row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double half_width = 0.0;
  int grid_n = 0;
  bool fixed_n = false;

  bool sup_strictly_decreasing() const {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      if (!r.ok) return false;
      if (!(r.sup_error < prev)) return false;
      prev = r.sup_error;
    }
    return !rows.empty();
  }
};

struct UniversalityOptions {
  bool fixed_n = false;  // use N = floor(2R) instead of the configuration count
  unsigned threads = 0;  // 0 = hardware default
  std::function<int(long long)> quad_order_rule = default_quad_order;
  // invoked per completed row with the evaluated grid (CSV export etc.)
  std::function<void(const ConvergenceRow&, const KernelGrid&)> on_row;
};

/// For each R: builds the rescaled-weight basis (with the doubling
/// stability recheck), evaluates the kernel on the grid and records the
/// sup and diagonal deviations from the sine kernel.  A failed stability
/// recheck aborts the row, not the sweep.
inline ConvergenceTable run_universality(const PointConfiguration& cfg,
                                         std::span<const double> R_list, double half_width,
                                         int grid_n, const UniversalityOptions& opts = {}) {
  if (grid_n < 1) throw std::invalid_argument("run_universality: grid_n must be >= 1");
  ConvergenceTable table;
  table.half_width = half_width;
  table.grid_n = grid_n;
  table.fixed_n = opts.fixed_n;

  std::vector<double> coords;
  if (half_width == 0.0 || grid_n == 1) {
    coords.push_back(0.0);  // degenerate grid: single diagonal point
  } else {
    for (int i = 0; i < grid_n; ++i)
      coords.push_back(-half_width + 2.0 * half_width * i / (grid_n - 1));
  }

  for (double R : R_list) {
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceRow row;
    row.R = R;
    row.n = opts.fixed_n ? static_cast<long long>(std::floor(2.0 * R)) : count_points(cfg, R);
    row.eps_r = exterior_tilt(cfg, R, row.n);
    row.quad_order = opts.quad_order_rule(row.n);
    try {
      const auto rc = stieltjes_recurrence(WeightSpec::rescaled(cfg, R), static_cast<int>(row.n),
                                           row.quad_order, /*check_stability=*/true);
      if (!rc.stability_ok)
        throw StabilityError("run_universality: coefficients unstable at R=" + format_double(R));
      const auto grid =
          detail::rescaled_kernel_grid(rc, row.n, R, opts.fixed_n, coords, opts.threads);
      row.sup_error = grid.sup_error;
      row.diag_error = grid.diag_error;
      row.ok = true;
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
      if (opts.on_row) opts.on_row(row, grid);
    } catch (const StabilityError&) {
      row.ok = false;
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                        .count();
      if (opts.on_row) opts.on_row(row, KernelGrid{});
    }
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// diagonal sandwich and Lubinsky bound

struct SandwichRow {
  double x = 0.0;      // compact-set coordinate; kernel argument is x/N
  double plus = 0.0;   // (1/N) Khat_N(x/N, x/N; w+)
  double mid = 0.0;    // (1/N) Khat_N(x/N, x/N; w_R)
  double minus = 0.0;  // (1/N) Khat_N(x/N, x/N; w-)
};

struct SandwichReport {
  long long n = 0;
  double eps_r = 0.0;
  std::vector<SandwichRow> rows;
  bool ordered = true;          // plus <= mid <= minus everywhere
  double max_plus_dev = 0.0;    // sup |plus - c_alpha^+|
  double max_minus_dev = 0.0;   // sup |minus - c_alpha^-|
};

/// Checks Khat(x,x; w+) <= Khat(x,x; w_R) <= Khat(x,x; w-) at the grid
/// points, with the tilt of the comparison weights taken from the
/// configuration itself.
inline SandwichReport sandwich_check(const PointConfiguration& cfg, double R, double alpha,
                                     std::span<const double> x_grid) {
  SandwichReport rep;
  rep.n = count_points(cfg, R);
  rep.eps_r = exterior_tilt(cfg, R, rep.n);
  const int n = static_cast<int>(rep.n);
  const int order = default_quad_order(rep.n);
  const auto rc_mid = stieltjes_recurrence(WeightSpec::rescaled(cfg, R), n, order);
  const auto rc_plus = stieltjes_recurrence(WeightSpec::comparison(+1, alpha, rep.eps_r, rep.n), n, order);
  const auto rc_minus = stieltjes_recurrence(WeightSpec::comparison(-1, alpha, rep.eps_r, rep.n), n, order);

  const double c_plus = kernel_limit_constant(+1, alpha);
  const double c_minus = kernel_limit_constant(-1, alpha);
  const double Nd = static_cast<double>(rep.n);
  for (double x : x_grid) {
    SandwichRow row;
    row.x = x;
    const double u = x / Nd;
    row.plus = cd_kernel(rc_plus, n, u, u, false) / Nd;
    row.mid = cd_kernel(rc_mid, n, u, u, false) / Nd;
    row.minus = cd_kernel(rc_minus, n, u, u, false) / Nd;
    if (!(row.plus <= row.mid * (1.0 + 1e-9) && row.mid <= row.minus * (1.0 + 1e-9)))
      rep.ordered = false;
    rep.max_plus_dev = std::max(rep.max_plus_dev, std::abs(row.plus - c_plus));
    rep.max_minus_dev = std::max(rep.max_minus_dev, std::abs(row.minus - c_minus));
    rep.rows.push_back(row);
  }
  return rep;
}

struct LubinskyGap {
  double lhs = 0.0;
  double rhs = 0.0;
  bool sandwich_violation = false;  // radicand below -1e-12

  bool holds(double tol = 1e-9) const { return !sandwich_violation && lhs <= rhs + tol; }
};

/// Off-diagonal comparison bound between the conditional and upper
/// comparison kernels:
///   |Khat(x,y;w+) - Khat(x,y;w_R)| / Khat(x,x;w_R)
///     <= sqrt( Khat(y,y;w_R)/Khat(x,x;w_R) ) sqrt( 1 - Khat(x,x;w+)/Khat(x,x;w_R) ).
/// x, y are compact-set coordinates; kernels are evaluated at x/N, y/N.
inline LubinskyGap lubinsky_gap(const PointConfiguration& cfg, double R, double alpha, double x,
                                double y) {
  const long long n64 = count_points(cfg, R);
  const double epsr = exterior_tilt(cfg, R, n64);
  const int n = static_cast<int>(n64);
  const int order = default_quad_order(n64);
  const auto rc_mid = stieltjes_recurrence(WeightSpec::rescaled(cfg, R), n, order);
  const auto rc_plus = stieltjes_recurrence(WeightSpec::comparison(+1, alpha, epsr, n64), n, order);

  const double Nd = static_cast<double>(n64);
  const double ux = x / Nd, uy = y / Nd;
  const double mid_xx = cd_kernel(rc_mid, n, ux, ux, false);
  const double mid_yy = cd_kernel(rc_mid, n, uy, uy, false);
  const double mid_xy = cd_kernel(rc_mid, n, ux, uy, false);
  const double plus_xx = cd_kernel(rc_plus, n, ux, ux, false);
  const double plus_xy = cd_kernel(rc_plus, n, ux, uy, false);

  LubinskyGap gap;
  gap.lhs = std::abs(plus_xy - mid_xy) / mid_xx;
  const double radicand = 1.0 - plus_xx / mid_xx;
  if (radicand < -1e-12) gap.sandwich_violation = true;
  gap.rhs = std::sqrt(mid_yy / mid_xx) * std::sqrt(std::max(0.0, radicand));
  return gap;
}

}  // namespace rkl
