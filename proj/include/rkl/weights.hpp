#pragma once

// Weight functions of the conditional ensembles and their comparison
// bounds.  Everything is computed in the log domain; exp is applied only
// at the API boundary.  Exterior lattice products are evaluated in closed
// form through log-Gamma, which is Euler's sine product generalized to a
// shifted lattice:
//
//   prod_{k>=0} [(a+k-t)(b+k+t)] / [(a+k)(b+k)]
//     = exp( lgamma(a) + lgamma(b) - lgamma(a-t) - lgamma(b+t) ).

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rkl/numerics.hpp"
#include "rkl/pointconf.hpp"

namespace rkl {

/// V(t) = (1+t)log(1+t) + (1-t)log(1-t) on [-1,1], with the Maclaurin
/// series t^2 + sum_{k>=2} t^{2k}/(k(2k-1)) taking over for |t| < 0.1
/// where the closed form cancels.
inline double external_field(double t) {
  const double at = std::abs(t);
  if (at > 1.0) throw std::domain_error("external_field: |t| must be <= 1");
  if (at == 1.0) return 2.0 * std::log(2.0);  // 0*log 0 := 0
  if (at < 0.1) {
    const double t2 = t * t;
    double term = t2;
    CompensatedSum acc(t2);
    for (int k = 2; k <= 12; ++k) {
      term *= t2;
      acc.add(term / (k * (2.0 * k - 1.0)));
      if (term < 1e-19) break;
    }
    return acc.value();
  }
  return (1.0 + t) * std::log1p(t) + (1.0 - t) * std::log1p(-t);
}

/// Tilted field V(t/alpha) + eps*t.
inline double external_field_tilted(double alpha, double eps, double t) {
  return external_field(t / alpha) + eps * t;
}

namespace detail {

// log prod_{n>=m} (1 - x^2/n^2), |x| <= m.  Equals -inf when |x| = m.
inline double log_lattice_product(double m, double x) {
  const double ax = std::abs(x);
  if (ax > m) throw std::domain_error("log_lattice_product: |x| must be <= m");
  if (ax == m) return -std::numeric_limits<double>::infinity();
  return 2.0 * std::lgamma(m) - std::lgamma(m - x) - std::lgamma(m + x);
}

}  // namespace detail

/// log rho_R(t) = 2 sum_{|p_n| > R} log(1 - t/p_n) for |t| <= R.
/// Window factors are paired (n, -n); the lattice tail is closed form.
inline double log_conditional_weight(const PointConfiguration& cfg, double R, double t) {
  if (!(R > 0.0) || R > cfg.window_radius)
    throw std::invalid_argument("log_conditional_weight: need 0 < R <= window_radius");
  if (std::abs(t) > R)
    throw std::domain_error("log_conditional_weight: |t| must be <= R");
  if (!cfg.has_lattice_tail())
    throw std::invalid_argument("log_conditional_weight: requires a lattice tail");
  const double win = detail::paired_window_sum(
      cfg, [t](double p) { return std::log1p(-t / p); },
      [R](double p) { return std::abs(p) > R; });
  const auto ts = detail::lattice_tail_start(cfg.window_radius, cfg.tail.shift);
  const double tail = std::lgamma(ts.a_plus) + std::lgamma(ts.a_minus) -
                      std::lgamma(ts.a_plus - t) - std::lgamma(ts.a_minus + t);
  return 2.0 * (win + tail);
}

/// w_R(t) = rho_R(R t) rescaled to [-1,1].
inline double log_rescaled_weight(const PointConfiguration& cfg, double R, double t) {
  if (std::abs(t) > 1.0)
    throw std::domain_error("log_rescaled_weight: |t| must be <= 1");
  return log_conditional_weight(cfg, R, R * t);
}

inline double rescaled_weight(const PointConfiguration& cfg, double R, double t) {
  return std::exp(log_rescaled_weight(cfg, R, t));
}

/// Comparison weights bracketing w_R:
///   sign=+1: (1-t^2)^{-1/2} exp(-n (V(t/alpha) + eps t)) on [-1,1]
///   sign=-1: (1-t^2/beta^2)^{1/2} exp(-n (V(alpha t) + eps t)) on [-beta,beta],
///            beta = alpha^{-2}; zero outside its support.
/// Returns the log value; +inf at the endpoints of the + variant, -inf
/// where the - variant vanishes.
inline double log_comparison_weight(int sign, double alpha, double eps, long long n, double t) {
  if (!(alpha > 1.0)) throw std::invalid_argument("log_comparison_weight: alpha must exceed 1");
  if (sign > 0) {
    if (std::abs(t) > 1.0)
      throw std::domain_error("log_comparison_weight(+): |t| must be <= 1");
    const double q = (1.0 - t) * (1.0 + t);
    if (q == 0.0) return std::numeric_limits<double>::infinity();
    return -0.5 * std::log(q) - n * (external_field(t / alpha) + eps * t);
  }
  const double beta = 1.0 / (alpha * alpha);
  if (std::abs(t) > beta) return -std::numeric_limits<double>::infinity();
  const double u = t / beta;
  const double q = (1.0 - u) * (1.0 + u);
  if (q == 0.0) return -std::numeric_limits<double>::infinity();
  return 0.5 * std::log(q) - n * (external_field(alpha * t) + eps * t);
}

inline double comparison_weight(int sign, double alpha, double eps, long long n, double t) {
  return std::exp(log_comparison_weight(sign, alpha, eps, n, t));
}

// ---------------------------------------------------------------------------
// WeightSpec: one value type naming every weight the library works with,
// exposing support and log value.  This is what the recurrence builder and
// the CLI consume.

class WeightSpec {
 public:
  enum class Kind { Uniform, Conditional, Rescaled, ComparisonPlus, ComparisonMinus, ExpField };

  static WeightSpec uniform(double lo = -1.0, double hi = 1.0) {
    WeightSpec w;
    w.kind_ = Kind::Uniform;
    w.lo_ = lo;
    w.hi_ = hi;
    return w;
  }
  /// rho_R on [-R, R]
  static WeightSpec conditional(PointConfiguration cfg, double R) {
    WeightSpec w;
    w.kind_ = Kind::Conditional;
    w.cfg_ = std::move(cfg);
    w.R_ = R;
    w.lo_ = -R;
    w.hi_ = R;
    return w;
  }
  /// w_R on [-1, 1]
  static WeightSpec rescaled(PointConfiguration cfg, double R) {
    WeightSpec w;
    w.kind_ = Kind::Rescaled;
    w.cfg_ = std::move(cfg);
    w.R_ = R;
    w.lo_ = -1.0;
    w.hi_ = 1.0;
    return w;
  }
  static WeightSpec comparison(int sign, double alpha, double eps, long long n) {
    WeightSpec w;
    w.kind_ = sign > 0 ? Kind::ComparisonPlus : Kind::ComparisonMinus;
    w.alpha_ = alpha;
    w.eps_ = eps;
    w.n_ = n;
    const double half = sign > 0 ? 1.0 : 1.0 / (alpha * alpha);
    w.lo_ = -half;
    w.hi_ = half;
    return w;
  }
  /// (1-t^2)^{jacobi_exponent} exp(-n (V(t/alpha)+eps t)) on [-1,1],
  /// jacobi_exponent in {-1/2, +1/2}
  static WeightSpec exp_field(double alpha, double eps, long long n, double jacobi_exponent) {
    if (jacobi_exponent != 0.5 && jacobi_exponent != -0.5)
      throw std::invalid_argument("exp_field: jacobi exponent must be +-1/2");
    WeightSpec w;
    w.kind_ = Kind::ExpField;
    w.alpha_ = alpha;
    w.eps_ = eps;
    w.n_ = n;
    w.jacobi_ = jacobi_exponent;
    w.lo_ = -1.0;
    w.hi_ = 1.0;
    return w;
  }

  Kind kind() const { return kind_; }
  std::pair<double, double> support() const { return {lo_, hi_}; }
  double alpha() const { return alpha_; }
  double eps() const { return eps_; }
  long long n() const { return n_; }
  double radius() const { return R_; }
  const PointConfiguration& config() const { return cfg_; }

  /// Exponent gamma of the endpoint factor (1-u^2)^gamma in the
  /// support-normalized coordinate u; zero for the smooth weights.
  double endpoint_exponent() const {
    switch (kind_) {
      case Kind::ComparisonPlus:
        return -0.5;
      case Kind::ComparisonMinus:
        return 0.5;
      case Kind::ExpField:
        return jacobi_;
      default:
        return 0.0;
    }
  }

  /// log of the weight with the endpoint factor removed:
  /// log w(t) - gamma * log(1 - u^2).  Analytic up to the closed support.
  double log_value_smooth(double t) const {
    switch (kind_) {
      case Kind::ComparisonPlus:
      case Kind::ExpField:
        return -static_cast<double>(n_) * (external_field(t / alpha_) + eps_ * t);
      case Kind::ComparisonMinus:
        return -static_cast<double>(n_) * (external_field(alpha_ * t) + eps_ * t);
      default:
        return log_value(t);
    }
  }

  double log_value(double t) const {
    switch (kind_) {
      case Kind::Uniform:
        return 0.0;
      case Kind::Conditional:
        return log_conditional_weight(cfg_, R_, t);
      case Kind::Rescaled:
        return log_rescaled_weight(cfg_, R_, t);
      case Kind::ComparisonPlus:
        return log_comparison_weight(+1, alpha_, eps_, n_, t);
      case Kind::ComparisonMinus:
        return log_comparison_weight(-1, alpha_, eps_, n_, t);
      case Kind::ExpField: {
        const double q = (1.0 - t) * (1.0 + t);
        if (q <= 0.0)
          return jacobi_ > 0 ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
        return jacobi_ * std::log(q) - n_ * (external_field(t / alpha_) + eps_ * t);
      }
    }
    return 0.0;
  }
  double value(double t) const { return std::exp(log_value(t)); }

  std::string label() const {
    switch (kind_) {
      case Kind::Uniform:
        return "uniform";
      case Kind::Conditional:
        return "rho_R(R=" + format_double(R_) + ")";
      case Kind::Rescaled:
        return "w_R(R=" + format_double(R_) + ")";
      case Kind::ComparisonPlus:
        return "comp+(alpha=" + format_double(alpha_) + ",eps=" + format_double(eps_) +
               ",N=" + std::to_string(n_) + ")";
      case Kind::ComparisonMinus:
        return "comp-(alpha=" + format_double(alpha_) + ",eps=" + format_double(eps_) +
               ",N=" + std::to_string(n_) + ")";
      case Kind::ExpField:
        return std::string("expfield(") + (jacobi_ > 0 ? "+1/2" : "-1/2") +
               ",alpha=" + format_double(alpha_) + ",eps=" + format_double(eps_) +
               ",N=" + std::to_string(n_) + ")";
    }
    return "?";
  }

 private:
  Kind kind_ = Kind::Uniform;
  double lo_ = -1.0, hi_ = 1.0;
  PointConfiguration cfg_;
  double R_ = 0.0;
  double alpha_ = 0.0, eps_ = 0.0, jacobi_ = 0.0;
  long long n_ = 0;
};

// ---------------------------------------------------------------------------
// Inequality checks

struct MarginReport {
  double min_lower_margin = std::numeric_limits<double>::infinity();
  double min_upper_margin = std::numeric_limits<double>::infinity();
  double argmin_lower = 0.0;
  double argmin_upper = 0.0;
  bool ok(double tol = -1e-12) const {
    return min_lower_margin >= tol && min_upper_margin >= tol;
  }
};

/// Two-sided lattice-product bound around exp(-2RV(t)) for integer R:
///   prod_{n>=R}(1-R^2t^2/n^2)^2  <=  e^{-2RV(t)}  <=  prod_{n>=R+1}(1-R^2t^2/n^2)^2
/// Margins are log differences; both must be nonnegative.
inline MarginReport check_lattice_product_bounds(long long R, std::span<const double> t_grid) {
  if (R < 1) throw std::invalid_argument("check_lattice_product_bounds: R must be >= 1");
  MarginReport rep;
  for (double t : t_grid) {
    if (std::abs(t) > 1.0)
      throw std::domain_error("check_lattice_product_bounds: grid must lie in [-1,1]");
    const double x = R * t;
    const double mid = -2.0 * R * external_field(t);
    const double lo = 2.0 * detail::log_lattice_product(static_cast<double>(R), x);
    const double hi = 2.0 * detail::log_lattice_product(static_cast<double>(R) + 1.0, x);
    const double m_lower = mid - lo;  // +inf at |t| = 1 where the lower product vanishes
    const double m_upper = hi - mid;
    if (m_lower < rep.min_lower_margin) {
      rep.min_lower_margin = m_lower;
      rep.argmin_lower = t;
    }
    if (m_upper < rep.min_upper_margin) {
      rep.min_upper_margin = m_upper;
      rep.argmin_upper = t;
    }
  }
  return rep;
}

/// Margins of the two comparison bounds on w_R at a fixed R:
///   upper: w_R(t) <= exp(-N (V(t/alpha) + eps_R t))    on grid_upper in [-1,1]
///   lower: w_R(t) >= exp(-N (V(alpha t) + eps_R t))    on grid_lower in [-beta,beta]
/// Both margins vanish at t = 0 (equal values and derivatives there).
struct ComparisonBoundsReport {
  MarginReport margins;
  double upper_margin_at_zero = 0.0;
  double lower_margin_at_zero = 0.0;
  double eps_r = 0.0;
  long long n = 0;
};

inline ComparisonBoundsReport check_comparison_bounds(const PointConfiguration& cfg, double R,
                                                      double alpha, double beta,
                                                      std::span<const double> grid_upper,
                                                      std::span<const double> grid_lower) {
  if (!(alpha > 1.0)) throw std::invalid_argument("check_comparison_bounds: alpha must exceed 1");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("check_comparison_bounds: beta must lie in (0,1)");
  ComparisonBoundsReport rep;
  rep.n = count_points(cfg, R);
  rep.eps_r = exterior_tilt(cfg, R, rep.n);
  const double N = static_cast<double>(rep.n);
  for (double t : grid_upper) {
    const double margin = -N * (external_field(t / alpha) + rep.eps_r * t) -
                          log_rescaled_weight(cfg, R, t);
    if (t == 0.0) rep.upper_margin_at_zero = margin;
    if (margin < rep.margins.min_upper_margin) {
      rep.margins.min_upper_margin = margin;
      rep.margins.argmin_upper = t;
    }
  }
  for (double t : grid_lower) {
    if (std::abs(t) > beta)
      throw std::domain_error("check_comparison_bounds: lower grid must lie in [-beta,beta]");
    const double margin = log_rescaled_weight(cfg, R, t) +
                          N * (external_field(alpha * t) + rep.eps_r * t);
    if (t == 0.0) rep.lower_margin_at_zero = margin;
    if (margin < rep.margins.min_lower_margin) {
      rep.margins.min_lower_margin = margin;
      rep.margins.argmin_lower = t;
    }
  }
  return rep;
}

/// Sweeps R over the given values and returns the smallest R* such that
/// both comparison bounds hold (margins >= tol) for every swept R >= R*.
/// Returns -1 when no such threshold exists within the sweep.
inline double comparison_threshold_sweep(const PointConfiguration& cfg, double alpha, double beta,
                                         std::span<const double> R_values, int grid_n,
                                         double tol = -1e-12) {
  std::vector<double> gu(grid_n), gl(grid_n);
  for (int i = 0; i < grid_n; ++i) {
    const double u = grid_n == 1 ? 0.0 : -1.0 + 2.0 * i / (grid_n - 1);
    gu[i] = u;
    gl[i] = beta * u;
  }
  double threshold = -1.0;
  for (double R : R_values) {
    const auto rep = check_comparison_bounds(cfg, R, alpha, beta, gu, gl);
    if (rep.margins.ok(tol)) {
      if (threshold < 0.0) threshold = R;
    } else {
      threshold = -1.0;  // must hold for every larger R in the sweep
    }
  }
  return threshold;
}

}  // namespace rkl
