#pragma once

// Equilibrium measures for the tilted external field V(x/alpha) + eps*x
// on [-1,1]: the closed-form density, logarithmic potentials, the
// variational-condition verifier, and the complex phase integral whose
// positive real part on ellipse contours controls the comparison-weight
// asymptotics.
//
// Potentials use the substitution t = cos(theta).  Callers may pass the
// density in substituted form g(theta) = f(cos theta) sin(theta), which
// absorbs inverse-square-root endpoints exactly; a plain f(t) overload is
// provided for bounded densities.  The moving log singularity is handled
// by a local splice integrated in closed form against a quadratic
// interpolant of g.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rkl/numerics.hpp"
#include "rkl/quadrature.hpp"
#include "rkl/weights.hpp"

namespace rkl {

struct EquilibriumParams {
  double alpha = 1.0;
  double eps = 0.0;

  // largest tilt for which the density stays nonnegative on (-1,1)
  double eps_max() const { return 2.0 * std::sqrt(1.0 - 1.0 / (alpha * alpha)); }

  void validate() const {
    if (!(alpha >= 1.0)) throw std::invalid_argument("EquilibriumParams: alpha must be >= 1");
    if (std::abs(eps) > eps_max() + 1e-15)
      throw std::invalid_argument("EquilibriumParams: |eps| exceeds the admissible tilt");
  }
};

/// Density of the equilibrium measure for the tilted field, x in (-1,1):
///   (2 sqrt(a^2-1) - a e x) / (2 a pi sqrt(1-x^2))
///     + arctan( sqrt(1-x^2)/sqrt(a^2-1) ) / (a pi)
/// For alpha = 1 (only eps = 0 admissible) this degenerates to 1/2.
inline double equilibrium_density(const EquilibriumParams& p, double x) {
  p.validate();
  if (!(std::abs(x) < 1.0)) throw std::domain_error("equilibrium_density: |x| must be < 1");
  if (p.alpha == 1.0) return 0.5;
  const double c = std::sqrt(p.alpha * p.alpha - 1.0);
  const double s = std::sqrt((1.0 - x) * (1.0 + x));
  return (2.0 * c - p.alpha * p.eps * x) / (2.0 * p.alpha * std::numbers::pi * s) +
         std::atan(s / c) / (p.alpha * std::numbers::pi);
}

/// Same density in substituted form: g(theta) = psi(cos theta) sin(theta).
/// Working in theta avoids the 1 - cos^2 cancellation near the endpoints.
inline double equilibrium_density_cos(const EquilibriumParams& p, double theta) {
  const double st = std::sin(theta);
  if (p.alpha == 1.0) return 0.5 * st;
  const double c = std::sqrt(p.alpha * p.alpha - 1.0);
  return (2.0 * c - p.alpha * p.eps * std::cos(theta)) / (2.0 * p.alpha * std::numbers::pi) +
         st * std::atan(st / c) / (p.alpha * std::numbers::pi);
}

/// g(theta) for the signed measure with density x / (pi sqrt(1-x^2)),
/// whose potential is U(x) = x.
inline double signed_unit_density_cos(double theta) {
  return std::cos(theta) / std::numbers::pi;
}

/// g(theta) for the arcsine measure (potential log 2 on [-1,1]).
inline double arcsine_density_cos(double /*theta*/) { return 1.0 / std::numbers::pi; }

/// psi_{alpha,eps}(0); independent of the admissible tilt.
inline double equilibrium_density_at_zero(double alpha) {
  if (!(alpha >= 1.0))
    throw std::invalid_argument("equilibrium_density_at_zero: alpha must be >= 1");
  if (alpha == 1.0) return 0.5;
  const double c = std::sqrt(alpha * alpha - 1.0);
  return 0.5 / alpha + (c - std::atan(c)) / (alpha * std::numbers::pi);
}

/// Limiting rescaled diagonal constants of the comparison kernels:
/// +: psi(0), -: alpha^2 psi(0).  Both tend to 1/2 as alpha -> 1.
inline double kernel_limit_constant(int sign, double alpha) {
  const double v = equilibrium_density_at_zero(alpha);
  return sign > 0 ? v : alpha * alpha * v;
}

// ---------------------------------------------------------------------------
// logarithmic potential

namespace detail {

inline double gl_panel(const std::function<double(double)>& f, double a, double b,
                       const Quadrature& base) {
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  CompensatedSum s;
  for (std::size_t i = 0; i < base.nodes.size(); ++i)
    s.add(base.weights[i] * f(mid + rad * base.nodes[i]));
  return rad * s.value();
}

// int_a^b u^k log|u/2| du
inline double log_moment(int k, double a, double b) {
  auto F = [k](double u) {
    if (u == 0.0) return 0.0;
    return std::pow(u, k + 1) / (k + 1) * (std::log(std::abs(0.5 * u)) - 1.0 / (k + 1));
  };
  return F(b) - F(a);
}

}  // namespace detail

/// U(x) = -int_0^pi log|x - cos theta| g(theta) dtheta for x in [-1,1],
/// with g(theta) = f(cos theta) sin(theta).
inline double log_potential_cos(const std::function<double(double)>& g, double x,
                                double delta = 0.005) {
  if (std::abs(x) > 1.0) throw std::domain_error("log_potential_cos: |x| must be <= 1");
  const double pi = std::numbers::pi;
  const double thx = std::acos(std::clamp(x, -1.0, 1.0));
  const double lo = std::max(0.0, thx - delta);
  const double hi = std::min(pi, thx + delta);
  const Quadrature& base = detail::gauss_legendre_base(32);

  CompensatedSum total;
  const auto outer_integrand = [&](double th) { return -std::log(std::abs(x - std::cos(th))) * g(th); };

  // outer pieces, geometric panels accumulating at the splice boundary
  auto outer = [&](double a, double b, bool sing_at_b) {
    const double len = b - a;
    if (len <= 1e-14) return;
    const int n_geo = std::max(4, static_cast<int>(std::ceil(std::log2(len / std::min(delta, len)))) + 3);
    std::vector<double> offs{0.0, len};
    for (int j = 0; j <= n_geo; ++j) offs.push_back(len * std::pow(2.0, -j));
    std::sort(offs.begin(), offs.end());
    offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
    std::vector<double> pts;
    for (double o : offs) pts.push_back(sing_at_b ? b - o : a + o);
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
      total.add(detail::gl_panel(outer_integrand, pts[i], pts[i + 1], base));
  };
  outer(0.0, lo, /*sing_at_b=*/true);
  outer(hi, pi, /*sing_at_b=*/false);

  if (hi > lo) {
    // splice: log|x - cos th| = log|2 sin((th+thx)/2)| + log|sin((th-thx)/2)|;
    // the second term splits into a smooth ratio plus log|u/2|, u = th - thx
    const auto smooth = [&](double th) {
      const double d = 0.5 * std::abs(th - thx);
      double ratio;  // log( sin(d)/d ), series below ~1e-4 where the ratio is 1 - d^2/6
      if (d < 1e-4)
        ratio = -d * d / 6.0;
      else
        ratio = std::log(std::sin(d) / d);
      return -(std::log(std::abs(2.0 * std::sin(0.5 * (th + thx)))) + ratio) * g(th);
    };
    total.add(detail::gl_panel(smooth, lo, hi, base));

    // closed-form part: -int log|u/2| P2(th) dth with P2 the quadratic
    // interpolant of g at the splice endpoints and midpoint
    const double t1 = 0.5 * (lo + hi);
    const double g0 = g(lo), g1 = g(t1), g2 = g(hi);
    const double u0 = lo - thx, u1 = t1 - thx, u2 = hi - thx;
    const double den0 = (u0 - u1) * (u0 - u2);
    const double den1 = (u1 - u0) * (u1 - u2);
    const double den2 = (u2 - u0) * (u2 - u1);
    const double c2 = g0 / den0 + g1 / den1 + g2 / den2;
    const double c1 = -(g0 * (u1 + u2) / den0 + g1 * (u0 + u2) / den1 + g2 * (u0 + u1) / den2);
    const double c0 = g0 * u1 * u2 / den0 + g1 * u0 * u2 / den1 + g2 * u0 * u1 / den2;
    total.add(-(c0 * detail::log_moment(0, u0, u2) + c1 * detail::log_moment(1, u0, u2) +
                c2 * detail::log_moment(2, u0, u2)));
  }
  return total.value();
}

/// U(x) = int log(1/|x-t|) f(t) dt for a density f on [-1,1].  Suitable
/// when f(cos theta) sin(theta) is well-conditioned as written; densities
/// with inverse-square-root endpoints should use log_potential_cos.
inline double log_potential(const std::function<double(double)>& f, double x) {
  return log_potential_cos([&f](double th) { return f(std::cos(th)) * std::sin(th); }, x);
}

// ---------------------------------------------------------------------------
// variational conditions

struct EquilibriumReport {
  double normalization = 0.0;            // int psi, should be 1
  double ell_estimate = 0.0;             // median of 2U + V over the grid
  double max_variational_deviation = 0.0;
  double density_min = 0.0;
  std::vector<double> grid;
  std::vector<double> psi;             // density on the grid
  std::vector<double> two_u_plus_v;    // 2 U(x) + V_{alpha,eps}(x)
};

/// Evaluates 2 U^{mu} + V_{alpha,eps} over the grid; on the support this
/// should be a constant ell.  The normalization integral uses panelled
/// quadrature of the substituted density.
inline EquilibriumReport verify_variational(const EquilibriumParams& p,
                                            std::span<const double> grid) {
  p.validate();
  EquilibriumReport rep;
  const auto g = [&p](double th) { return equilibrium_density_cos(p, th); };

  const Quadrature& base = detail::gauss_legendre_base(32);
  CompensatedSum norm;
  const int panels = 16;
  for (int i = 0; i < panels; ++i) {
    const double a = std::numbers::pi * i / panels;
    const double b = std::numbers::pi * (i + 1) / panels;
    norm.add(detail::gl_panel(g, a, b, base));
  }
  rep.normalization = norm.value();

  rep.density_min = std::numeric_limits<double>::infinity();
  for (double x : grid) {
    const double u = log_potential_cos(g, x);
    const double v = external_field_tilted(p.alpha, p.eps, x);
    rep.grid.push_back(x);
    rep.psi.push_back(equilibrium_density(p, x));
    rep.two_u_plus_v.push_back(2.0 * u + v);
    rep.density_min = std::min(rep.density_min, rep.psi.back());
  }
  std::vector<double> vals = rep.two_u_plus_v;
  if (!vals.empty()) {
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    rep.ell_estimate = vals[vals.size() / 2];
    for (double v : rep.two_u_plus_v)
      rep.max_variational_deviation =
          std::max(rep.max_variational_deviation, std::abs(v - rep.ell_estimate));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// phase integral on ellipse contours

/// rho(z) = 2 pi sqrt(1-z^2) psi(z) continued off the interval:
///   eps_max - eps z + (2/alpha) sqrt(1-z^2) arctan( sqrt(1-z^2)/sqrt(alpha^2-1) ).
/// Analytic wherever z^2 != alpha^2; the sqrt branch cancels because the
/// expression is even in sqrt(1-z^2).
inline std::complex<double> phase_density(const EquilibriumParams& p, std::complex<double> z) {
  if (!(p.alpha > 1.0)) throw std::invalid_argument("phase_density: alpha must exceed 1");
  const double c = std::sqrt(p.alpha * p.alpha - 1.0);
  const std::complex<double> u = std::sqrt(1.0 - z * z);
  return p.eps_max() - p.eps * z + (2.0 / p.alpha) * u * std::atan(u / c);
}

/// d/dz of phase_density; used for the interior derivative bound.
inline std::complex<double> phase_density_derivative(const EquilibriumParams& p,
                                                     std::complex<double> z) {
  if (!(p.alpha > 1.0))
    throw std::invalid_argument("phase_density_derivative: alpha must exceed 1");
  const double c = std::sqrt(p.alpha * p.alpha - 1.0);
  const std::complex<double> u = std::sqrt(1.0 - z * z);
  std::complex<double> atan_over_u;  // arctan(u/c)/u, even in u
  if (std::abs(u) < 1e-4) {
    const std::complex<double> u2 = u * u;
    atan_over_u = (1.0 - u2 / (3.0 * c * c) + u2 * u2 / (5.0 * c * c * c * c)) / c;
  } else {
    atan_over_u = std::atan(u / c) / u;
  }
  return -p.eps - (2.0 * z / p.alpha) * (atan_over_u + c / (c * c + u * u));
}

/// Exterior conformal map onto the complement of the unit disk.
inline std::complex<double> joukowski_inverse_point(double r, double theta) {
  const std::complex<double> w = std::polar(r, theta);
  return 0.5 * (w + 1.0 / w);
}

/// xi(z) = int_1^z rho(s) / (s^2-1)^{1/2} ds along the straight segment,
/// for z off (-inf, 1].  The substitution s = 1 + (z-1) u^2 removes the
/// inverse-square-root endpoint; panels refine toward u = 1 where the
/// second branch point can come close.
inline std::complex<double> phase_integral(const EquilibriumParams& p, std::complex<double> z) {
  if (!(p.alpha > 1.0)) throw std::invalid_argument("phase_integral: alpha must exceed 1");
  if (z == std::complex<double>(1.0, 0.0)) return {0.0, 0.0};
  const std::complex<double> zm1 = z - 1.0;
  const auto integrand = [&](double u) {
    const std::complex<double> s = 1.0 + zm1 * (u * u);
    return 2.0 * phase_density(p, s) / std::sqrt(s + 1.0);
  };
  const Quadrature& base = detail::gauss_legendre_base(24);
  // panels [0,1/2], then geometrically refined toward 1
  std::vector<double> pts{0.0};
  for (int j = 1; j <= 14; ++j) pts.push_back(1.0 - std::pow(2.0, -j));
  pts.push_back(1.0);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    std::complex<double> s{0.0, 0.0};
    for (std::size_t k = 0; k < base.nodes.size(); ++k)
      s += base.weights[k] * integrand(mid + rad * base.nodes[k]);
    acc += rad * s;
  }
  return std::sqrt(zm1) * acc;
}

/// Re xi at the ellipse point with angular parameter theta, evaluated by
/// the radial route: the arc along the unit circle contributes nothing to
/// the real part, so Re xi = Re int_1^tau rho(J(r e^{i theta})) dr / r.
/// Stable arbitrarily close to the interval, including theta = pi.
inline double re_phase_on_ellipse(const EquilibriumParams& p, double tau, double theta) {
  const auto integrand = [&](double r) {
    return (phase_density(p, joukowski_inverse_point(r, theta)) / r).real();
  };
  const Quadrature& base = detail::gauss_legendre_base(48);
  const double mid = 0.5 * (1.0 + tau), rad = 0.5 * (tau - 1.0);
  double s = 0.0;
  for (std::size_t k = 0; k < base.nodes.size(); ++k)
    s += base.weights[k] * integrand(mid + rad * base.nodes[k]);
  return rad * s;
}

/// Minimum of Re xi over `samples` equispaced angles on the ellipse
/// Gamma_tau; requires 1 < tau < alpha + sqrt(alpha^2-1).
inline double min_re_phase_on_ellipse(const EquilibriumParams& p, double tau, int samples = 720) {
  p.validate();
  if (!(p.alpha > 1.0))
    throw std::invalid_argument("min_re_phase_on_ellipse: alpha must exceed 1");
  const double tau_max = p.alpha + std::sqrt(p.alpha * p.alpha - 1.0);
  if (!(tau > 1.0 && tau < tau_max))
    throw std::invalid_argument("min_re_phase_on_ellipse: tau must lie in (1, alpha + sqrt(alpha^2-1))");
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * (j + 0.5) / samples;
    best = std::min(best, re_phase_on_ellipse(p, tau, theta));
  }
  return best;
}

/// max |rho'| over the closed interior of Gamma_tau, sampled on the
/// Joukowski image of the annulus 1 <= r <= tau.
inline double max_abs_phase_density_derivative(const EquilibriumParams& p, double tau,
                                               int n_r = 40, int n_theta = 360) {
  double best = 0.0;
  for (int i = 0; i < n_r; ++i) {
    const double r = 1.0 + (tau - 1.0) * i / (n_r - 1);
    for (int j = 0; j < n_theta; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / n_theta;
      best = std::max(best, std::abs(phase_density_derivative(p, joukowski_inverse_point(r, theta))));
    }
  }
  return best;
}

}  // namespace rkl
