#pragma once

// Orthonormal polynomials for an arbitrary positive weight on an interval
// (discretized Stieltjes procedure) and the Christoffel-Darboux kernels
// built from them.
//
// The weight is evaluated in the log domain and rescaled by exp(-max)
// per quadrature batch; `log_scale` records the factor so that kernels
// for the *true* weight can always be recovered.  The weighted kernel is
// invariant under this rescaling, the polynomial kernel is not.

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkl/numerics.hpp"
#include "rkl/quadrature.hpp"
#include "rkl/weights.hpp"

namespace rkl {

struct RecurrenceCoeffs {
  // x phi_k = b[k] phi_{k+1} + a[k] phi_k + b[k-1] phi_{k-1}
  std::vector<double> a;  // length N
  std::vector<double> b;  // length N, strictly positive; b[k] links k and k+1
  double norm0 = 0.0;     // mass of the rescaled weight (phi_0 = 1/sqrt(norm0))
  double log_scale = 0.0; // true weight = rescaled weight * exp(log_scale)
  WeightSpec weight;
  int quad_order = 0;
  bool stability_checked = false;
  bool stability_ok = true;
  double stability_defect = 0.0;

  int max_degree() const { return static_cast<int>(a.size()); }
};

namespace detail {

struct StieltjesCore {
  std::vector<double> a, b;
  double norm0;
};

// Discretization of the measure w(t) dt as nodes/masses.  Smooth weights
// use the plain rule (polynomial exactness); weights with endpoint
// factors (1-u^2)^gamma are discretized through t = mid + rad*cos(theta),
// where the factor becomes sin(theta)^{2 gamma} exactly and the remaining
// integrand is analytic.
struct DiscretizedMeasure {
  std::vector<double> nodes;
  std::vector<double> masses;  // include the weight, up to exp(log_scale)
  double log_scale = 0.0;
};

inline DiscretizedMeasure discretize_measure(const WeightSpec& weight, int quad_order) {
  const auto [lo, hi] = weight.support();
  const double gamma = weight.endpoint_exponent();
  DiscretizedMeasure d;
  std::vector<double> lw;
  if (gamma == 0.0) {
    const Quadrature q = gauss_legendre(quad_order, lo, hi);
    d.nodes = q.nodes;
    lw.resize(q.nodes.size());
    d.masses.resize(q.nodes.size());
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      lw[i] = weight.log_value(q.nodes[i]);
      d.masses[i] = q.weights[i];
    }
  } else {
    const double mid = 0.5 * (lo + hi), rad = 0.5 * (hi - lo);
    const Quadrature q = gauss_legendre(quad_order, 0.0, std::acos(-1.0));
    d.nodes.resize(q.nodes.size());
    lw.resize(q.nodes.size());
    d.masses.resize(q.nodes.size());
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const std::size_t j = q.nodes.size() - 1 - i;  // cos reverses the order
      const double st = std::sin(q.nodes[j]);
      d.nodes[i] = mid + rad * std::cos(q.nodes[j]);
      lw[i] = weight.log_value_smooth(d.nodes[i]);
      d.masses[i] = q.weights[j] * rad * std::pow(st, 1.0 + 2.0 * gamma);
    }
  }
  double lmax = -std::numeric_limits<double>::infinity();
  for (double v : lw)
    if (v > lmax) lmax = v;
  if (!std::isfinite(lmax))
    throw StabilityError("stieltjes_recurrence: weight not finite on quadrature nodes");
  d.log_scale = lmax;
  for (std::size_t i = 0; i < d.nodes.size(); ++i) d.masses[i] *= std::exp(lw[i] - lmax);
  return d;
}

inline StieltjesCore stieltjes_core(const WeightSpec& weight, int n, int quad_order,
                                    double& log_scale_out) {
  const DiscretizedMeasure d = discretize_measure(weight, quad_order);
  log_scale_out = d.log_scale;
  const std::size_t m = d.nodes.size();
  const std::vector<double>& wv = d.masses;
  const std::vector<double>& x = d.nodes;

  CompensatedSum mass;
  for (std::size_t i = 0; i < m; ++i) mass.add(wv[i]);
  const double norm0 = mass.value();
  if (!(norm0 > 0.0))
    throw StabilityError("stieltjes_recurrence: quadrature order insufficient or weight underflow");

  StieltjesCore out;
  out.norm0 = norm0;
  out.a.resize(n);
  out.b.resize(n);

  std::vector<double> phi_prev(m, 0.0), phi(m, 1.0 / std::sqrt(norm0)), r(m);
  for (int k = 0; k < n; ++k) {
    CompensatedSum ak;
    for (std::size_t i = 0; i < m; ++i) ak.add(wv[i] * x[i] * phi[i] * phi[i]);
    out.a[k] = ak.value();
    const double bprev = k > 0 ? out.b[k - 1] : 0.0;
    CompensatedSum nr;
    for (std::size_t i = 0; i < m; ++i) {
      r[i] = (x[i] - out.a[k]) * phi[i] - bprev * phi_prev[i];
      nr.add(wv[i] * r[i] * r[i]);
    }
    const double bk = std::sqrt(nr.value());
    if (!(bk > 0.0) || !std::isfinite(bk))
      throw StabilityError("stieltjes_recurrence: quadrature order insufficient or weight underflow (b_" +
                           std::to_string(k + 1) + ")");
    out.b[k] = bk;
    for (std::size_t i = 0; i < m; ++i) {
      const double next = r[i] / bk;
      phi_prev[i] = phi[i];
      phi[i] = next;
    }
  }
  return out;
}

}  // namespace detail

/// Discretized Stieltjes procedure: recurrence coefficients of the first
/// n+1 orthonormal polynomials for `weight`.  quad_order = 0 picks the
/// default 4n.  With check_stability the coefficients are recomputed at
/// twice the order; disagreement beyond 1e-11 flags the result.
inline RecurrenceCoeffs stieltjes_recurrence(const WeightSpec& weight, int n, int quad_order = 0,
                                             bool check_stability = false) {
  if (n < 1) throw std::invalid_argument("stieltjes_recurrence: n must be >= 1");
  if (quad_order == 0) quad_order = 4 * n;
  if (quad_order < 2 * (n + 1))
    throw std::invalid_argument("stieltjes_recurrence: quadrature order below 2(n+1) cannot resolve the basis");

  RecurrenceCoeffs rc;
  rc.weight = weight;
  rc.quad_order = quad_order;
  auto core = detail::stieltjes_core(weight, n, quad_order, rc.log_scale);
  rc.a = std::move(core.a);
  rc.b = std::move(core.b);
  rc.norm0 = core.norm0;

  if (check_stability) {
    double ls2 = 0.0;
    auto ref = detail::stieltjes_core(weight, n, 2 * quad_order, ls2);
    double defect = 0.0;
    for (int k = 0; k < n; ++k) {
      defect = std::max(defect, std::abs(ref.a[k] - rc.a[k]));
      defect = std::max(defect, std::abs(ref.b[k] - rc.b[k]));
    }
    rc.stability_checked = true;
    rc.stability_defect = defect;
    rc.stability_ok = defect <= 1e-11;
  }
  return rc;
}

namespace detail {

// phi~_{n-1}, phi~_n and derivatives at one point (rescaled normalization)
struct EdgeEval {
  double p_nm1 = 0.0, p_n = 0.0;
  double d_nm1 = 0.0, d_n = 0.0;
};

inline EdgeEval eval_edge(const RecurrenceCoeffs& rc, int n, double x) {
  EdgeEval e;
  double pm = 0.0, p = 1.0 / std::sqrt(rc.norm0);
  double dm = 0.0, d = 0.0;
  for (int k = 0; k < n; ++k) {
    const double bprev = k > 0 ? rc.b[k - 1] : 0.0;
    const double pn = ((x - rc.a[k]) * p - bprev * pm) / rc.b[k];
    const double dn = (p + (x - rc.a[k]) * d - bprev * dm) / rc.b[k];
    pm = p; p = pn;
    dm = d; d = dn;
  }
  e.p_nm1 = pm;
  e.p_n = p;
  e.d_nm1 = dm;
  e.d_n = d;
  return e;
}

// Christoffel-Darboux sum_{j<n} phi~_j(x) phi~_j(y) from precomputed edges.
// Closed form away from the diagonal, confluent (derivative) form within
// |x-y| <= 1e-6 evaluated at the midpoint.
inline double cd_sum(const RecurrenceCoeffs& rc, int n, double x, double y, const EdgeEval& ex,
                     const EdgeEval& ey) {
  const double bn = rc.b[n - 1];
  if (std::abs(x - y) > 1e-6)
    return bn * (ex.p_n * ey.p_nm1 - ex.p_nm1 * ey.p_n) / (x - y);
  const EdgeEval em = x == y ? ex : eval_edge(rc, n, 0.5 * (x + y));
  return bn * (em.d_n * em.p_nm1 - em.d_nm1 * em.p_n);
}

}  // namespace detail

/// phi_j(x), orthonormal for the true weight.
inline double eval_orthonormal(const RecurrenceCoeffs& rc, int degree, double x) {
  if (degree < 0 || degree > rc.max_degree())
    throw std::invalid_argument("eval_orthonormal: degree out of range");
  double pm = 0.0, p = 1.0 / std::sqrt(rc.norm0);
  for (int k = 0; k < degree; ++k) {
    const double bprev = k > 0 ? rc.b[k - 1] : 0.0;
    const double pn = ((x - rc.a[k]) * p - bprev * pm) / rc.b[k];
    pm = p;
    p = pn;
  }
  return p * std::exp(-0.5 * rc.log_scale);
}

/// phi_0..phi_max_degree at x, true-weight normalization.
inline void eval_orthonormal_all(const RecurrenceCoeffs& rc, int max_degree, double x,
                                 std::span<double> out) {
  if (max_degree < 0 || max_degree > rc.max_degree() ||
      out.size() < static_cast<std::size_t>(max_degree) + 1)
    throw std::invalid_argument("eval_orthonormal_all: bad degree/output span");
  const double scale = std::exp(-0.5 * rc.log_scale);
  double pm = 0.0, p = 1.0 / std::sqrt(rc.norm0);
  out[0] = p * scale;
  for (int k = 0; k < max_degree; ++k) {
    const double bprev = k > 0 ? rc.b[k - 1] : 0.0;
    const double pn = ((x - rc.a[k]) * p - bprev * pm) / rc.b[k];
    pm = p;
    p = pn;
    out[k + 1] = p * scale;
  }
}

/// K_n(x,y) (with_weight) or the polynomial kernel Khat_n(x,y) for the
/// true weight.  with_weight requires x, y interior to the support.
inline double cd_kernel(const RecurrenceCoeffs& rc, int n, double x, double y, bool with_weight) {
  if (n < 1 || n > rc.max_degree()) throw std::invalid_argument("cd_kernel: n out of range");
  const auto ex = detail::eval_edge(rc, n, x);
  const auto ey = x == y ? ex : detail::eval_edge(rc, n, y);
  const double s = detail::cd_sum(rc, n, x, y, ex, ey);
  if (!with_weight) return s * std::exp(-rc.log_scale);
  const double lx = rc.weight.log_value(x) - rc.log_scale;
  const double ly = x == y ? lx : rc.weight.log_value(y) - rc.log_scale;
  return s * std::exp(0.5 * (lx + ly));
}

/// Christoffel function 1/Khat_n(x,x): minimal squared L2(w) mass of a
/// degree < n polynomial normalized at x.
inline double christoffel_function(const RecurrenceCoeffs& rc, int n, double x) {
  return 1.0 / cd_kernel(rc, n, x, x, false);
}

}  // namespace rkl
