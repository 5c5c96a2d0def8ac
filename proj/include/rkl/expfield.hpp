#pragma once

// Bulk-rescaled kernels for the analytic Jacobi-type exponential weights
// (1-t^2)^{±1/2} exp(-N (V(t/alpha) + eps t)).  These are the weights for
// which sine-kernel asymptotics are available with uniform control in the
// tilt, and they serve as the independent route to the comparison-kernel
// limits.

#include <cmath>
#include <stdexcept>

#include "rkl/equilibrium.hpp"
#include "rkl/orthopoly.hpp"
#include "rkl/sampler.hpp"
#include "rkl/universality.hpp"
#include "rkl/weights.hpp"

namespace rkl {

/// (1/(psi(x0) N)) K_N(x0 + x/(psi N), x0 + y/(psi N); weight) with
/// psi = psi_{alpha,eps}(x0); tends to the sine kernel in N.
inline double expfield_kernel(double alpha, double eps, long long n, double jacobi_exponent,
                              double x0, double x, double y, int quad_order = 0) {
  if (!(std::abs(x0) < 1.0)) throw std::domain_error("expfield_kernel: |x0| must be < 1");
  EquilibriumParams p{alpha, eps};
  if (std::abs(eps) >= p.eps_max())
    throw std::invalid_argument("expfield_kernel: |eps| must be below the admissible tilt");
  const double psi = equilibrium_density(p, x0);
  const double scale = psi * static_cast<double>(n);
  const double ux = x0 + x / scale, uy = x0 + y / scale;
  if (!(std::abs(ux) < 1.0 && std::abs(uy) < 1.0))
    throw std::domain_error("expfield_kernel: rescaled arguments leave (-1,1)");
  if (quad_order == 0) quad_order = default_quad_order(n);
  const auto rc = stieltjes_recurrence(WeightSpec::exp_field(alpha, eps, n, jacobi_exponent),
                                       static_cast<int>(n), quad_order);
  return cd_kernel(rc, static_cast<int>(n), ux, uy, /*with_weight=*/true) / scale;
}

struct ComparisonKernelCheck {
  double k_plus = 0.0;    // (1/N) K_N(x/N, y/N; w+)
  double k_minus = 0.0;   // (1/N) K_N(x/N, y/N; w-)
  double ref_plus = 0.0;  // sin(pi c+ (x-y)) / (pi (x-y))
  double ref_minus = 0.0;
};

/// Rescaled comparison-weight kernels against their predicted limits
/// sin(pi c± (x-y)) / (pi (x-y)).
inline ComparisonKernelCheck comparison_kernel_check(double alpha, double eps, long long n,
                                                     double x, double y, int quad_order = 0) {
  if (quad_order == 0) quad_order = default_quad_order(n);
  ComparisonKernelCheck out;
  const double Nd = static_cast<double>(n);
  {
    const auto rc = stieltjes_recurrence(WeightSpec::comparison(+1, alpha, eps, n),
                                         static_cast<int>(n), quad_order);
    out.k_plus = cd_kernel(rc, static_cast<int>(n), x / Nd, y / Nd, true) / Nd;
  }
  {
    const auto rc = stieltjes_recurrence(WeightSpec::comparison(-1, alpha, eps, n),
                                         static_cast<int>(n), quad_order);
    out.k_minus = cd_kernel(rc, static_cast<int>(n), x / Nd, y / Nd, true) / Nd;
  }
  const double c_plus = kernel_limit_constant(+1, alpha);
  const double c_minus = kernel_limit_constant(-1, alpha);
  // sin(pi c (x-y)) / (pi (x-y)) = c * S(c x, c y)
  out.ref_plus = c_plus * sine_kernel(c_plus * x, c_plus * y);
  out.ref_minus = c_minus * sine_kernel(c_minus * x, c_minus * y);
  return out;
}

}  // namespace rkl
