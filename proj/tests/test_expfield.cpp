#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rkl/expfield.hpp"

using namespace rkl;

TEST_CASE("diagonal converges to one for both exponents") {
  const double alpha = 1.2;
  for (double expo : {-0.5, 0.5}) {
    double prev = std::numeric_limits<double>::infinity();
    for (long long n : {20, 40, 80}) {
      const double err = std::abs(expfield_kernel(alpha, 0.0, n, expo, 0.0, 0.0, 0.0) - 1.0);
      INFO("expo=" << expo << " n=" << n << " err=" << err);
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 0.02);
  }
}

TEST_CASE("tilted weights keep the same limit") {
  const double alpha = 1.3;
  const double eps_max = EquilibriumParams{alpha, 0.0}.eps_max();
  for (double frac : {-0.5, 0.0, 0.5}) {
    const double e20 =
        std::abs(expfield_kernel(alpha, frac * eps_max, 20, -0.5, 0.2, 0.5, -0.5) -
                 sine_kernel(0.5, -0.5));
    const double e80 =
        std::abs(expfield_kernel(alpha, frac * eps_max, 80, -0.5, 0.2, 0.5, -0.5) -
                 sine_kernel(0.5, -0.5));
    INFO("frac=" << frac);
    CHECK(e80 < e20);
  }
}

TEST_CASE("off-center points share the limit after density rescaling") {
  const double alpha = 1.1;
  const double ref = sine_kernel(0.5, -0.5);
  const double at_zero = expfield_kernel(alpha, 0.0, 80, -0.5, 0.0, 0.5, -0.5);
  const double off = expfield_kernel(alpha, 0.0, 80, -0.5, 0.5, 0.5, -0.5);
  CHECK(std::abs(at_zero - ref) < 0.05);
  CHECK(std::abs(off - ref) < 0.05);
}

TEST_CASE("arguments outside the support are rejected") {
  CHECK_THROWS_AS(expfield_kernel(1.2, 0.0, 10, -0.5, 0.99, 5.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(expfield_kernel(1.2, 0.0, 10, -0.5, 1.5, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(expfield_kernel(1.2, 2.0, 10, -0.5, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("comparison kernels approach their limit constants") {
  const double alpha = 1.1;
  const auto chk = comparison_kernel_check(alpha, 0.0, 80, 0.0, 0.0);
  CHECK(std::abs(chk.k_plus - kernel_limit_constant(+1, alpha)) < 0.05);
  CHECK(std::abs(chk.k_minus - kernel_limit_constant(-1, alpha)) < 0.05);
  // 5 test pairs at sup error < 0.1
  const std::vector<std::pair<double, double>> pairs{
      {0.0, 0.0}, {1.0, 0.0}, {0.5, -0.5}, {2.0, 1.0}, {1.5, -1.0}};
  double worst = 0.0;
  for (auto [x, y] : pairs) {
    const auto c = comparison_kernel_check(alpha, 0.0, 80, x, y);
    worst = std::max({worst, std::abs(c.k_plus - c.ref_plus), std::abs(c.k_minus - c.ref_minus)});
  }
  CHECK(worst < 0.1);
}

TEST_CASE("limiting kernels approach the sine kernel as alpha -> 1") {
  // c± -> 1/2: at the fixed pair the predicted limits approach sin(pi(x-y)/2)/(pi(x-y))
  const double x = 1.0, y = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {1.4, 1.2, 1.05}) {
    const auto c = comparison_kernel_check(alpha, 0.0, 60, x, y);
    const double target = 0.5 * sine_kernel(0.5 * x, 0.5 * y);
    const double dev = std::max(std::abs(c.ref_plus - target), std::abs(c.ref_minus - target));
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("support rescaling identity for the lower comparison weight") {
  // K_N(x, y; w-) = alpha^2 K_N(alpha^2 x, alpha^2 y; (1-t^2)^{1/2} e^{-N V_tilted}),
  // with the tilt scaled by alpha^{-2}
  const double alpha = 1.2, eps = 0.13;
  const long long n = 24;
  const double beta = 1.0 / (alpha * alpha);
  const auto rc_minus =
      stieltjes_recurrence(WeightSpec::comparison(-1, alpha, eps, n), static_cast<int>(n), 256);
  const auto rc_plus_half = stieltjes_recurrence(
      WeightSpec::exp_field(alpha, eps * beta, n, +0.5), static_cast<int>(n), 256);
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0.1, 0.0}, {0.3, -0.2}, {0.05, 0.6}}) {
    const double lhs = cd_kernel(rc_minus, static_cast<int>(n), x * beta, y * beta, true);
    const double rhs =
        cd_kernel(rc_plus_half, static_cast<int>(n), x, y, true) / beta;
    CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(lhs)));
  }
}
