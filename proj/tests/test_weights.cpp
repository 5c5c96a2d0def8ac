#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rkl/weights.hpp"

using namespace rkl;

namespace {

// high-order partial sum of the series t^2 + sum t^{2k} / (k(2k-1)),
// independent of the production branch selection
double field_series_oracle(double t, int kmax = 2000) {
  double acc = 0.0;
  for (int k = kmax; k >= 2; --k) acc += std::pow(t, 2 * k) / (k * (2.0 * k - 1.0));
  return acc + t * t;
}

// truncated brute-force product over the exterior lattice
double brute_log_conditional(const PointConfiguration& cfg, double R, double t, long long terms) {
  double acc = 0.0;
  for (double p : cfg.points)
    if (std::abs(p) > R) acc += std::log1p(-t / p);
  const auto ts = detail::lattice_tail_start(cfg.window_radius, cfg.tail.shift);
  for (long long k = terms - 1; k >= 0; --k)
    acc += std::log1p(-t / (ts.a_plus + k)) + std::log1p(t / (ts.a_minus + k));
  return 2.0 * acc;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

TEST_CASE("external field values") {
  CHECK(external_field(0.0) == 0.0);
  CHECK(std::abs(external_field(1.0) - 2.0 * std::log(2.0)) < 1e-15);
  CHECK(std::abs(external_field(-1.0) - 2.0 * std::log(2.0)) < 1e-15);
  CHECK(std::abs(external_field(0.5) - field_series_oracle(0.5)) < 1e-14);
  // branch seam and series region
  for (double t : {0.01, 0.05, 0.09, 0.0999, 0.1001, 0.3, 0.9})
    CHECK(std::abs(external_field(t) - field_series_oracle(t)) < 1e-15 * (1.0 + std::abs(field_series_oracle(t))) + 1e-16);
  // even
  for (double t : {0.05, 0.3, 0.77}) CHECK(external_field(t) == external_field(-t));
  CHECK_THROWS_AS(external_field(1.0000001), std::domain_error);
}

TEST_CASE("conditional weight normalization and symmetry") {
  const auto cfg = make_lattice_config(12.0, 0.5);
  const double R = 10.0;
  CHECK(log_conditional_weight(cfg, R, 0.0) == 0.0);
  for (double t : {0.5, 2.0, 7.5, 9.9})
    CHECK(std::abs(log_conditional_weight(cfg, R, t) - log_conditional_weight(cfg, R, -t)) < 1e-12);
}

TEST_CASE("conditional weight tail closed form matches brute force") {
  const auto cfg = make_lattice_config(12.0, 0.5);
  const double closed = log_conditional_weight(cfg, 10.0, 5.0);
  const double brute = brute_log_conditional(cfg, 10.0, 5.0, 10'000'000);
  CHECK(std::abs(closed - brute) < 1e-10 * std::abs(closed) + 5e-6);
  // shifted lattice too
  const auto cfg2 = make_lattice_config(9.0, 0.25);
  const double c2 = log_conditional_weight(cfg2, 7.0, 3.3);
  const double b2 = brute_log_conditional(cfg2, 7.0, 3.3, 10'000'000);
  CHECK(std::abs(c2 - b2) < 5e-6);
}

TEST_CASE("conditional weight is window-invariant") {
  // the same infinite configuration through different window radii
  const auto a = make_lattice_config(20.0, 0.25);
  const auto b = make_lattice_config(55.0, 0.25);
  for (double t : {0.0, 1.0, 4.4, -3.2})
    CHECK(std::abs(log_conditional_weight(a, 10.0, t) - log_conditional_weight(b, 10.0, t)) <
          1e-12);
}

TEST_CASE("rescaled weight basics") {
  const auto cfg = make_lattice_config(12.0, 0.5);
  CHECK(rescaled_weight(cfg, 10.0, 0.0) == 1.0);
  for (double t : {-0.99, -0.5, 0.25, 0.99}) CHECK(rescaled_weight(cfg, 10.0, t) > 0.0);
  CHECK_THROWS_AS(log_rescaled_weight(cfg, 10.0, 1.5), std::domain_error);
}

TEST_CASE("comparison weights at the origin and symmetry") {
  CHECK(comparison_weight(+1, 1.2, 0.0, 20, 0.0) == 1.0);
  CHECK(comparison_weight(-1, 1.2, 0.0, 20, 0.0) == 1.0);
  for (double t : {0.1, 0.3, 0.6}) {
    CHECK(std::abs(comparison_weight(+1, 1.2, 0.0, 20, t) -
                   comparison_weight(+1, 1.2, 0.0, 20, -t)) < 1e-15);
    CHECK(std::abs(comparison_weight(-1, 1.3, 0.0, 20, t * 0.5) -
                   comparison_weight(-1, 1.3, 0.0, 20, -t * 0.5)) < 1e-15);
  }
  // tagged endpoint values
  CHECK(std::isinf(log_comparison_weight(+1, 1.2, 0.0, 20, 1.0)));
  CHECK(log_comparison_weight(+1, 1.2, 0.0, 20, 1.0) > 0.0);
  CHECK(comparison_weight(-1, 1.2, 0.0, 20, 0.9) == 0.0);  // outside [-beta, beta]
}

TEST_CASE("lower comparison weight sits below the upper one") {
  const double alpha = 1.2, beta = 1.0 / (alpha * alpha);
  for (double t : linspace(-beta, beta, 101)) {
    const double lo = log_comparison_weight(-1, alpha, 0.0, 20, t);
    const double hi = log_comparison_weight(+1, alpha, 0.0, 20, t);
    CHECK(lo <= hi + 1e-12);
  }
}

TEST_CASE("lattice product bounds hold with vanishing margin at zero") {
  const auto grid = linspace(-1.0, 1.0, 201);
  for (long long R : {2, 5, 10, 50}) {
    const auto rep = check_lattice_product_bounds(R, grid);
    CHECK(rep.ok(-1e-12));
  }
  // all three quantities coincide at t = 0
  const auto rep0 = check_lattice_product_bounds(5, std::vector<double>{0.0});
  CHECK(std::abs(rep0.min_lower_margin) < 1e-15);
  CHECK(std::abs(rep0.min_upper_margin) < 1e-15);
}

TEST_CASE("lattice product margins are strictly positive off zero and O(t^2) near it") {
  const auto rep = check_lattice_product_bounds(5, std::vector<double>{0.5});
  CHECK(rep.min_lower_margin > 0.0);
  CHECK(rep.min_upper_margin > 0.0);
  // quadratic scaling of the log-margin near t = 0
  std::vector<double> ratio;
  for (double t : {0.02, 0.01, 0.005}) {
    const auto r = check_lattice_product_bounds(5, std::vector<double>{t});
    ratio.push_back(r.min_upper_margin / (t * t));
  }
  CHECK(std::abs(ratio[0] - ratio[2]) < 0.05 * std::abs(ratio[2]));
}

TEST_CASE("comparison bounds hold for the half-integer lattice with equality at zero") {
  const auto cfg = make_lattice_config(200.0, 0.5);
  const double alpha = 1.1, beta = 0.8;
  auto gu = linspace(-1.0, 1.0, 201);
  auto gl = linspace(-beta, beta, 201);
  for (double R : {10.0, 40.0, 160.0}) {
    const auto rep = check_comparison_bounds(cfg, R, alpha, beta, gu, gl);
    CHECK(rep.margins.ok(-1e-12));
    CHECK(std::abs(rep.upper_margin_at_zero) < 1e-12);
    CHECK(std::abs(rep.lower_margin_at_zero) < 1e-12);
  }
}

TEST_CASE("comparison margins vanish quadratically at the matched tilt") {
  // log-margins are O(t^2) near zero: values and first derivatives agree
  const auto cfg = make_lattice_config(200.0, 0.25);
  const double R = 40.0;
  const long long N = count_points(cfg, R);
  const double eps = exterior_tilt(cfg, R, N);
  auto upper_margin = [&](double t) {
    return -static_cast<double>(N) * (external_field(t / 1.1) + eps * t) -
           log_rescaled_weight(cfg, R, t);
  };
  std::vector<double> ratio;
  for (double t : {0.02, 0.01, 0.005}) ratio.push_back(upper_margin(t) / (t * t));
  CHECK(std::abs(ratio[0] - ratio[2]) < 0.1 * std::abs(ratio[2]) + 1e-9);
}

TEST_CASE("threshold sweep finds a finite threshold") {
  const auto cfg = make_lattice_config(200.0, 0.5);
  std::vector<double> sweep;
  for (double R = 10.0; R <= 160.0; R += 10.0) sweep.push_back(R);
  const double rstar = comparison_threshold_sweep(cfg, 1.1, 0.8, sweep, 201);
  REQUIRE(rstar > 0.0);
  CHECK(rstar <= 160.0);
}

TEST_CASE("weight spec dispatch agrees with the free functions") {
  const auto cfg = make_lattice_config(12.0, 0.5);
  const auto w1 = WeightSpec::rescaled(cfg, 10.0);
  CHECK(w1.log_value(0.3) == log_rescaled_weight(cfg, 10.0, 0.3));
  CHECK(w1.support() == std::pair<double, double>{-1.0, 1.0});
  const auto w2 = WeightSpec::conditional(cfg, 10.0);
  CHECK(w2.log_value(3.0) == log_conditional_weight(cfg, 10.0, 3.0));
  CHECK(w2.support() == std::pair<double, double>{-10.0, 10.0});
  const auto w3 = WeightSpec::comparison(-1, 1.2, 0.1, 30);
  CHECK(w3.log_value(0.2) == log_comparison_weight(-1, 1.2, 0.1, 30, 0.2));
  const auto w4 = WeightSpec::exp_field(1.2, 0.1, 30, -0.5);
  CHECK(w4.log_value(0.2) == log_comparison_weight(+1, 1.2, 0.1, 30, 0.2));
  CHECK_THROWS_AS(WeightSpec::exp_field(1.2, 0.0, 10, 0.25), std::invalid_argument);
}

TEST_CASE("no overflow in the log domain for large N") {
  const auto w = WeightSpec::exp_field(1.1, 0.2, 400, 0.5);
  for (double t : linspace(-0.999, 0.999, 51)) {
    const double lw = w.log_value(t);
    CHECK(std::isfinite(lw));
    CHECK(std::isfinite(std::exp(lw)) );  // exp underflows to 0 at worst
  }
}
