#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <vector>

#include "rkl/sampler.hpp"

using namespace rkl;

TEST_CASE("sine kernel values") {
  CHECK(sine_kernel(0.3, 0.3) == 1.0);
  CHECK(std::abs(sine_kernel(1.7, 0.7)) < 1e-15);                         // distance 1
  CHECK(std::abs(sine_kernel(0.5, 0.0) - 2.0 / std::numbers::pi) < 1e-15);  // 0.6366198
  // series branch continuous at the switch
  CHECK(std::abs(sine_kernel(0.0, 0.9999e-6) - sine_kernel(0.0, 1.0001e-6)) < 1e-12);
}

TEST_CASE("discretized operator is symmetric with trace 2L") {
  const auto op = sine_operator_discretization(5.0, 40);
  const int n = static_cast<int>(op.sym.rows());
  double tr = 0.0;
  for (int i = 0; i < n; ++i) {
    tr += op.sym(i, i);
    for (int j = 0; j < i; ++j) CHECK(op.sym(i, j) == op.sym(j, i));
  }
  CHECK(std::abs(tr - 10.0) < 0.01 * 10.0);
}

TEST_CASE("operator spectrum lies in [0,1] up to roundoff") {
  const auto op = sine_operator_discretization(5.0, 40);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.sym);
  CHECK(es.eigenvalues().minCoeff() > -1e-8);
  CHECK(es.eigenvalues().maxCoeff() < 1.0 + 1e-8);
}

TEST_CASE("resolution rule is enforced") {
  CHECK_THROWS_AS(sine_operator_discretization(10.0, 60), std::invalid_argument);
  CHECK_THROWS_AS(sine_operator_discretization(-1.0, 60), std::invalid_argument);
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto op = sine_operator_discretization(6.0, 48);
  const auto a = sample_sine_dpp(op, 99);
  const auto b = sample_sine_dpp(op, 99);
  REQUIRE(a.points == b.points);
  const auto c = sample_sine_dpp(op, 100);
  CHECK(a.points != c.points);
}

TEST_CASE("samples stay in the window, sorted and distinct") {
  const auto op = sine_operator_discretization(6.0, 48);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = sample_sine_dpp(op, seed);
    for (double p : s.points) CHECK(std::abs(p) <= 6.0);
    for (std::size_t i = 0; i + 1 < s.points.size(); ++i) CHECK(s.points[i] < s.points[i + 1]);
  }
}

TEST_CASE("mean cardinality matches the operator trace") {
  const auto op = sine_operator_discretization(10.0, 80);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.sym);
  double lam_sum = 0.0, lam_var = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = std::clamp(es.eigenvalues()[i], 0.0, 1.0);
    lam_sum += l;
    lam_var += l * (1.0 - l);
  }
  const int runs = 200;
  double total = 0.0;
  for (int s = 0; s < runs; ++s) total += static_cast<double>(sample_sine_dpp(op, s).points.size());
  const double mean = total / runs;
  CHECK(mean > 19.0);
  CHECK(mean < 21.0);
  // within three standard errors of the exact mean
  const double se = std::sqrt(lam_var / runs);
  CHECK(std::abs(mean - lam_sum) <= 3.0 * se + 1e-9);
}

TEST_CASE("pair counts match the determinantal minors") {
  // Monte Carlo binned pair distances against the exact expectation
  //   E[#pairs at i<j] = A_ii A_jj - A_ij^2  on the node set
  const auto op = sine_operator_discretization(10.0, 80);
  const int n = static_cast<int>(op.sym.rows());
  const std::vector<double> edges{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const int nb = static_cast<int>(edges.size()) - 1;
  std::vector<double> expect(nb, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      const double d = std::abs(op.quad.nodes[i] - op.quad.nodes[j]);
      for (int b = 0; b < nb; ++b)
        if (d >= edges[b] && d < edges[b + 1])
          expect[b] += op.sym(i, i) * op.sym(j, j) - op.sym(i, j) * op.sym(i, j);
    }
  const int runs = 4000;
  std::vector<double> obs(nb, 0.0);
  for (int s = 0; s < runs; ++s) {
    const auto pts = sample_sine_dpp(op, 1000 + s).points;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const double d = std::abs(pts[i] - pts[j]);
        for (int b = 0; b < nb; ++b)
          if (d >= edges[b] && d < edges[b + 1]) obs[b] += 1.0;
      }
  }
  for (int b = 0; b < nb; ++b) {
    const double rel = obs[b] / (runs * expect[b]);
    INFO("bin " << b << " ratio " << rel);
    CHECK(std::abs(rel - 1.0) < 0.05);
  }
  // the minors themselves are the binned 1 - sinc^2 masses: A_ii = w_i and
  // A_ij^2 = w_i w_j sinc^2, so the check above compares the Monte-Carlo
  // pair counts to the correlation integral on the node measure
}

TEST_CASE("configuration wrapping grafts the lattice tail") {
  const auto op = sine_operator_discretization(10.0, 80);
  const auto s = sample_sine_dpp(op, 3);
  REQUIRE(!s.points.empty());
  const auto cfg = to_configuration(s);
  CHECK_NOTHROW(validate(cfg));
  CHECK(cfg.has_lattice_tail());
  CHECK(cfg.tail.shift == 0.5);
  CHECK(cfg.points == s.points);
  const auto rep = check_assumptions(cfg, {5.0, 10.0});
  CHECK(rep.monotone);
}

TEST_CASE("empty sample falls back to the pure lattice") {
  DppSample empty;
  empty.window = 8.0;
  const auto cfg = to_configuration(empty);
  const auto ref = make_lattice_config(8.0, 0.5);
  CHECK(cfg.points == ref.points);
}

TEST_CASE("ratio diagnostics of wrapped samples stay near one") {
  // index fluctuations of order sqrt(n) log^2 n make the band statistical
  // at small n: nearly all ratios sit in [0.8, 1.2], everything in a
  // wider safety band
  const auto op = sine_operator_discretization(50.0, 400);
  int checked = 0, outside = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = sample_sine_dpp(op, seed);
    if (s.points.empty()) continue;
    const auto cfg = to_configuration(s);
    for (int nidx = cfg.first_index(); nidx <= cfg.last_index(); ++nidx) {
      if (std::abs(nidx) < 10) continue;
      const double r = cfg.at_index(nidx) / nidx;
      CHECK(r > 0.6);
      CHECK(r < 1.4);
      if (r < 0.8 || r > 1.2) ++outside;
      ++checked;
    }
  }
  REQUIRE(checked > 100);
  CHECK(outside < 0.01 * checked);
}
