#pragma once

// Finite-window sampler for the sine-kernel determinantal process.
// The kernel restricted to [-L, L] is discretized on a Gauss-Legendre
// grid and symmetrized; eigenpairs are Bernoulli-selected by eigenvalue
// and the resulting projection kernel is sampled sequentially through
// Schur-complement updates.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "rkl/numerics.hpp"
#include "rkl/pointconf.hpp"
#include "rkl/quadrature.hpp"

namespace rkl {

/// sin(pi(x-y)) / (pi(x-y)), with the removable singularity expanded in
/// series for |x-y| < 1e-6.
inline double sine_kernel(double x, double y) {
  const double d = x - y;
  if (std::abs(d) < 1e-6) {
    const double q = std::numbers::pi * d;
    const double q2 = q * q;
    return 1.0 - q2 / 6.0 + q2 * q2 / 120.0;
  }
  return std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
}

struct SineOperator {
  Quadrature quad;          // Gauss-Legendre rule on [-L, L]
  Eigen::MatrixXd sym;      // sqrt(w_i) K(x_i,x_j) sqrt(w_j)
  double window = 0.0;
};

/// Discretizes the sine kernel on [-L, L].  The resolution rule demands at
/// least 8 nodes per unit length (the kernel has bandwidth pi).
inline SineOperator sine_operator_discretization(double L, int quadrature_order) {
  if (!(L > 0.0)) throw std::invalid_argument("sine_operator_discretization: L must be positive");
  if (quadrature_order < static_cast<int>(std::ceil(8.0 * L)))
    throw std::invalid_argument("sine_operator_discretization: order must be >= 8 L");
  SineOperator op;
  op.window = L;
  op.quad = gauss_legendre(quadrature_order, -L, L);
  const int n = quadrature_order;
  op.sym.resize(n, n);
  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) sq[i] = std::sqrt(op.quad.weights[i]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = sq[i] * sq[j] * sine_kernel(op.quad.nodes[i], op.quad.nodes[j]);
      op.sym(i, j) = v;
      op.sym(j, i) = v;
    }
  return op;
}

struct DppSample {
  std::vector<double> points;               // sorted, in [-L, L]
  double window = 0.0;                      // L
  std::vector<double> eigenvalue_spectrum;  // raw spectrum before clipping
  std::uint64_t seed = 0;
};

namespace detail {

inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Draws one sample from the discretized process.  Draw order is fixed
/// (one Bernoulli per eigenvalue in ascending order, then one uniform per
/// accepted point), so a seed fully determines the sample.
inline DppSample sample_sine_dpp(const SineOperator& op, std::uint64_t seed) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.sym);
  if (es.info() != Eigen::Success)
    throw StabilityError("sample_sine_dpp: eigendecomposition failed");

  DppSample out;
  out.window = op.window;
  out.seed = seed;
  const int n = static_cast<int>(op.sym.rows());
  out.eigenvalue_spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);

  std::mt19937_64 rng(seed);
  std::vector<int> chosen;
  for (int i = 0; i < n; ++i) {
    const double lam = std::clamp(es.eigenvalues()[i], 0.0, 1.0);
    if (detail::uniform01(rng) < lam) chosen.push_back(i);
  }
  if (chosen.empty()) return out;  // empty sample, valid

  const int k = static_cast<int>(chosen.size());
  Eigen::MatrixXd U(n, k);
  for (int j = 0; j < k; ++j) U.col(j) = es.eigenvectors().col(chosen[j]);
  Eigen::MatrixXd P = U * U.transpose();  // projection kernel on the node set

  Eigen::VectorXd diag = P.diagonal().cwiseMax(0.0);
  for (int step = 0; step < k; ++step) {
    const double total = diag.sum();
    if (!(total > 0.0)) break;
    double u = detail::uniform01(rng) * total;
    int j = 0;
    for (; j < n - 1; ++j) {
      u -= diag[j];
      if (u <= 0.0) break;
    }
    out.points.push_back(op.quad.nodes[j]);
    const double pivot = P(j, j);
    if (!(pivot > 0.0)) break;
    P -= (P.col(j) * P.row(j)) / pivot;
    diag = P.diagonal().cwiseMax(0.0);
    diag[j] = 0.0;
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

inline DppSample sample_sine_dpp(double L, int quadrature_order, std::uint64_t seed) {
  return sample_sine_dpp(sine_operator_discretization(L, quadrature_order), seed);
}

/// Wraps a sample into a PointConfiguration by grafting the half-integer
/// lattice beyond the window.  A sampled point within 1e-9 of the first
/// tail point pushes the tail outward by one unit; an empty sample falls
/// back to the pure lattice so downstream counts stay meaningful.
inline PointConfiguration to_configuration(const DppSample& sample) {
  double S = sample.window;
  if (sample.points.empty()) return make_lattice_config(S, 0.5);

  auto ts = detail::lattice_tail_start(S, 0.5);
  if (sample.points.back() > ts.a_plus - 1e-9 || sample.points.front() < -(ts.a_minus - 1e-9))
    S += 1.0;

  PointConfiguration cfg;
  cfg.window_radius = S;
  cfg.tail = TailModel::lattice(0.5);
  cfg.points = sample.points;
  cfg.index_offset = detail::computed_index_offset(cfg.points);
  validate(cfg);
  return cfg;
}

}  // namespace rkl
