#pragma once

// Gauss-Legendre quadrature via the Golub-Welsch eigenvalue method.
// Rules on [-1,1] are cached per order; arbitrary intervals are affine
// images of the cached rule.

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "rkl/numerics.hpp"

namespace rkl {

struct Quadrature {
  std::vector<double> nodes;    // strictly increasing, interior
  std::vector<double> weights;  // positive, sum = hi - lo
  double lo = -1.0;
  double hi = 1.0;
};

namespace detail {

inline const Quadrature& gauss_legendre_base(int order) {
  static std::mutex mtx;
  static std::map<int, Quadrature> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  // Jacobi matrix of the Legendre weight: zero diagonal,
  // off-diagonal b_k = k / sqrt(4k^2 - 1).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
  for (int k = 1; k < order; ++k) sub[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);

  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  if (order == 1) {
    q.nodes[0] = 0.0;
    q.weights[0] = 2.0;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success)
      throw StabilityError("gauss_legendre: eigensolver failed");
    for (int i = 0; i < order; ++i) {
      q.nodes[i] = es.eigenvalues()[i];
      const double v0 = es.eigenvectors()(0, i);
      q.weights[i] = 2.0 * v0 * v0;
    }
    // the rule is symmetric; fold the two halves to remove rounding skew
    for (int i = 0, j = order - 1; i < j; ++i, --j) {
      const double x = 0.5 * (q.nodes[j] - q.nodes[i]);
      q.nodes[i] = -x;
      q.nodes[j] = x;
      const double w = 0.5 * (q.weights[i] + q.weights[j]);
      q.weights[i] = q.weights[j] = w;
    }
    if (order % 2 == 1) q.nodes[order / 2] = 0.0;
  }
  return cache.emplace(order, std::move(q)).first->second;
}

}  // namespace detail

/// Gauss-Legendre rule with `order` nodes on [lo, hi]; exact for
/// polynomials of degree <= 2*order - 1.
inline Quadrature gauss_legendre(int order, double lo = -1.0, double hi = 1.0) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  if (!(lo < hi)) throw std::invalid_argument("gauss_legendre: empty interval");
  const Quadrature& base = detail::gauss_legendre_base(order);
  Quadrature q;
  q.lo = lo;
  q.hi = hi;
  q.nodes.resize(base.nodes.size());
  q.weights.resize(base.weights.size());
  const double mid = 0.5 * (lo + hi);
  const double rad = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < base.nodes.size(); ++i) {
    q.nodes[i] = mid + rad * base.nodes[i];
    q.weights[i] = rad * base.weights[i];
  }
  return q;
}

}  // namespace rkl
