#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "dmnls/types.hpp"

namespace dmnls {

enum class QuadratureKind { gauss_legendre, composite_simpson };

/// Nodes and weights for integrals over the unit interval [0, 1].
/// Weights sum to 1. Gauss-Legendre nodes are strictly interior;
/// composite Simpson includes the endpoints (closed rule).
struct Quadrature {
  QuadratureKind kind = QuadratureKind::gauss_legendre;
  RealVector nodes;
  RealVector weights;

  int count() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// Gauss-Legendre on [-1, 1] by Newton iteration on P_n; standard construction.
inline void gauss_legendre_reference(int n, RealVector& x, RealVector& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Real pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Real p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        const Real p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * z * p1 - j * p2) / (j + 1);
      }
      pp = n * (z * p0 - p1) / (z * z - 1);
      const Real dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace detail

/// Build a rule for integrals over [0, 1].
/// Gauss-Legendre: any n >= 2. Composite Simpson: odd node count >= 3.
inline Quadrature make_quadrature(QuadratureKind kind, int n) {
  Quadrature q;
  q.kind = kind;
  if (kind == QuadratureKind::gauss_legendre) {
    if (n < 2) throw std::invalid_argument("make_quadrature: Gauss-Legendre needs at least 2 nodes");
    RealVector x, w;
    detail::gauss_legendre_reference(n, x, w);
    q.nodes = (x.array() + 1) / 2;
    q.weights = w / 2;
  } else {
    if (n < 3 || n % 2 == 0)
      throw std::invalid_argument("make_quadrature: composite Simpson needs an odd node count >= 3, got " +
                                  std::to_string(n));
    q.nodes.resize(n);
    q.weights.resize(n);
    const Real h = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
      q.nodes[i] = i * h;
      q.weights[i] = (i == 0 || i == n - 1) ? h / 3 : (i % 2 == 1 ? 4 * h / 3 : 2 * h / 3);
    }
  }
  return q;
}

}  // namespace dmnls
