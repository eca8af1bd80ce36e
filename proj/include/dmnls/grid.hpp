#pragma once

#include <memory>
#include <stdexcept>

#include "dmnls/types.hpp"

namespace dmnls {

/// Uniform collocation grid on the periodic interval [-L, L).
///
/// Wavenumbers are stored in the transform's native ordering:
/// xi_m = (pi/L) * m for m = 0..N/2-1, then m = -N/2..-1.
/// Immutable after construction; share freely across threads.
struct SpatialGrid {
  Real half_width = 0;  // L
  int num_points = 0;   // N, even
  Real spacing = 0;     // dx = 2L/N
  RealVector x;         // collocation points, x_j = -L + j*dx
  RealVector xi;        // wavenumbers, FFT order
  RealVector xi_sq;     // xi^2, cached for multipliers

  Real max_wavenumber() const { return kPi / half_width * (num_points / 2); }
};

using GridPtr = std::shared_ptr<const SpatialGrid>;

inline GridPtr make_grid(Real half_width, int num_points) {
  if (!(half_width > 0) || !std::isfinite(half_width))
    throw std::invalid_argument("make_grid: half-width must be positive and finite");
  if (num_points < 8 || num_points % 2 != 0)
    throw std::invalid_argument("make_grid: need an even number of points, at least 8");

  auto g = std::make_shared<SpatialGrid>();
  g->half_width = half_width;
  g->num_points = num_points;
  g->spacing = 2 * half_width / num_points;
  g->x.resize(num_points);
  g->xi.resize(num_points);
  g->xi_sq.resize(num_points);
  const Real k0 = kPi / half_width;
  for (int j = 0; j < num_points; ++j) {
    g->x[j] = -half_width + j * g->spacing;
    const int m = j < num_points / 2 ? j : j - num_points;
    g->xi[j] = k0 * m;
    g->xi_sq[j] = g->xi[j] * g->xi[j];
  }
  return g;
}

}  // namespace dmnls
