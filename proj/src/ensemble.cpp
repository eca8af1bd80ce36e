#include "dmnls/ensemble.hpp"

#include <cmath>

namespace dmnls {

ComplexField random_bump_field(std::mt19937_64& rng, const GridPtr& grid) {
  const SpatialGrid& g = *grid;
  ComplexVector vals = ComplexVector::Zero(g.num_points);
  for (int b = 0; b < 3; ++b) {
    const Real center = detail::uniform(rng, -g.half_width / 4, g.half_width / 4);
    const Real width = detail::uniform(rng, 0.5, 3.0);
    const Real carrier = detail::uniform(rng, -5.0, 5.0);
    const Real amplitude = detail::uniform(rng, 0.1, 2.0);
    const Real phase = detail::uniform(rng, 0.0, 2 * kPi);
    for (int j = 0; j < g.num_points; ++j) {
      const Real y = g.x[j] - center;
      vals[j] += amplitude * std::exp(-y * y / (2 * width * width)) * std::polar(Real(1), carrier * y + phase);
    }
  }
  ComplexField f{grid, std::move(vals), 0};
  const Real target = std::exp(detail::uniform(rng, std::log(Real(0.1)), std::log(Real(10))));
  f.values *= target / sobolev_norm(f, 1);
  return f;
}

}  // namespace dmnls
