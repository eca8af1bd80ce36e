#pragma once

#include <cstdint>
#include <random>

#include "dmnls/spectral.hpp"

namespace dmnls {

/// Fixed random-field ensemble used by the bound suites: three Gaussian
/// bumps with centers |x_j| <= L/4, widths in [0.5, 3], carriers |k_j| <= 5,
/// amplitudes in [0.1, 2], rescaled to an H^1 norm drawn log-uniformly from
/// [0.1, 10]. Seeded and platform-stable.
ComplexField random_bump_field(std::mt19937_64& rng, const GridPtr& grid);

namespace detail {
/// Uniform double in [0, 1) from the raw generator stream (no distribution
/// objects, which differ across standard libraries).
inline Real uniform01(std::mt19937_64& rng) { return static_cast<Real>(rng() >> 11) * 0x1.0p-53; }
inline Real uniform(std::mt19937_64& rng, Real lo, Real hi) { return lo + (hi - lo) * uniform01(rng); }
}  // namespace detail

}  // namespace dmnls
