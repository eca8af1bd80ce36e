#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dmnls/types.hpp"

namespace dmnls {

/// Two-scale dispersion coefficient d(t) = d_av + (1/eps) d0(t/eps) with the
/// fixed 2-periodic profile d0 = +1 on [0,1), -1 on [1,2). The type is closed:
/// only this profile is supported, so the antiderivative stays in closed form.
struct DispersionMap {
  Real d_av = 0;
  Real epsilon = 1;
};

inline DispersionMap make_dispersion_map(Real d_av, Real epsilon) {
  if (!std::isfinite(d_av)) throw std::invalid_argument("dispersion map: d_av must be finite");
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    throw std::invalid_argument("dispersion map: epsilon must be positive and finite");
  return DispersionMap{d_av, epsilon};
}

namespace detail {
// Wrap into [0, 2); the profile is extended 2-periodically to all of R.
inline Real wrap_period(Real tau) {
  Real r = std::fmod(tau, Real(2));
  if (r < 0) r += 2;
  return r;
}
}  // namespace detail

/// The fast profile, chi_[0,1) - chi_[1,2) of (tau mod 2).
inline Real d0(Real tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("d0: non-finite argument");
  return detail::wrap_period(tau) < 1 ? Real(1) : Real(-1);
}

/// Antiderivative of d0: the 2-periodic triangle wave with range [0, 1].
/// Since d0 has mean zero, the periodic extension equals int_0^tau d0 for
/// every real tau, negative arguments included.
inline Real d0_antiderivative(Real tau) {
  if (!std::isfinite(tau)) throw std::invalid_argument("d0_antiderivative: non-finite argument");
  const Real r = detail::wrap_period(tau);
  return r <= 1 ? r : 2 - r;
}

/// Exact integral of d(t) over [t0, t1]:
/// d_av*(t1-t0) + D(t1/eps) - D(t0/eps), additive by construction.
inline Real integrated_dispersion(Real t0, Real t1, const DispersionMap& map) {
  if (!std::isfinite(t0) || !std::isfinite(t1))
    throw std::invalid_argument("integrated_dispersion: non-finite endpoint");
  return map.d_av * (t1 - t0) + d0_antiderivative(t1 / map.epsilon) - d0_antiderivative(t0 / map.epsilon);
}

/// Discontinuities t = k*eps of d0(t/eps) strictly inside (t0, t1), sorted.
inline std::vector<Real> breakpoints_in(Real t0, Real t1, Real epsilon) {
  if (!(t0 < t1)) throw std::invalid_argument("breakpoints_in: need t0 < t1");
  if (!(epsilon > 0)) throw std::invalid_argument("breakpoints_in: need epsilon > 0");
  std::vector<Real> out;
  const long long k_lo = static_cast<long long>(std::floor(t0 / epsilon)) - 1;
  const long long k_hi = static_cast<long long>(std::ceil(t1 / epsilon)) + 1;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const Real t = k * epsilon;
    if (t > t0 && t < t1) out.push_back(t);
  }
  return out;
}

}  // namespace dmnls
