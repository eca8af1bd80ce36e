#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "dmnls/fft.hpp"
#include "dmnls/grid.hpp"
#include "dmnls/quadrature.hpp"
#include "dmnls/types.hpp"

namespace dmnls {

/// Complex samples on a grid. The time tag is metadata only: operators
/// never advance it, steppers do.
struct ComplexField {
  GridPtr grid;
  ComplexVector values;
  Real time = 0;
};

inline ComplexField make_field(GridPtr grid, ComplexVector values, Real time = 0) {
  if (!grid) throw std::invalid_argument("make_field: null grid");
  if (values.size() != grid->num_points)
    throw std::invalid_argument("make_field: value count does not match grid");
  if (!values.allFinite()) throw std::invalid_argument("make_field: non-finite samples");
  return ComplexField{std::move(grid), std::move(values), time};
}

/// Sobolev regularity index s >= 0.
struct SobolevIndex {
  Real s = 0;
  explicit SobolevIndex(Real s_) : s(s_) {
    if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("SobolevIndex: s must be finite and >= 0");
  }
};

/// Unitary spectral coefficients of f (Parseval holds without scale factors).
inline ComplexVector to_spectrum(const ComplexField& f) { return detail::forward_unitary(f.values); }

inline ComplexField from_spectrum(const ComplexVector& coeffs, GridPtr grid, Real time = 0) {
  if (!grid || coeffs.size() != grid->num_points)
    throw std::invalid_argument("from_spectrum: coefficient count does not match grid");
  return ComplexField{std::move(grid), detail::inverse_unitary(coeffs), time};
}

namespace detail {

/// In-place free-flow multiplier on spectral coefficients: e^{-i xi^2 t}.
inline void free_phase_inplace(const SpatialGrid& g, ComplexVector& coeffs, Real t) {
  for (int m = 0; m < g.num_points; ++m) coeffs[m] *= std::polar(Real(1), -g.xi_sq[m] * t);
}

inline ComplexVector propagate_values(const SpatialGrid& g, const ComplexVector& values, Real t) {
  ComplexVector c = forward_unitary(values);
  free_phase_inplace(g, c, t);
  return inverse_unitary(c);
}

inline Real sobolev_norm_spectrum(const SpatialGrid& g, const ComplexVector& coeffs, Real s) {
  Real acc = 0;
  if (s == 0) {
    acc = coeffs.squaredNorm();
  } else if (s == 1 || s == 2 || s == 3) {
    const int p = static_cast<int>(s);
    for (int m = 0; m < g.num_points; ++m) {
      Real w = 1 + g.xi_sq[m];
      if (p == 2) w *= w;
      if (p == 3) w *= w * (1 + g.xi_sq[m]);
      acc += w * std::norm(coeffs[m]);
    }
  } else {
    for (int m = 0; m < g.num_points; ++m) acc += std::pow(1 + g.xi_sq[m], s) * std::norm(coeffs[m]);
  }
  return std::sqrt(acc * g.spacing);
}

}  // namespace detail

/// Free Schroedinger flow T_t = e^{i t dx^2}: multiplication by e^{-i xi^2 t}
/// in spectrum. Unitary on every H^s; the time tag is left untouched (T_t is
/// a frame operator, not a clock).
inline ComplexField free_propagate(const ComplexField& f, Real t) {
  if (!std::isfinite(t)) throw std::invalid_argument("free_propagate: non-finite t");
  if (t == 0) return f;  // T_0 is the identity, exactly
  return ComplexField{f.grid, detail::propagate_values(*f.grid, f.values, t), f.time};
}

/// Discrete H^s norm, (sum (1+xi^2)^s |fhat|^2 dx)^{1/2}; s = 0 is L^2.
inline Real sobolev_norm(const ComplexField& f, SobolevIndex s) {
  return detail::sobolev_norm_spectrum(*f.grid, detail::forward_unitary(f.values), s.s);
}
inline Real sobolev_norm(const ComplexField& f, Real s) { return sobolev_norm(f, SobolevIndex(s)); }

/// Mass ||f||_{L^2}^2.
inline Real mass(const ComplexField& f) { return f.values.squaredNorm() * f.grid->spacing; }

/// Energy of the averaged flow:
/// E(v) = (d_av/2)||dx v||_{L2}^2 - (alpha+2)^{-1} int_0^1 ||T_r v||_{L^{a+2}}^{a+2} dr.
inline Real averaged_energy(const ComplexField& f, Real alpha, Real d_av, const Quadrature& quad) {
  const SpatialGrid& g = *f.grid;
  ComplexVector c = detail::forward_unitary(f.values);
  Real kinetic = 0;
  for (int m = 0; m < g.num_points; ++m) kinetic += g.xi_sq[m] * std::norm(c[m]);
  kinetic *= g.spacing;

  Real potential = 0;
  for (int m = 0; m < quad.count(); ++m) {
    ComplexVector cm = c;
    detail::free_phase_inplace(g, cm, quad.nodes[m]);
    const ComplexVector w = detail::inverse_unitary(cm);
    Real lp = 0;
    for (int j = 0; j < g.num_points; ++j) lp += std::pow(std::abs(w[j]), alpha + 2);
    potential += quad.weights[m] * lp * g.spacing;
  }
  return d_av / 2 * kinetic - potential / (alpha + 2);
}

// ---------------------------------------------------------------------------
// Initial data
// ---------------------------------------------------------------------------

struct GaussianSpec {
  Real amplitude = 1, width = 1, chirp = 0, center = 0, carrier = 0;
};
struct SechSpec {
  Real amplitude = 1, width = 1;
};
struct SingleModeSpec {
  Real amplitude = 1;
  Real wavenumber = 0;  // must lie on the grid, k = (pi/L) * integer
};

using InitialDatumSpec = std::variant<GaussianSpec, SechSpec, SingleModeSpec>;

namespace detail {

/// Largest tail coefficient (top 10% of |xi|) relative to the spectral peak.
inline Real spectral_tail_ratio(const SpatialGrid& g, const ComplexVector& coeffs) {
  const Real cutoff = 0.9 * g.max_wavenumber();
  Real peak = 0, tail = 0;
  for (int m = 0; m < g.num_points; ++m) {
    const Real a = std::abs(coeffs[m]);
    peak = std::max(peak, a);
    if (std::abs(g.xi[m]) >= cutoff) tail = std::max(tail, a);
  }
  return peak > 0 ? tail / peak : 0;
}

}  // namespace detail

/// Realize an H^1 initial datum on the grid, tagged time 0. Rejects data the
/// grid cannot resolve (spectral tail above 1e-12 of the peak).
inline ComplexField sample_initial_datum(const InitialDatumSpec& spec, GridPtr grid) {
  const SpatialGrid& g = *grid;
  ComplexVector vals(g.num_points);
  if (const auto* gs = std::get_if<GaussianSpec>(&spec)) {
    if (!(gs->width > 0)) throw std::invalid_argument("gaussian: width must be positive");
    for (int j = 0; j < g.num_points; ++j) {
      const Real y = g.x[j] - gs->center;
      vals[j] = gs->amplitude * std::exp(-y * y / (2 * gs->width * gs->width)) *
                std::polar(Real(1), gs->chirp * y * y + gs->carrier * y);
    }
  } else if (const auto* ss = std::get_if<SechSpec>(&spec)) {
    if (!(ss->width > 0)) throw std::invalid_argument("sech: width must be positive");
    for (int j = 0; j < g.num_points; ++j) vals[j] = ss->amplitude / std::cosh(g.x[j] / ss->width);
  } else {
    const auto& sm = std::get<SingleModeSpec>(spec);
    const Real k0 = kPi / g.half_width;
    const Real ratio = sm.wavenumber / k0;
    const Real idx = std::round(ratio);
    if (std::abs(ratio - idx) > 1e-9 || std::abs(idx) > g.num_points / 2)
      throw std::invalid_argument("single_mode: wavenumber not representable on the grid");
    for (int j = 0; j < g.num_points; ++j) vals[j] = sm.amplitude * std::polar(Real(1), sm.wavenumber * g.x[j]);
  }

  const Real tail = detail::spectral_tail_ratio(g, detail::forward_unitary(vals));
  if (tail > 1e-12)
    throw NumericalError("initial datum is not resolved on this grid (spectral tail " + std::to_string(tail) + ")");
  return ComplexField{std::move(grid), std::move(vals), 0};
}

}  // namespace dmnls
