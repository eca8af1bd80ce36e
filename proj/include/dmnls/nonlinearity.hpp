#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/quadrature.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

namespace detail {

// |z|^alpha for z != 0, with fast paths for the small integer powers that
// dominate runs. 0^alpha * 0 := 0.
inline Real abs_pow(Real a, Real alpha) {
  if (a == 0) return 0;
  if (alpha == 1) return a;
  if (alpha == 2) return a * a;
  if (alpha == 3) return a * a * a;
  if (alpha == 4) {
    const Real a2 = a * a;
    return a2 * a2;
  }
  if (alpha == 5) {
    const Real a2 = a * a;
    return a2 * a2 * a;
  }
  return std::pow(a, alpha);
}

inline void power_nl_inplace(ComplexVector& v, Real alpha) {
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] *= abs_pow(std::abs(v[j]), alpha);
}

/// Frame phases e^{-i xi^2 r_m} (into frame) and conjugates (out of frame)
/// for every node of a rule; precomputed once per (grid, rule) so repeated
/// averaged-nonlinearity evaluations cost one transform pair per node.
struct FramePhases {
  std::vector<ComplexVector> to_frame;
  std::vector<ComplexVector> from_frame;

  FramePhases(const SpatialGrid& g, const Quadrature& quad) {
    to_frame.resize(quad.count());
    from_frame.resize(quad.count());
    for (int m = 0; m < quad.count(); ++m) {
      to_frame[m].resize(g.num_points);
      from_frame[m].resize(g.num_points);
      for (int j = 0; j < g.num_points; ++j) {
        to_frame[m][j] = std::polar(Real(1), -g.xi_sq[j] * quad.nodes[m]);
        from_frame[m][j] = std::conj(to_frame[m][j]);
      }
    }
  }
};

/// Averaged nonlinearity on spectral coefficients:
/// sum_m w_m e^{+i xi^2 r_m} F[ |T_{r_m} f|^alpha T_{r_m} f ].
/// Nodes are accumulated in ascending order for bit-reproducibility.
inline ComplexVector averaged_nl_spectrum(const SpatialGrid& g, const ComplexVector& f_hat, Real alpha,
                                          const Quadrature& quad, const FramePhases& phases) {
  ComplexVector acc = ComplexVector::Zero(g.num_points);
  ComplexVector work(g.num_points);
  for (int m = 0; m < quad.count(); ++m) {
    work = f_hat.cwiseProduct(phases.to_frame[m]);
    ComplexVector frame = inverse_unitary(work);
    power_nl_inplace(frame, alpha);
    work = forward_unitary(frame);
    acc.noalias() += quad.weights[m] * work.cwiseProduct(phases.from_frame[m]);
  }
  return acc;
}

}  // namespace detail

/// Pointwise power nonlinearity |f|^alpha f.
inline ComplexField power_nl(const ComplexField& f, Real alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("power_nl: alpha must be positive");
  ComplexField out = f;
  detail::power_nl_inplace(out.values, alpha);
  return out;
}

/// Nonlinearity conjugated by the free flow at phase D(s):
/// T_{D(s)}^{-1}( |T_{D(s)} f|^alpha T_{D(s)} f ). 2-periodic in s.
inline ComplexField conjugated_nl(Real s, const ComplexField& f, Real alpha) {
  if (!(alpha > 0)) throw std::invalid_argument("conjugated_nl: alpha must be positive");
  const Real r = d0_antiderivative(s);
  return free_propagate(power_nl(free_propagate(f, r), alpha), -r);
}

/// Averaged nonlinearity int_0^1 T_r^{-1}(|T_r f|^alpha T_r f) dr via the
/// supplied rule.
inline ComplexField averaged_nl(const ComplexField& f, Real alpha, const Quadrature& quad) {
  if (!(alpha > 0)) throw std::invalid_argument("averaged_nl: alpha must be positive");
  if (quad.count() < 2) throw std::invalid_argument("averaged_nl: invalid quadrature");
  const detail::FramePhases phases(*f.grid, quad);
  ComplexVector out_hat =
      detail::averaged_nl_spectrum(*f.grid, detail::forward_unitary(f.values), alpha, quad, phases);
  return ComplexField{f.grid, detail::inverse_unitary(out_hat), f.time};
}

/// Running integral of the oscillatory part of the conjugated nonlinearity,
/// int_0^theta [conjugated_nl(s, f) - averaged_nl(f)] ds, by composite Simpson
/// with tau_steps panels (rounded up to even). Vanishes over full periods.
inline ComplexField fluctuation_integral(Real theta, const ComplexField& f, Real alpha, int tau_steps,
                                         const Quadrature& quad) {
  if (!(theta >= 0)) throw std::invalid_argument("fluctuation_integral: theta must be >= 0");
  if (tau_steps < 2) throw std::invalid_argument("fluctuation_integral: need at least 2 panels");
  if (theta == 0) return ComplexField{f.grid, ComplexVector::Zero(f.grid->num_points), f.time};
  if (tau_steps % 2 != 0) ++tau_steps;

  const ComplexField avg = averaged_nl(f, alpha, quad);
  const Real h = theta / tau_steps;
  ComplexVector acc = ComplexVector::Zero(f.grid->num_points);
  for (int i = 0; i <= tau_steps; ++i) {
    const Real w = (i == 0 || i == tau_steps) ? h / 3 : (i % 2 == 1 ? 4 * h / 3 : 2 * h / 3);
    acc += w * (conjugated_nl(i * h, f, alpha).values - avg.values);
  }
  return ComplexField{f.grid, std::move(acc), f.time};
}

inline ComplexField fluctuation_integral(Real theta, const ComplexField& f, Real alpha, int tau_steps = 512) {
  return fluctuation_integral(theta, f, alpha, tau_steps, make_quadrature(QuadratureKind::gauss_legendre, 24));
}

}  // namespace dmnls
