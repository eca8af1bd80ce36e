#pragma once

#include <string>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/nonlinearity.hpp"
#include "dmnls/quadrature.hpp"
#include "dmnls/spectral.hpp"

namespace dmnls {

/// Stepper for the managed equation in the u-frame. Steps are tied to the
/// fast period, dt = epsilon / n_sub, and never straddle a breakpoint
/// t = k*epsilon, so the linear flow is exact in every substep.
struct DmStepperConfig {
  DispersionMap map;
  Real alpha = 2;
  int n_sub = 16;            // dt = epsilon / n_sub
  Real h1_cap_factor = 1e3;  // blow-up guard: cap = factor * ||phi||_H1
  bool dealias = false;      // optional 2/3-rule filter after nonlinear substeps
};

/// Stepper for the averaged equation: exact linear half-step, classical RK4
/// on the nonlocal nonlinear part, linear half-step.
struct AvgStepperConfig {
  Real dt = 1.0 / 800;
  Real d_av = 0;
  Real alpha = 2;
  Quadrature quadrature;
  Real h1_cap_factor = 1e3;
  bool dealias = false;
};

/// Sampled solution in the averaging frame plus per-sample diagnostics.
struct Trajectory {
  std::vector<Real> times;
  std::vector<ComplexField> fields;
  std::vector<Real> mass_values;
  std::vector<Real> h1_values;
  std::vector<Real> energy_values;

  bool blew_up = false;
  Real last_good_time = 0;
  Real wall_seconds = 0;
  Real epsilon = 0;  // 0 for averaged / unmanaged runs
  Real max_boundary_amplitude = 0;  // sup |v| near the torus edge / sup |v|, monitored
  std::string config_hash;

  int size() const { return static_cast<int>(times.size()); }
};

/// Exact linear flow of i u_t + d(t) u_xx = 0 over [t0, t1]; the interval
/// must not contain a breakpoint. Mass is preserved exactly.
ComplexField dm_linear_substep(const ComplexField& u, Real t0, Real t1, const DispersionMap& map);

/// Exact nonlinear flow of i u_t + |u|^alpha u = 0: pointwise phase rotation
/// u -> e^{i |u|^alpha dt} u; moduli are preserved exactly.
ComplexField dm_nonlinear_substep(const ComplexField& u, Real dt, Real alpha);

/// One Strang step linear(dt/2) . nonlinear(dt) . linear(dt/2) over
/// [t, t+dt]; the interval must not contain a breakpoint.
ComplexField dm_step(const ComplexField& u, Real t, Real dt, const DmStepperConfig& cfg);

/// Frame change v = T_{-D(t/eps)} u and its inverse u = T_{D(t/eps)} v.
/// At t = 2 k eps both are the identity.
ComplexField to_averaging_frame(const ComplexField& u, Real t, const DispersionMap& map);
ComplexField from_averaging_frame(const ComplexField& v, Real t, const DispersionMap& map);

/// Right side of the nonlinear part of the averaged equation, i <Q>(v).
ComplexField avg_rhs(const ComplexField& v, Real alpha, const Quadrature& quad);

/// One Strang step of the averaged equation over [t, t+dt].
ComplexField avg_step(const ComplexField& v, Real t, Real dt, const AvgStepperConfig& cfg);

/// Output grid 0, M/n, 2M/n, ..., M (signed horizons allowed).
std::vector<Real> uniform_times(Real horizon, int n_out);

/// Advance the managed equation from phi at t = 0 and record the averaging
/// frame v = T_{-D(t/eps)} u at each output time. Output times must run
/// monotonically from 0 towards the horizon. On blow-up the partial
/// trajectory is returned with the flag set.
Trajectory evolve_dm(const ComplexField& phi, const DmStepperConfig& cfg, Real horizon,
                     const std::vector<Real>& output_times, const Quadrature& diag_quad);

/// Advance the averaged equation from phi and record it at the output times.
Trajectory evolve_avg(const ComplexField& phi, const AvgStepperConfig& cfg, Real horizon,
                      const std::vector<Real>& output_times);

/// Reference run with constant dispersion d(t) = d_av (management switched
/// off); used by the supercritical contrast study.
Trajectory evolve_constant_dispersion(const ComplexField& phi, Real d_av, Real alpha, Real dt, Real horizon,
                                      const std::vector<Real>& output_times, const Quadrature& diag_quad,
                                      Real h1_cap_factor = 1e3);

namespace detail {
/// Advance u in the u-frame from t_from to t_to (either direction), splitting
/// at breakpoints and stepping uniformly with |dt| <= eps/n_sub. Exposed for
/// the time-reversal tests.
ComplexField advance_dm(const ComplexField& u, Real t_from, Real t_to, const DmStepperConfig& cfg);
}  // namespace detail

}  // namespace dmnls
