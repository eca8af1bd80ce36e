#include "dmnls/integrators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dmnls/fft.hpp"

namespace dmnls {

namespace {

void require_no_breakpoint(Real t0, Real t1, const DispersionMap& map, const char* who) {
  const auto [lo, hi] = std::minmax(t0, t1);
  if (hi - lo <= 0) return;
  if (!breakpoints_in(lo, hi, map.epsilon).empty())
    throw std::invalid_argument(std::string(who) + ": step straddles a breakpoint t = k*epsilon");
}

// 2/3-rule spectral filter, in place on coefficients.
void dealias_inplace(const SpatialGrid& g, ComplexVector& coeffs) {
  const Real cutoff = 2.0 / 3.0 * g.max_wavenumber();
  for (int m = 0; m < g.num_points; ++m)
    if (std::abs(g.xi[m]) > cutoff) coeffs[m] = Complex(0);
}

void nonlinear_phase_inplace(ComplexVector& v, Real dt, Real alpha) {
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const Real a = std::abs(v[j]);
    if (a != 0) v[j] *= std::polar(Real(1), detail::abs_pow(a, alpha) * dt);
  }
}

struct CellStepResult {
  Real h1 = 0;
  bool finite = true;
};

// March u across the breakpoint-free cell [c0, c1] with n uniform Strang
// steps, merging adjacent linear half-steps. Works in place on values;
// reports the H^1 norm from the final spectrum.
CellStepResult step_cell(const SpatialGrid& g, ComplexVector& u, Real c0, Real c1, int n,
                         const DispersionMap& map, Real alpha, bool dealias) {
  const Real h = (c1 - c0) / n;
  ComplexVector c = detail::forward_unitary(u);
  detail::free_phase_inplace(g, c, integrated_dispersion(c0, c0 + h / 2, map));
  for (int i = 0; i < n; ++i) {
    u = detail::inverse_unitary(c);
    nonlinear_phase_inplace(u, h, alpha);
    c = detail::forward_unitary(u);
    if (dealias) dealias_inplace(g, c);
    const Real a = c0 + (i + Real(0.5)) * h;
    const Real b = i + 1 < n ? a + h : c1;
    detail::free_phase_inplace(g, c, integrated_dispersion(a, b, map));
  }
  CellStepResult res;
  res.finite = c.allFinite();
  res.h1 = res.finite ? detail::sobolev_norm_spectrum(g, c, 1) : std::numeric_limits<Real>::infinity();
  u = detail::inverse_unitary(c);
  return res;
}

std::vector<Real> cell_boundaries(Real t_from, Real t_to, Real epsilon) {
  std::vector<Real> pts;
  pts.push_back(t_from);
  if (t_to > t_from) {
    auto bp = breakpoints_in(t_from, t_to, epsilon);
    pts.insert(pts.end(), bp.begin(), bp.end());
  } else {
    auto bp = breakpoints_in(t_to, t_from, epsilon);
    pts.insert(pts.end(), bp.rbegin(), bp.rend());
  }
  pts.push_back(t_to);
  return pts;
}

void record_sample(Trajectory& traj, const ComplexField& v, Real t, Real alpha, Real d_av,
                   const Quadrature& diag_quad) {
  const SpatialGrid& g = *v.grid;
  traj.times.push_back(t);
  traj.fields.push_back(v);
  traj.mass_values.push_back(mass(v));
  traj.h1_values.push_back(sobolev_norm(v, 1));
  traj.energy_values.push_back(averaged_energy(v, alpha, d_av, diag_quad));

  // Torus-truncation monitor: field amplitude in the outer 1% of cells.
  const int edge = std::max(1, g.num_points / 100);
  Real edge_amp = 0, peak = 0;
  for (int j = 0; j < g.num_points; ++j) {
    const Real a = std::abs(v.values[j]);
    peak = std::max(peak, a);
    if (j < edge || j >= g.num_points - edge) edge_amp = std::max(edge_amp, a);
  }
  if (peak > 0) traj.max_boundary_amplitude = std::max(traj.max_boundary_amplitude, edge_amp / peak);
}

void validate_output_times(const std::vector<Real>& times, Real horizon) {
  if (times.empty()) throw std::invalid_argument("evolve: no output times");
  if (times.front() != 0) throw std::invalid_argument("evolve: first output time must be 0");
  const Real dir = horizon >= 0 ? 1 : -1;
  for (size_t k = 0; k + 1 < times.size(); ++k)
    if (dir * (times[k + 1] - times[k]) <= 0)
      throw std::invalid_argument("evolve: output times must be strictly monotone towards the horizon");
  for (Real t : times)
    if (dir * t < 0 || dir * t > dir * horizon + 1e-12 * std::max(Real(1), std::abs(horizon)))
      throw std::invalid_argument("evolve: output times must lie between 0 and the horizon");
}

}  // namespace

ComplexField dm_linear_substep(const ComplexField& u, Real t0, Real t1, const DispersionMap& map) {
  require_no_breakpoint(t0, t1, map, "dm_linear_substep");
  ComplexVector c = detail::forward_unitary(u.values);
  detail::free_phase_inplace(*u.grid, c, integrated_dispersion(t0, t1, map));
  return ComplexField{u.grid, detail::inverse_unitary(c), u.time};
}

ComplexField dm_nonlinear_substep(const ComplexField& u, Real dt, Real alpha) {
  if (!std::isfinite(dt)) throw std::invalid_argument("dm_nonlinear_substep: non-finite dt");
  ComplexField out = u;
  nonlinear_phase_inplace(out.values, dt, alpha);
  return out;
}

ComplexField dm_step(const ComplexField& u, Real t, Real dt, const DmStepperConfig& cfg) {
  require_no_breakpoint(t, t + dt, cfg.map, "dm_step");
  ComplexField w = dm_linear_substep(u, t, t + dt / 2, cfg.map);
  w = dm_nonlinear_substep(w, dt, cfg.alpha);
  if (cfg.dealias) {
    ComplexVector c = detail::forward_unitary(w.values);
    dealias_inplace(*w.grid, c);
    w.values = detail::inverse_unitary(c);
  }
  w = dm_linear_substep(w, t + dt / 2, t + dt, cfg.map);
  w.time = u.time + dt;
  return w;
}

ComplexField to_averaging_frame(const ComplexField& u, Real t, const DispersionMap& map) {
  ComplexField v = free_propagate(u, -d0_antiderivative(t / map.epsilon));
  v.time = t;
  return v;
}

ComplexField from_averaging_frame(const ComplexField& v, Real t, const DispersionMap& map) {
  ComplexField u = free_propagate(v, d0_antiderivative(t / map.epsilon));
  u.time = t;
  return u;
}

ComplexField avg_rhs(const ComplexField& v, Real alpha, const Quadrature& quad) {
  ComplexField out = averaged_nl(v, alpha, quad);
  out.values *= Complex(0, 1);
  return out;
}

namespace detail {

ComplexField advance_dm(const ComplexField& u, Real t_from, Real t_to, const DmStepperConfig& cfg) {
  if (cfg.n_sub < 4) throw std::invalid_argument("dm stepper: n_sub must be >= 4");
  ComplexField out = u;
  if (t_to == t_from) return out;
  const Real h_target = cfg.map.epsilon / cfg.n_sub;
  const auto cells = cell_boundaries(t_from, t_to, cfg.map.epsilon);
  for (size_t i = 0; i + 1 < cells.size(); ++i) {
    const Real a = cells[i], b = cells[i + 1];
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / h_target - 1e-9)));
    step_cell(*out.grid, out.values, a, b, n, cfg.map, cfg.alpha, cfg.dealias);
  }
  out.time = t_to;
  return out;
}

}  // namespace detail

std::vector<Real> uniform_times(Real horizon, int n_out) {
  if (n_out < 1) throw std::invalid_argument("uniform_times: need n_out >= 1");
  if (horizon == 0) return {0};
  std::vector<Real> t(n_out + 1);
  for (int k = 0; k <= n_out; ++k) t[k] = horizon * k / n_out;
  return t;
}

Trajectory evolve_dm(const ComplexField& phi, const DmStepperConfig& cfg, Real horizon,
                     const std::vector<Real>& output_times, const Quadrature& diag_quad) {
  if (cfg.n_sub < 4) throw std::invalid_argument("evolve_dm: n_sub must be >= 4");
  validate_output_times(output_times, horizon);
  const auto t_start = std::chrono::steady_clock::now();

  Trajectory traj;
  traj.epsilon = cfg.map.epsilon;
  const Real cap = cfg.h1_cap_factor * std::max(sobolev_norm(phi, 1), Real(1e-30));
  const Real h_target = cfg.map.epsilon / cfg.n_sub;

  ComplexField u = phi;
  record_sample(traj, to_averaging_frame(u, 0, cfg.map), 0, cfg.alpha, cfg.map.d_av, diag_quad);
  traj.last_good_time = 0;

  for (size_t k = 1; k < output_times.size() && !traj.blew_up; ++k) {
    const Real t0 = output_times[k - 1], t1 = output_times[k];
    const auto cells = cell_boundaries(t0, t1, cfg.map.epsilon);
    for (size_t i = 0; i + 1 < cells.size(); ++i) {
      const Real a = cells[i], b = cells[i + 1];
      const int n = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / h_target - 1e-9)));
      const auto res = step_cell(*u.grid, u.values, a, b, n, cfg.map, cfg.alpha, cfg.dealias);
      if (!res.finite || res.h1 > cap) {
        traj.blew_up = true;
        break;
      }
      traj.last_good_time = b;
    }
    if (!traj.blew_up) {
      u.time = t1;
      record_sample(traj, to_averaging_frame(u, t1, cfg.map), t1, cfg.alpha, cfg.map.d_av, diag_quad);
    }
  }

  traj.wall_seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t_start).count();
  return traj;
}

Trajectory evolve_avg(const ComplexField& phi, const AvgStepperConfig& cfg, Real horizon,
                      const std::vector<Real>& output_times) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("evolve_avg: dt must be positive");
  validate_output_times(output_times, horizon);
  const auto t_start = std::chrono::steady_clock::now();

  const SpatialGrid& g = *phi.grid;
  const detail::FramePhases phases(g, cfg.quadrature);
  const Real cap = cfg.h1_cap_factor * std::max(sobolev_norm(phi, 1), Real(1e-30));

  Trajectory traj;
  record_sample(traj, phi, 0, cfg.alpha, cfg.d_av, cfg.quadrature);
  traj.last_good_time = 0;

  const Complex iunit(0, 1);
  ComplexVector v_hat = detail::forward_unitary(phi.values);
  ComplexVector stage, k1, k2, k3, k4;

  // Cache the linear half-step multiplier; it changes only with h.
  Real cached_h = std::numeric_limits<Real>::quiet_NaN();
  ComplexVector half_linear(g.num_points);
  const auto set_half_linear = [&](Real h) {
    if (h == cached_h) return;
    cached_h = h;
    for (int m = 0; m < g.num_points; ++m) half_linear[m] = std::polar(Real(1), -g.xi_sq[m] * cfg.d_av * h / 2);
  };
  const auto rhs = [&](const ComplexVector& w_hat) {
    return ComplexVector(iunit * detail::averaged_nl_spectrum(g, w_hat, cfg.alpha, cfg.quadrature, phases));
  };

  for (size_t k = 1; k < output_times.size() && !traj.blew_up; ++k) {
    const Real t0 = output_times[k - 1], t1 = output_times[k];
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / cfg.dt - 1e-9)));
    const Real h = (t1 - t0) / n;
    set_half_linear(h);
    for (int i = 0; i < n && !traj.blew_up; ++i) {
      v_hat.array() *= half_linear.array();
      k1 = rhs(v_hat);
      stage = v_hat + (h / 2) * k1;
      k2 = rhs(stage);
      stage = v_hat + (h / 2) * k2;
      k3 = rhs(stage);
      stage = v_hat + h * k3;
      k4 = rhs(stage);
      v_hat += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
      if (cfg.dealias) dealias_inplace(g, v_hat);
      v_hat.array() *= half_linear.array();

      if (!v_hat.allFinite() || detail::sobolev_norm_spectrum(g, v_hat, 1) > cap) {
        traj.blew_up = true;
        break;
      }
      traj.last_good_time = t0 + (i + 1) * h;
    }
    if (!traj.blew_up)
      record_sample(traj, ComplexField{phi.grid, detail::inverse_unitary(v_hat), t1}, t1, cfg.alpha, cfg.d_av,
                    cfg.quadrature);
  }

  traj.wall_seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t_start).count();
  return traj;
}

ComplexField avg_step(const ComplexField& v, Real t, Real dt, const AvgStepperConfig& cfg) {
  AvgStepperConfig one = cfg;
  one.dt = std::abs(dt);
  Trajectory traj = evolve_avg(v, one, dt, std::vector<Real>{0, dt});
  if (traj.blew_up)
    throw NumericalError("avg_step: H^1 guard tripped (last good time " + std::to_string(t + traj.last_good_time) +
                         ")");
  ComplexField out = traj.fields.back();
  out.time = t + dt;
  return out;
}

Trajectory evolve_constant_dispersion(const ComplexField& phi, Real d_av, Real alpha, Real dt, Real horizon,
                                      const std::vector<Real>& output_times, const Quadrature& diag_quad,
                                      Real h1_cap_factor) {
  if (!(dt > 0)) throw std::invalid_argument("evolve_constant_dispersion: dt must be positive");
  validate_output_times(output_times, horizon);
  const auto t_start = std::chrono::steady_clock::now();

  const SpatialGrid& g = *phi.grid;
  Trajectory traj;
  const Real cap = h1_cap_factor * std::max(sobolev_norm(phi, 1), Real(1e-30));
  record_sample(traj, phi, 0, alpha, d_av, diag_quad);
  traj.last_good_time = 0;

  // Same Strang scheme with the fast profile absent: d(t) = d_av.
  ComplexField u = phi;
  for (size_t k = 1; k < output_times.size() && !traj.blew_up; ++k) {
    const Real t0 = output_times[k - 1], t1 = output_times[k];
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0) / dt - 1e-9)));
    const Real h = (t1 - t0) / n;
    ComplexVector c = detail::forward_unitary(u.values);
    detail::free_phase_inplace(g, c, d_av * h / 2);
    for (int i = 0; i < n; ++i) {
      u.values = detail::inverse_unitary(c);
      nonlinear_phase_inplace(u.values, h, alpha);
      c = detail::forward_unitary(u.values);
      detail::free_phase_inplace(g, c, i + 1 < n ? d_av * h : d_av * h / 2);
    }
    if (!c.allFinite() || detail::sobolev_norm_spectrum(g, c, 1) > cap) {
      traj.blew_up = true;
      break;
    }
    u.values = detail::inverse_unitary(c);
    u.time = t1;
    traj.last_good_time = t1;
    record_sample(traj, u, t1, alpha, d_av, diag_quad);
  }

  traj.wall_seconds = std::chrono::duration<Real>(std::chrono::steady_clock::now() - t_start).count();
  return traj;
}

}  // namespace dmnls
