#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dmnls/integrators.hpp"

namespace dmnls {

/// One configuration drives every subcommand; irrelevant sections are
/// simply unused. Defaults match the documented schema.
struct StudyConfig {
  // grid
  Real half_width = 50;
  int num_points = 1024;
  // physics
  Real alpha = 0;  // required
  Real d_av = 0;   // required
  // stepper
  int n_sub = 16;
  Real avg_dt = 1.0 / 800;
  Real h1_cap_factor = 1e3;
  bool dealias = false;
  // quadrature
  QuadratureKind quad_kind = QuadratureKind::gauss_legendre;
  int n_r = 24;
  // study
  Real horizon = 0;  // required (M)
  std::vector<Real> epsilons = {0.2, 0.1, 0.05, 0.025};
  InitialDatumSpec initial = GaussianSpec{};
  int n_out = 80;
  int trials = 200;
  std::uint64_t seed = 42;
};

/// Throws std::invalid_argument on hard constraint violations; returns a
/// non-empty warning for soft ones (convergence mode needs alpha >= 2).
std::string validate_study_config(const StudyConfig& cfg);

GridPtr study_grid(const StudyConfig& cfg);
Quadrature study_quadrature(const StudyConfig& cfg);
DmStepperConfig dm_config(const StudyConfig& cfg, Real epsilon);
AvgStepperConfig avg_config(const StudyConfig& cfg);

// ---------------------------------------------------------------------------
// Averaging convergence
// ---------------------------------------------------------------------------

struct ConvergenceRecord {
  Real epsilon = 0;
  Real sup_h1_error = 0;  // max_k ||v_eps(t_k) - v(t_k)||_{H^1}
  Real sup_l2_error = 0;
  Real mass_drift = 0;  // max_k |m_k - m_0| / m_0
  Real wall_time_seconds = 0;
  bool blew_up = false;
};

struct OrderFit {
  Real slope = 0;
  Real intercept = 0;
  Real residual = 0;  // rms misfit in log-log coordinates
};

struct ConvergenceStudy {
  std::vector<ConvergenceRecord> records;  // epsilon descending
  std::optional<OrderFit> fit;             // absent with < 3 usable records
  Real reference_error_estimate = 0;       // sup H^1 gap between the two reference runs
  Trajectory reference;                    // finer of the two reference runs
};

/// Sweep the epsilon list against one averaged reference run (computed at
/// avg_dt and avg_dt/2; the finer run is the reference and the gap between
/// them the resolution estimate). Aborts with NumericalError when the
/// reference resolution is not below 1% of the smallest measured error.
ConvergenceStudy convergence_study(const StudyConfig& cfg, int workers = 1);

/// Least-squares slope of log(error) vs log(epsilon) over usable records.
OrderFit estimate_order(const std::vector<ConvergenceRecord>& records);

// ---------------------------------------------------------------------------
// Oscillatory residual
// ---------------------------------------------------------------------------

/// sup_t || int_0^t e^{i d_av (t-s) dx^2} [Q(s/eps, v(s)) - <Q>(v(s))] ds ||_H1
/// along a stored averaged trajectory, with v interpolated in time by local
/// cubics. The trajectory must resolve the fast period: sample spacing
/// <= 2*eps/8.
Real oscillatory_residual(const Trajectory& v_traj, Real epsilon, Real alpha, Real d_av, const Quadrature& quad);

// ---------------------------------------------------------------------------
// Lemma-bound ensembles
// ---------------------------------------------------------------------------

struct RatioStats {
  bool evaluated = false;
  std::string skip_reason;
  Real max_ratio = 0;
  Real median_ratio = 0;
  std::string worst_case;  // descriptor of the extremal trial
};

struct EnsembleReport {
  int trials = 0;
  std::uint64_t seed = 0;
  RatioStats conjugated_h1;    // ||Q(s,f)||_H1 / ||f||_H1^{a+1}
  RatioStats averaged_h1;      // ||<Q>(f)||_H1 / ||f||_H1^{a+1}
  RatioStats second_deriv_h3;  // ||dxx Q(s,f)||_H1 / ||f||_H3^{a+1}, alpha >= 2
  RatioStats lipschitz;        // alpha >= 1
  Real homogeneity_rel_error = 0;  // exact single-mode scaling check
};

EnsembleReport lemma_bound_suite(Real alpha, int trials, std::uint64_t seed, const GridPtr& grid);

// ---------------------------------------------------------------------------
// Uniform bound and supercritical exploration
// ---------------------------------------------------------------------------

struct UniformBoundReport {
  bool holds = false;
  Real bound = 0;   // 2K
  Real max_h1 = 0;  // across trajectories and times
  Real margin = 0;  // bound - max_h1
  Real worst_epsilon = 0;
  Real worst_time = 0;
};

/// Checks max_t ||v_eps(t)||_H1 <= 2K across runs sharing the same datum
/// with ||phi||_H1 <= K.
UniformBoundReport uniform_bound_check(const std::vector<Trajectory>& trajectories, Real K);

struct SupercriticalRow {
  Real epsilon = 0;
  bool completed = false;
  Real max_h1 = 0;
  Real terminal_h1 = 0;
  Real ratio_to_reference = 0;  // terminal H1 / averaged terminal H1
};

struct SupercriticalReport {
  std::vector<SupercriticalRow> rows;
  bool reference_completed = false;
  Real reference_terminal_h1 = 0;
  bool contrast_completed = false;  // constant dispersion d = d_av, no management
  Real contrast_max_h1 = 0;
};

/// Global-existence exploration for 4 <= alpha < 8, d_av > 0: does the
/// managed run reach the horizon where the unmanaged one may not?
SupercriticalReport supercritical_exploration(const StudyConfig& cfg, int workers = 1);

}  // namespace dmnls
