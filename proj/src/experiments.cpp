#include "dmnls/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "dmnls/ensemble.hpp"
#include "dmnls/fft.hpp"

namespace dmnls {

namespace {

template <class F>
void parallel_for(int n, int workers, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  const int n_threads = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n_threads);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i; (i = next.fetch_add(1)) < n;) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

Real h1_diff(const ComplexField& a, const ComplexField& b) {
  ComplexField d{a.grid, a.values - b.values, a.time};
  return sobolev_norm(d, 1);
}

}  // namespace

std::string validate_study_config(const StudyConfig& cfg) {
  if (!(cfg.alpha > 0)) throw std::invalid_argument("physics.alpha must be positive");
  if (!std::isfinite(cfg.d_av)) throw std::invalid_argument("physics.d_av must be finite");
  if (!(cfg.horizon > 0)) throw std::invalid_argument("study.M must be positive");
  if (cfg.epsilons.empty()) throw std::invalid_argument("study.epsilons must be non-empty");
  for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0)) throw std::invalid_argument("study.epsilons must be positive");
    if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1]))
      throw std::invalid_argument("study.epsilons must be strictly descending");
  }
  if (cfg.n_sub < 4) throw std::invalid_argument("stepper.n_sub must be >= 4");
  if (!(cfg.avg_dt > 0)) throw std::invalid_argument("stepper.avg_dt must be positive");
  if (!(cfg.h1_cap_factor > 1)) throw std::invalid_argument("stepper.h1_cap_factor must exceed 1");
  if (cfg.n_out < 4) throw std::invalid_argument("study.n_out must be >= 4");
  if (cfg.trials < 1) throw std::invalid_argument("study.trials must be >= 1");
  make_grid(cfg.half_width, cfg.num_points);                // validates grid section
  study_quadrature(cfg);                                    // validates quadrature section
  if (cfg.alpha < 2) return "alpha < 2: outside the averaging-theorem hypothesis (alpha >= 2); "
                            "convergence runs are exploratory";
  return {};
}

GridPtr study_grid(const StudyConfig& cfg) { return make_grid(cfg.half_width, cfg.num_points); }

Quadrature study_quadrature(const StudyConfig& cfg) { return make_quadrature(cfg.quad_kind, cfg.n_r); }

DmStepperConfig dm_config(const StudyConfig& cfg, Real epsilon) {
  DmStepperConfig c;
  c.map = make_dispersion_map(cfg.d_av, epsilon);
  c.alpha = cfg.alpha;
  c.n_sub = cfg.n_sub;
  c.h1_cap_factor = cfg.h1_cap_factor;
  c.dealias = cfg.dealias;
  return c;
}

AvgStepperConfig avg_config(const StudyConfig& cfg) {
  AvgStepperConfig c;
  c.dt = cfg.avg_dt;
  c.d_av = cfg.d_av;
  c.alpha = cfg.alpha;
  c.quadrature = study_quadrature(cfg);
  c.h1_cap_factor = cfg.h1_cap_factor;
  c.dealias = cfg.dealias;
  return c;
}

// ---------------------------------------------------------------------------
// Convergence study
// ---------------------------------------------------------------------------

OrderFit estimate_order(const std::vector<ConvergenceRecord>& records) {
  std::vector<Real> x, y;
  for (const auto& r : records)
    if (!r.blew_up && r.sup_h1_error > 0) {
      x.push_back(std::log(r.epsilon));
      y.push_back(std::log(r.sup_h1_error));
    }
  const int n = static_cast<int>(x.size());
  if (n < 3) throw std::invalid_argument("estimate_order: need at least 3 usable records");
  Real xm = 0, ym = 0;
  for (int i = 0; i < n; ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= n;
  ym /= n;
  Real sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - xm) * (x[i] - xm);
    sxy += (x[i] - xm) * (y[i] - ym);
  }
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ym - fit.slope * xm;
  Real ss = 0;
  for (int i = 0; i < n; ++i) {
    const Real r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

ConvergenceStudy convergence_study(const StudyConfig& cfg, int workers) {
  validate_study_config(cfg);
  const GridPtr grid = study_grid(cfg);
  const ComplexField phi = sample_initial_datum(cfg.initial, grid);
  const std::vector<Real> times = uniform_times(cfg.horizon, cfg.n_out);
  const Quadrature quad = study_quadrature(cfg);

  AvgStepperConfig acfg = avg_config(cfg);
  Trajectory ref_coarse = evolve_avg(phi, acfg, cfg.horizon, times);
  acfg.dt /= 2;
  Trajectory ref_fine = evolve_avg(phi, acfg, cfg.horizon, times);
  if (ref_coarse.blew_up || ref_fine.blew_up)
    throw NumericalError("convergence_study: averaged reference run tripped the blow-up guard");

  ConvergenceStudy study;
  study.reference_error_estimate = 0;
  for (int k = 0; k < ref_fine.size(); ++k)
    study.reference_error_estimate =
        std::max(study.reference_error_estimate, h1_diff(ref_fine.fields[k], ref_coarse.fields[k]));

  const int n_eps = static_cast<int>(cfg.epsilons.size());
  study.records.resize(n_eps);
  parallel_for(n_eps, workers, [&](int i) {
    const Real eps = cfg.epsilons[i];
    Trajectory traj = evolve_dm(phi, dm_config(cfg, eps), cfg.horizon, times, quad);
    ConvergenceRecord rec;
    rec.epsilon = eps;
    rec.blew_up = traj.blew_up;
    rec.wall_time_seconds = traj.wall_seconds;
    const int n = std::min(traj.size(), ref_fine.size());
    for (int k = 0; k < n; ++k) {
      rec.sup_h1_error = std::max(rec.sup_h1_error, h1_diff(traj.fields[k], ref_fine.fields[k]));
      ComplexField d{grid, traj.fields[k].values - ref_fine.fields[k].values, times[k]};
      rec.sup_l2_error = std::max(rec.sup_l2_error, sobolev_norm(d, 0));
      if (traj.mass_values[0] > 0)
        rec.mass_drift =
            std::max(rec.mass_drift, std::abs(traj.mass_values[k] - traj.mass_values[0]) / traj.mass_values[0]);
    }
    study.records[i] = rec;
  });

  Real min_error = std::numeric_limits<Real>::infinity();
  for (const auto& r : study.records)
    if (!r.blew_up) min_error = std::min(min_error, r.sup_h1_error);

  // Resolution gate: the reference must sit well below the gaps it measures.
  // Degenerate data (single modes) have no averaging gap at all; those runs
  // report scheme-level errors and are exempt.
  if (std::isfinite(min_error) && min_error > 1e-8 && study.reference_error_estimate >= 0.01 * min_error)
    throw NumericalError("convergence_study: resolution failure, reference error estimate " +
                         std::to_string(study.reference_error_estimate) + " is not below 1% of the smallest error " +
                         std::to_string(min_error) + "; refine stepper.avg_dt");

  int usable = 0;
  for (const auto& r : study.records)
    if (!r.blew_up && r.sup_h1_error > 0) ++usable;
  if (usable >= 3) study.fit = estimate_order(study.records);
  study.reference = std::move(ref_fine);
  return study;
}

// ---------------------------------------------------------------------------
// Oscillatory residual
// ---------------------------------------------------------------------------

namespace {

/// Local cubic (4-point Lagrange) interpolation of the stored fields.
class TrajectoryInterpolant {
 public:
  explicit TrajectoryInterpolant(const Trajectory& traj) : traj_(traj) {}

  ComplexVector operator()(Real s) const {
    const auto& t = traj_.times;
    const int n = traj_.size();
    int hi = static_cast<int>(std::upper_bound(t.begin(), t.end(), s) - t.begin());
    int i0 = std::clamp(hi - 2, 0, n - 4);
    ComplexVector out = ComplexVector::Zero(traj_.fields[0].values.size());
    for (int a = 0; a < 4; ++a) {
      Real w = 1;
      for (int b = 0; b < 4; ++b)
        if (b != a) w *= (s - t[i0 + b]) / (t[i0 + a] - t[i0 + b]);
      out += w * traj_.fields[i0 + a].values;
    }
    return out;
  }

 private:
  const Trajectory& traj_;
};

}  // namespace

Real oscillatory_residual(const Trajectory& v_traj, Real epsilon, Real alpha, Real d_av, const Quadrature& quad) {
  if (v_traj.size() < 4) throw std::invalid_argument("oscillatory_residual: trajectory too short");
  if (v_traj.times.front() != 0) throw std::invalid_argument("oscillatory_residual: trajectory must start at 0");
  if (!(epsilon > 0)) throw std::invalid_argument("oscillatory_residual: epsilon must be positive");
  Real max_spacing = 0;
  for (int k = 1; k < v_traj.size(); ++k) {
    const Real spacing = v_traj.times[k] - v_traj.times[k - 1];
    if (!(spacing > 0))
      throw std::invalid_argument("oscillatory_residual: trajectory times must be strictly increasing");
    max_spacing = std::max(max_spacing, spacing);
  }
  if (max_spacing > 2 * epsilon / 8 * (1 + 1e-9))
    throw std::invalid_argument("oscillatory_residual: trajectory under-sampled, need >= 8 samples per fast period");

  const SpatialGrid& g = *v_traj.fields.front().grid;
  const detail::FramePhases phases(g, quad);
  const TrajectoryInterpolant v_at(v_traj);
  const Real horizon = v_traj.times.back();

  // e^{i d_av (t-s) dxx} is unitary in t, so the sup equals
  // sup_t || int_0^t e^{-i d_av s dxx} [Q(s/eps, v(s)) - <Q>(v(s))] ds ||_H1.
  const auto integrand_hat = [&](Real s) {
    const ComplexVector v_hat = detail::forward_unitary(v_at(s));
    const Real r = d0_antiderivative(s / epsilon);
    ComplexVector work(g.num_points);
    for (int m = 0; m < g.num_points; ++m) work[m] = v_hat[m] * std::polar(Real(1), -g.xi_sq[m] * r);
    ComplexVector frame = detail::inverse_unitary(work);
    detail::power_nl_inplace(frame, alpha);
    work = detail::forward_unitary(frame);
    ComplexVector q_hat(g.num_points);
    for (int m = 0; m < g.num_points; ++m) q_hat[m] = work[m] * std::polar(Real(1), g.xi_sq[m] * r);
    q_hat -= detail::averaged_nl_spectrum(g, v_hat, alpha, quad, phases);
    for (int m = 0; m < g.num_points; ++m) q_hat[m] *= std::polar(Real(1), g.xi_sq[m] * d_av * s);
    return q_hat;
  };

  // Composite Simpson on panels of width <= eps/4, split at the breakpoints
  // s = k*eps so every panel sees a smooth integrand.
  std::vector<Real> mesh{0};
  for (Real b : breakpoints_in(0, horizon, epsilon)) mesh.push_back(b);
  if (mesh.back() < horizon) mesh.push_back(horizon);

  ComplexVector acc = ComplexVector::Zero(g.num_points);
  Real sup = 0;
  ComplexVector left = integrand_hat(0);
  for (size_t c = 0; c + 1 < mesh.size(); ++c) {
    const int panels = std::max(1, static_cast<int>(std::ceil((mesh[c + 1] - mesh[c]) / (epsilon / 4) - 1e-9)));
    const Real h = (mesh[c + 1] - mesh[c]) / panels;
    for (int p = 0; p < panels; ++p) {
      const Real a = mesh[c] + p * h;
      const ComplexVector mid = integrand_hat(a + h / 2);
      const ComplexVector right = integrand_hat(a + h);
      acc += (h / 6) * (left + 4 * mid + right);
      sup = std::max(sup, detail::sobolev_norm_spectrum(g, acc, 1));
      left = right;
    }
  }
  return sup;
}

// ---------------------------------------------------------------------------
// Lemma-bound ensembles
// ---------------------------------------------------------------------------

namespace {

struct RatioAccumulator {
  std::vector<Real> values;
  Real max_ratio = 0;
  std::string worst;

  void add(Real r, const std::string& descriptor) {
    values.push_back(r);
    if (r > max_ratio) {
      max_ratio = r;
      worst = descriptor;
    }
  }

  RatioStats finalize() {
    RatioStats s;
    s.evaluated = true;
    s.max_ratio = max_ratio;
    s.worst_case = worst;
    if (!values.empty()) {
      std::vector<Real> v = values;
      const size_t mid = v.size() / 2;
      std::nth_element(v.begin(), v.begin() + mid, v.end());
      s.median_ratio = v[mid];
    }
    return s;
  }
};

}  // namespace

EnsembleReport lemma_bound_suite(Real alpha, int trials, std::uint64_t seed, const GridPtr& grid) {
  if (!(alpha > 0)) throw std::invalid_argument("lemma_bound_suite: alpha must be positive");
  if (trials < 100) throw std::invalid_argument("lemma_bound_suite: need at least 100 trials");

  EnsembleReport report;
  report.trials = trials;
  report.seed = seed;
  const Quadrature quad = make_quadrature(QuadratureKind::gauss_legendre, 24);
  std::mt19937_64 rng(seed);

  RatioAccumulator conj_acc, avg_acc, d2_acc, lip_acc;
  const bool do_h3 = alpha >= 2;
  const bool do_lip = alpha >= 1;

  for (int trial = 0; trial < trials; ++trial) {
    const ComplexField f = random_bump_field(rng, grid);
    const Real s = detail::uniform(rng, 0, 2);
    const Real h1 = sobolev_norm(f, 1);
    std::ostringstream tag;
    tag << "trial " << trial << " (H1=" << h1 << ", s=" << s << ")";

    const ComplexField qf = conjugated_nl(s, f, alpha);
    conj_acc.add(sobolev_norm(qf, 1) / std::pow(h1, alpha + 1), tag.str());
    avg_acc.add(sobolev_norm(averaged_nl(f, alpha, quad), 1) / std::pow(h1, alpha + 1), tag.str());

    if (do_h3) {
      ComplexVector q_hat = detail::forward_unitary(qf.values);
      for (int m = 0; m < grid->num_points; ++m) q_hat[m] *= -grid->xi_sq[m];
      const Real num = detail::sobolev_norm_spectrum(*grid, q_hat, 1);
      d2_acc.add(num / std::pow(sobolev_norm(f, 3), alpha + 1), tag.str());
    }
    if (do_lip) {
      const ComplexField g2 = random_bump_field(rng, grid);
      const Real h1g = sobolev_norm(g2, 1);
      ComplexField diff{grid, f.values - g2.values, 0};
      const Real denom = (std::pow(h1, alpha) + std::pow(h1g, alpha)) * sobolev_norm(diff, 1);
      ComplexField qdiff{grid, qf.values - conjugated_nl(s, g2, alpha).values, 0};
      lip_acc.add(sobolev_norm(qdiff, 1) / denom, tag.str());
    }
  }

  report.conjugated_h1 = conj_acc.finalize();
  report.averaged_h1 = avg_acc.finalize();
  if (do_h3) {
    report.second_deriv_h3 = d2_acc.finalize();
  } else {
    report.second_deriv_h3.skip_reason = "H^3 bound suite needs alpha >= 2";
  }
  if (do_lip) {
    report.lipschitz = lip_acc.finalize();
  } else {
    report.lipschitz.skip_reason = "Lipschitz suite needs alpha >= 1";
  }

  // Exact positive-homogeneity of degree alpha+1, on a single mode.
  {
    const Real k = 3 * kPi / grid->half_width;
    const ComplexField f = sample_initial_datum(SingleModeSpec{0.8, k}, grid);
    ComplexField lf = f;
    const Real lambda = 1.7;
    lf.values *= lambda;
    const Real a = sobolev_norm(conjugated_nl(0.37, lf, alpha), 1);
    const Real b = std::pow(lambda, alpha + 1) * sobolev_norm(conjugated_nl(0.37, f, alpha), 1);
    report.homogeneity_rel_error = std::abs(a - b) / b;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Uniform bound and supercritical exploration
// ---------------------------------------------------------------------------

UniformBoundReport uniform_bound_check(const std::vector<Trajectory>& trajectories, Real K) {
  if (trajectories.empty()) throw std::invalid_argument("uniform_bound_check: no trajectories");
  if (!(K > 0)) throw std::invalid_argument("uniform_bound_check: K must be positive");
  const ComplexField& phi = trajectories.front().fields.front();
  for (const auto& traj : trajectories) {
    if (traj.size() == 0) throw std::invalid_argument("uniform_bound_check: empty trajectory");
    const ComplexField& p = traj.fields.front();
    if ((p.values - phi.values).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("uniform_bound_check: trajectories do not share the initial datum");
  }
  if (sobolev_norm(phi, 1) > K * (1 + 1e-12))
    throw std::invalid_argument("uniform_bound_check: ||phi||_H1 exceeds K");

  UniformBoundReport rep;
  rep.bound = 2 * K;
  for (const auto& traj : trajectories)
    for (int k = 0; k < traj.size(); ++k)
      if (traj.h1_values[k] > rep.max_h1) {
        rep.max_h1 = traj.h1_values[k];
        rep.worst_epsilon = traj.epsilon;
        rep.worst_time = traj.times[k];
      }
  rep.margin = rep.bound - rep.max_h1;
  rep.holds = rep.max_h1 <= rep.bound;
  return rep;
}

SupercriticalReport supercritical_exploration(const StudyConfig& cfg, int workers) {
  if (!(cfg.d_av > 0)) throw std::invalid_argument("supercritical_exploration: needs d_av > 0");
  if (!(cfg.alpha >= 4 && cfg.alpha < 8))
    throw std::invalid_argument("supercritical_exploration: needs 4 <= alpha < 8");
  validate_study_config(cfg);

  const GridPtr grid = study_grid(cfg);
  const ComplexField phi = sample_initial_datum(cfg.initial, grid);
  const std::vector<Real> times = uniform_times(cfg.horizon, cfg.n_out);
  const Quadrature quad = study_quadrature(cfg);

  SupercriticalReport report;
  const Trajectory ref = evolve_avg(phi, avg_config(cfg), cfg.horizon, times);
  report.reference_completed = !ref.blew_up;
  report.reference_terminal_h1 = ref.h1_values.back();

  const int n_eps = static_cast<int>(cfg.epsilons.size());
  report.rows.resize(n_eps);
  parallel_for(n_eps, workers, [&](int i) {
    const Real eps = cfg.epsilons[i];
    Trajectory traj = evolve_dm(phi, dm_config(cfg, eps), cfg.horizon, times, quad);
    SupercriticalRow row;
    row.epsilon = eps;
    row.completed = !traj.blew_up;
    for (Real h : traj.h1_values) row.max_h1 = std::max(row.max_h1, h);
    row.terminal_h1 = traj.h1_values.back();
    row.ratio_to_reference =
        report.reference_completed && report.reference_terminal_h1 > 0 && row.completed
            ? row.terminal_h1 / report.reference_terminal_h1
            : std::numeric_limits<Real>::quiet_NaN();
    report.rows[i] = row;
  });

  Trajectory contrast =
      evolve_constant_dispersion(phi, cfg.d_av, cfg.alpha, cfg.avg_dt, cfg.horizon, times, quad, cfg.h1_cap_factor);
  report.contrast_completed = !contrast.blew_up;
  for (Real h : contrast.h1_values) report.contrast_max_h1 = std::max(report.contrast_max_h1, h);
  return report;
}

}  // namespace dmnls
