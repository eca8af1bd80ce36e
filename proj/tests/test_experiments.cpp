#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dmnls/ensemble.hpp"
#include "dmnls/experiments.hpp"

using namespace dmnls;

namespace {

const Quadrature kQuad = make_quadrature(QuadratureKind::gauss_legendre, 24);

Real h1_diff(const ComplexField& a, const ComplexField& b) {
  ComplexField d{a.grid, a.values - b.values, 0};
  return sobolev_norm(d, 1);
}

std::vector<ConvergenceRecord> synthetic_records(const std::vector<Real>& eps, Real c, Real power) {
  std::vector<ConvergenceRecord> out;
  for (Real e : eps) {
    ConvergenceRecord r;
    r.epsilon = e;
    r.sup_h1_error = c * std::pow(e, power);
    out.push_back(r);
  }
  return out;
}

StudyConfig small_study(Real alpha, Real d_av) {
  StudyConfig cfg;
  cfg.half_width = 40;
  cfg.num_points = 512;
  cfg.alpha = alpha;
  cfg.d_av = d_av;
  cfg.horizon = 0.5;
  cfg.epsilons = {0.2, 0.1, 0.05};
  cfg.avg_dt = 1.0 / 400;
  cfg.n_out = 20;
  return cfg;
}

}  // namespace

TEST_CASE("order estimation on synthetic data") {
  const std::vector<Real> eps{0.2, 0.1, 0.05, 0.025};
  OrderFit fit = estimate_order(synthetic_records(eps, 0.37, 1));
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);

  fit = estimate_order(synthetic_records(eps, 2.1, 2));
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));

  // multiplicative noise moves the slope less than the allowed window
  std::mt19937_64 rng(41);
  auto noisy = synthetic_records(eps, 0.5, 1);
  for (auto& r : noisy) r.sup_h1_error *= std::exp(0.05 * (2 * detail::uniform01(rng) - 1));
  fit = estimate_order(noisy);
  CHECK(std::abs(fit.slope - 1.0) < 0.2);
  CHECK(fit.residual < 0.1);
}

TEST_CASE("order estimation rejects unusable inputs") {
  const std::vector<Real> eps{0.2, 0.1};
  CHECK_THROWS_AS(estimate_order(synthetic_records(eps, 1, 1)), std::invalid_argument);

  auto records = synthetic_records({0.2, 0.1, 0.05, 0.025}, 1, 1);
  records[1].blew_up = true;
  records[2].sup_h1_error = 0;
  CHECK_THROWS_AS(estimate_order(records), std::invalid_argument);  // only 2 usable left
}

TEST_CASE("oscillatory residual vanishes for single-mode trajectories") {
  const auto g = make_grid(25, 256);
  const ComplexField phi = sample_initial_datum(SingleModeSpec{1.0, kPi / 25 * 4}, g);
  AvgStepperConfig acfg;
  acfg.dt = 1.0 / 200;
  acfg.d_av = 1;
  acfg.alpha = 2;
  acfg.quadrature = kQuad;
  const Trajectory traj = evolve_avg(phi, acfg, 0.5, uniform_times(0.5, 40));
  CHECK(oscillatory_residual(traj, 0.1, 2, 1, kQuad) < 1e-10);
}

TEST_CASE("oscillatory residual enforces fast-period sampling") {
  const auto g = make_grid(25, 256);
  const ComplexField phi = sample_initial_datum(GaussianSpec{}, g);
  AvgStepperConfig acfg;
  acfg.dt = 1.0 / 200;
  acfg.d_av = 1;
  acfg.alpha = 2;
  acfg.quadrature = kQuad;
  const Trajectory coarse = evolve_avg(phi, acfg, 0.5, uniform_times(0.5, 8));  // spacing 1/16 > eps/4
  CHECK_THROWS_AS(oscillatory_residual(coarse, 0.1, 2, 1, kQuad), std::invalid_argument);
}

TEST_CASE("oscillatory residual decays roughly linearly in epsilon") {
  const auto g = make_grid(40, 512);
  const ComplexField phi = sample_initial_datum(GaussianSpec{}, g);
  AvgStepperConfig acfg;
  acfg.dt = 1.0 / 400;
  acfg.d_av = 1;
  acfg.alpha = 2;
  acfg.quadrature = kQuad;
  const Trajectory traj = evolve_avg(phi, acfg, 0.5, uniform_times(0.5, 20));  // spacing 0.025 = 0.1/4
  const Real r1 = oscillatory_residual(traj, 0.2, 2, 1, kQuad);
  const Real r2 = oscillatory_residual(traj, 0.1, 2, 1, kQuad);
  CHECK(r2 < r1);
  CHECK(r2 / r1 > 0.3);
  CHECK(r2 / r1 < 0.7);
}

TEST_CASE("lemma-bound ensemble: ratios, hypotheses, determinism") {
  const auto g = make_grid(50, 512);

  const EnsembleReport full = lemma_bound_suite(2.5, 100, 7, g);
  CHECK(full.trials == 100);
  for (const RatioStats* s : {&full.conjugated_h1, &full.averaged_h1, &full.second_deriv_h3, &full.lipschitz}) {
    CHECK(s->evaluated);
    CHECK(std::isfinite(s->max_ratio));
    CHECK(s->max_ratio > 0);
    CHECK(s->median_ratio > 0);
    CHECK_FALSE(s->worst_case.empty());
  }
  CHECK(full.homogeneity_rel_error < 1e-10);

  const EnsembleReport low = lemma_bound_suite(1.5, 100, 7, g);
  CHECK_FALSE(low.second_deriv_h3.evaluated);
  CHECK(low.second_deriv_h3.skip_reason.find("alpha >= 2") != std::string::npos);
  CHECK(low.lipschitz.evaluated);

  const EnsembleReport sub = lemma_bound_suite(0.5, 100, 7, g);
  CHECK_FALSE(sub.lipschitz.evaluated);
  CHECK_FALSE(sub.second_deriv_h3.evaluated);

  CHECK_THROWS_AS(lemma_bound_suite(2, 50, 7, g), std::invalid_argument);

  const EnsembleReport again = lemma_bound_suite(2.5, 100, 7, g);
  CHECK(again.conjugated_h1.max_ratio == full.conjugated_h1.max_ratio);
  CHECK(again.lipschitz.max_ratio == full.lipschitz.max_ratio);
  const EnsembleReport other = lemma_bound_suite(2.5, 100, 8, g);
  CHECK(other.conjugated_h1.max_ratio != full.conjugated_h1.max_ratio);
}

TEST_CASE("uniform bound check across single-mode trajectories") {
  const auto g = make_grid(25, 256);
  const ComplexField phi = sample_initial_datum(SingleModeSpec{1.0, kPi / 25 * 4}, g);
  const Real K = sobolev_norm(phi, 1);
  std::vector<Trajectory> trajs;
  for (Real eps : {0.2, 0.1}) {
    DmStepperConfig cfg;
    cfg.map = make_dispersion_map(1, eps);
    cfg.alpha = 2;
    trajs.push_back(evolve_dm(phi, cfg, 0.5, uniform_times(0.5, 10), kQuad));
  }
  const UniformBoundReport rep = uniform_bound_check(trajs, K);
  CHECK(rep.holds);
  CHECK(rep.bound == doctest::Approx(2 * K));
  // single-mode norms are constant, so the margin is the full factor of 2
  CHECK(rep.margin == doctest::Approx(K).epsilon(1e-6));

  // violations are localized
  Trajectory bad = trajs[0];
  bad.h1_values[3] = 3 * K;
  bad.epsilon = 0.123;
  const UniformBoundReport viol = uniform_bound_check({bad}, K);
  CHECK_FALSE(viol.holds);
  CHECK(viol.worst_epsilon == doctest::Approx(0.123));
  CHECK(viol.worst_time == doctest::Approx(bad.times[3]));

  Trajectory other = trajs[1];
  other.fields.front().values[0] += Complex(1, 0);
  CHECK_THROWS_AS(uniform_bound_check({trajs[0], other}, K), std::invalid_argument);
  CHECK_THROWS_AS(uniform_bound_check({trajs[0]}, K / 10), std::invalid_argument);
}

TEST_CASE("uniform bound holds across a Gaussian sweep") {
  const auto g = make_grid(40, 512);
  const ComplexField phi = sample_initial_datum(GaussianSpec{}, g);
  const Real K = sobolev_norm(phi, 1);
  std::vector<Trajectory> trajs;
  for (Real eps : {0.2, 0.05}) {
    DmStepperConfig cfg;
    cfg.map = make_dispersion_map(1, eps);
    cfg.alpha = 2;
    trajs.push_back(evolve_dm(phi, cfg, 0.5, uniform_times(0.5, 10), kQuad));
  }
  const UniformBoundReport rep = uniform_bound_check(trajs, K);
  CHECK(rep.holds);
  CHECK(rep.margin > 0);
  CHECK(rep.max_h1 >= K * 0.5);  // sanity: norms stay on the datum's scale
}

TEST_CASE("convergence study on a reduced setting") {
  StudyConfig cfg = small_study(2, 1);
  const ConvergenceStudy study = convergence_study(cfg, 2);
  REQUIRE(study.records.size() == 3);
  for (size_t i = 0; i < study.records.size(); ++i) {
    CHECK(study.records[i].epsilon == cfg.epsilons[i]);
    CHECK_FALSE(study.records[i].blew_up);
    CHECK(study.records[i].wall_time_seconds > 0);
    CHECK(study.records[i].mass_drift < 1e-9);
    if (i) CHECK(study.records[i].sup_h1_error < study.records[i - 1].sup_h1_error);
  }
  REQUIRE(study.fit.has_value());
  CHECK(study.fit->slope > 0.7);
  CHECK(study.fit->slope < 1.3);
  CHECK(study.reference_error_estimate < 0.01 * study.records.back().sup_h1_error);
  CHECK(study.reference.size() == cfg.n_out + 1);
}

TEST_CASE("errors are invariant under a global phase rotation of the datum") {
  const auto g = make_grid(40, 512);
  const std::vector<Real> times = uniform_times(0.5, 10);
  AvgStepperConfig acfg;
  acfg.dt = 1.0 / 400;
  acfg.d_av = 1;
  acfg.alpha = 2;
  acfg.quadrature = kQuad;
  DmStepperConfig dcfg;
  dcfg.map = make_dispersion_map(1, 0.1);
  dcfg.alpha = 2;

  const auto sup_error = [&](const ComplexField& phi) {
    const Trajectory ref = evolve_avg(phi, acfg, 0.5, times);
    const Trajectory dm = evolve_dm(phi, dcfg, 0.5, times, kQuad);
    Real sup = 0;
    for (int s = 0; s < dm.size(); ++s) sup = std::max(sup, h1_diff(dm.fields[s], ref.fields[s]));
    return sup;
  };

  const ComplexField phi = sample_initial_datum(GaussianSpec{}, g);
  ComplexField rotated = phi;
  rotated.values *= std::polar(Real(1), Real(1.9));
  const Real e0 = sup_error(phi), e1 = sup_error(rotated);
  CHECK(std::abs(e0 - e1) < 1e-8 * e0);
}

TEST_CASE("discrete sup over a coarser sample subset never exceeds the full sup") {
  const auto g = make_grid(40, 512);
  const ComplexField phi = sample_initial_datum(GaussianSpec{}, g);
  const std::vector<Real> times = uniform_times(0.5, 20);
  AvgStepperConfig acfg;
  acfg.dt = 1.0 / 400;
  acfg.d_av = 1;
  acfg.alpha = 2;
  acfg.quadrature = kQuad;
  DmStepperConfig dcfg;
  dcfg.map = make_dispersion_map(1, 0.1);
  dcfg.alpha = 2;
  const Trajectory ref = evolve_avg(phi, acfg, 0.5, times);
  const Trajectory dm = evolve_dm(phi, dcfg, 0.5, times, kQuad);
  Real full = 0, strided = 0;
  for (int s = 0; s < dm.size(); ++s) {
    const Real e = h1_diff(dm.fields[s], ref.fields[s]);
    full = std::max(full, e);
    if (s % 2 == 0) strided = std::max(strided, e);
  }
  CHECK(strided <= full);
}

TEST_CASE("single-mode data make the study degenerate at scheme tolerance") {
  StudyConfig cfg = small_study(2, 1);
  cfg.epsilons = {0.2, 0.1};
  cfg.initial = SingleModeSpec{1.0, kPi / 40 * 4};
  const ConvergenceStudy study = convergence_study(cfg, 2);
  for (const auto& r : study.records) CHECK(r.sup_h1_error < 1e-8);
}

TEST_CASE("resolution failure aborts the study") {
  StudyConfig cfg = small_study(2, 1);
  // reference far too coarse for the measured gaps; the sampling interval
  // bounds the effective step, so thin out the output grid as well
  cfg.avg_dt = 0.125;
  cfg.n_out = 4;
  CHECK_THROWS_AS(convergence_study(cfg, 1), NumericalError);
}

TEST_CASE("managed blow-ups are flagged and excluded from the fit") {
  StudyConfig cfg = small_study(5, 1);
  cfg.initial = GaussianSpec{2, 1, 0, 0, 0};
  cfg.h1_cap_factor = 3;  // averaged run peaks near 2.3x, managed runs cross 3x
  cfg.epsilons = {0.4, 0.1, 0.025};
  const ConvergenceStudy study = convergence_study(cfg, 2);
  for (const auto& r : study.records) CHECK(r.blew_up);
  CHECK_FALSE(study.fit.has_value());
}

TEST_CASE("supercritical exploration: hypotheses and a reduced run") {
  StudyConfig cfg = small_study(4.5, 1);
  cfg.horizon = 0.25;
  cfg.epsilons = {0.05};
  cfg.n_out = 10;
  const SupercriticalReport rep = supercritical_exploration(cfg, 1);
  CHECK(rep.reference_completed);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].completed);
  CHECK(rep.rows[0].ratio_to_reference == doctest::Approx(1.0).epsilon(0.1));
  CHECK(rep.contrast_max_h1 > 0);

  StudyConfig bad = small_study(3, 1);
  CHECK_THROWS_AS(supercritical_exploration(bad, 1), std::invalid_argument);
  StudyConfig bad2 = small_study(5, 1);
  bad2.d_av = 0;
  CHECK_THROWS_AS(supercritical_exploration(bad2, 1), std::invalid_argument);
}

TEST_CASE("study config validation") {
  StudyConfig cfg = small_study(2, 1);
  CHECK(validate_study_config(cfg).empty());
  cfg.alpha = 1.5;
  CHECK_FALSE(validate_study_config(cfg).empty());  // warning, not an error

  StudyConfig bad = small_study(2, 1);
  bad.epsilons = {0.1, 0.2};
  CHECK_THROWS_AS(validate_study_config(bad), std::invalid_argument);
  bad = small_study(2, 1);
  bad.epsilons = {0.1, -0.05};
  CHECK_THROWS_AS(validate_study_config(bad), std::invalid_argument);
  bad = small_study(-1, 1);
  CHECK_THROWS_AS(validate_study_config(bad), std::invalid_argument);
  bad = small_study(2, 1);
  bad.horizon = 0;
  CHECK_THROWS_AS(validate_study_config(bad), std::invalid_argument);
  bad = small_study(2, 1);
  bad.n_sub = 2;
  CHECK_THROWS_AS(validate_study_config(bad), std::invalid_argument);
}
