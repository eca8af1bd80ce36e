#include "dmnls/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "dmnls/ensemble.hpp"
#include "dmnls/fft.hpp"

namespace dmnls {

namespace {

CheckResult check(const std::string& name, Real value, Real threshold, const std::string& detail = {}) {
  return CheckResult{name, value <= threshold, value, threshold, detail};
}

ComplexField white_field(std::mt19937_64& rng, const GridPtr& grid) {
  ComplexVector v(grid->num_points);
  for (int j = 0; j < grid->num_points; ++j)
    v[j] = Complex(2 * detail::uniform01(rng) - 1, 2 * detail::uniform01(rng) - 1);
  return ComplexField{grid, std::move(v), 0};
}

// Band-limited two-bump datum for the quadrature-identity checks; rough
// ensemble fields would need far richer rules than the identities themselves.
ComplexField smooth_bump_pair(const GridPtr& grid) {
  ComplexVector v(grid->num_points);
  for (int j = 0; j < grid->num_points; ++j) {
    const Real x = grid->x[j];
    v[j] = std::exp(-x * x / 2) * std::polar(Real(1), Real(1.2) * x) +
           Real(0.6) * std::exp(-(x - 3) * (x - 3) / 4) * std::polar(Real(1), -x);
  }
  ComplexField f{grid, std::move(v), 0};
  f.values /= sobolev_norm(f, 1);
  return f;
}

Real h1_diff(const ComplexField& a, const ComplexField& b) {
  ComplexField d{a.grid, a.values - b.values, 0};
  return sobolev_norm(d, 1);
}

}  // namespace

std::vector<CheckResult> run_structural_checks(const GridPtr& grid, Real alpha, std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  const Quadrature quad = make_quadrature(QuadratureKind::gauss_legendre, 24);

  {  // transform round trip on full-spectrum data
    Real worst = 0;
    for (int i = 0; i < 5; ++i) {
      const ComplexField f = white_field(rng, grid);
      const ComplexField g = from_spectrum(to_spectrum(f), grid);
      worst = std::max(worst, (g.values - f.values).cwiseAbs().maxCoeff());
    }
    out.push_back(check("transform_round_trip", worst, 1e-12));
  }

  for (Real s : {Real(0), Real(1), Real(3)}) {  // free-flow unitarity in H^s
    Real worst = 0;
    for (int i = 0; i < 8; ++i) {
      const ComplexField f = random_bump_field(rng, grid);
      const Real t = detail::uniform(rng, -5, 5);
      const Real a = sobolev_norm(free_propagate(f, t), s), b = sobolev_norm(f, s);
      worst = std::max(worst, std::abs(a - b) / b);
    }
    std::ostringstream name;
    name << "free_flow_unitarity_h" << s;
    out.push_back(check(name.str(), worst, 1e-12));
  }

  {  // group law T_{t+s} = T_t T_s
    Real worst = 0;
    for (int i = 0; i < 8; ++i) {
      const ComplexField f = random_bump_field(rng, grid);
      const Real t = detail::uniform(rng, -3, 3), s = detail::uniform(rng, -3, 3);
      const ComplexField a = free_propagate(f, t + s);
      const ComplexField b = free_propagate(free_propagate(f, s), t);
      ComplexField d{grid, a.values - b.values, 0};
      worst = std::max(worst, sobolev_norm(d, 0) / sobolev_norm(f, 0));
    }
    out.push_back(check("free_flow_group_law", worst, 1e-12));
  }

  {  // norm monotonicity L2 <= H1 <= H3
    Real violation = -1;
    for (int i = 0; i < 8; ++i) {
      const ComplexField f = i % 2 ? white_field(rng, grid) : random_bump_field(rng, grid);
      const Real l2 = sobolev_norm(f, 0), h1 = sobolev_norm(f, 1), h3 = sobolev_norm(f, 3);
      violation = std::max({violation, l2 - h1, h1 - h3});
    }
    out.push_back(check("sobolev_norm_monotonicity", violation, 0));
  }

  {  // mean-zero fast profile: integral over a full period is d_av * 2eps
    Real worst = 0;
    for (int i = 0; i < 16; ++i) {
      const DispersionMap map{detail::uniform(rng, -2, 2), detail::uniform(rng, 0.01, 0.5)};
      const Real t = detail::uniform(rng, -4, 4);
      worst = std::max(worst, std::abs(integrated_dispersion(t, t + 2 * map.epsilon, map) - 2 * map.epsilon * map.d_av));
    }
    out.push_back(check("integrated_dispersion_mean_zero", worst, 1e-14));
  }

  {  // additivity of the integrated dispersion
    Real worst = 0;
    for (int i = 0; i < 16; ++i) {
      const DispersionMap map{detail::uniform(rng, -2, 2), detail::uniform(rng, 0.01, 0.5)};
      const Real a = detail::uniform(rng, -3, 3), b = a + detail::uniform(rng, 0, 3), c = b + detail::uniform(rng, 0, 3);
      worst = std::max(worst, std::abs(integrated_dispersion(a, b, map) + integrated_dispersion(b, c, map) -
                                       integrated_dispersion(a, c, map)));
    }
    out.push_back(check("integrated_dispersion_additivity", worst, 1e-14));
  }

  {  // quadrature weight normalization
    const Real a = std::abs(make_quadrature(QuadratureKind::gauss_legendre, 24).weights.sum() - 1);
    const Real b = std::abs(make_quadrature(QuadratureKind::composite_simpson, 25).weights.sum() - 1);
    out.push_back(check("quadrature_weights_sum", std::max(a, b), 1e-14));
  }

  {  // 2-periodicity of the conjugated nonlinearity in s
    Real worst = 0;
    for (int i = 0; i < 6; ++i) {
      const ComplexField f = random_bump_field(rng, grid);
      const Real s = detail::uniform(rng, -3, 3);
      const Real scale = std::pow(sobolev_norm(f, 1), alpha + 1);
      worst = std::max(worst, h1_diff(conjugated_nl(s + 2, f, alpha), conjugated_nl(s, f, alpha)) / scale);
    }
    out.push_back(check("conjugated_nl_periodicity", worst, 1e-12));
  }

  {  // gauge covariance of Q and <Q>
    Real worst = 0;
    for (int i = 0; i < 4; ++i) {
      const ComplexField f = random_bump_field(rng, grid);
      const Real theta = detail::uniform(rng, 0, 2 * kPi), s = detail::uniform(rng, 0, 2);
      ComplexField rotated = f;
      rotated.values *= std::polar(Real(1), theta);
      ComplexField a = conjugated_nl(s, rotated, alpha);
      ComplexField b = conjugated_nl(s, f, alpha);
      b.values *= std::polar(Real(1), theta);
      worst = std::max(worst, h1_diff(a, b) / sobolev_norm(b, 1));
      a = averaged_nl(rotated, alpha, quad);
      b = averaged_nl(f, alpha, quad);
      b.values *= std::polar(Real(1), theta);
      worst = std::max(worst, h1_diff(a, b) / sobolev_norm(b, 1));
    }
    out.push_back(check("nonlinearity_gauge_covariance", worst, 1e-12));
  }

  {  // <Q> equals the tau-average (1/2) int_0^2 Q(tau, .) dtau
    const ComplexField f = smooth_bump_pair(grid);
    const Quadrature rich = make_quadrature(QuadratureKind::gauss_legendre, 96);
    const ComplexField avg = averaged_nl(f, alpha, rich);
    const int panels = 1024;
    const Real h = 2.0 / panels;
    ComplexVector acc = ComplexVector::Zero(grid->num_points);
    for (int i = 0; i <= panels; ++i) {
      const Real w = (i == 0 || i == panels) ? h / 3 : (i % 2 == 1 ? 4 * h / 3 : 2 * h / 3);
      acc += w * conjugated_nl(i * h, f, alpha).values;
    }
    ComplexField tau_avg{grid, acc / 2, 0};
    out.push_back(check("averaged_nl_tau_average_identity", h1_diff(avg, tau_avg), 1e-8));
  }

  {  // full-period fluctuation integral cancels
    const ComplexField f = smooth_bump_pair(grid);
    const Quadrature rich = make_quadrature(QuadratureKind::gauss_legendre, 96);
    const ComplexField q2 = fluctuation_integral(2, f, alpha, 512, rich);
    out.push_back(check("fluctuation_integral_full_period", sobolev_norm(q2, 1), 1e-8));
  }

  {  // stepper mass conservation on a representative managed run
    const ComplexField phi = sample_initial_datum(GaussianSpec{}, grid);
    DmStepperConfig cfg;
    cfg.map = make_dispersion_map(1, 0.1);
    cfg.alpha = alpha;
    Trajectory traj = evolve_dm(phi, cfg, 1, uniform_times(1, 20), quad);
    Real drift = 0;
    for (int k = 0; k < traj.size(); ++k)
      drift = std::max(drift, std::abs(traj.mass_values[k] - traj.mass_values[0]) / traj.mass_values[0]);
    out.push_back(check("dm_stepper_mass_conservation", drift, 1e-9));
  }

  return out;
}

std::vector<CheckResult> run_lemma_checks(const GridPtr& grid, Real alpha, int trials, std::uint64_t seed) {
  const EnsembleReport rep = lemma_bound_suite(alpha, trials, seed, grid);
  std::vector<CheckResult> out;

  // Gate: the empirical constant (max ratio, and with it the median) stays
  // below 50. The max/median spread is reported alongside; for the H^3 bound
  // it is intrinsically large because the ratio falls like (1+k^2)^-2 across
  // the ensemble's carrier range while the constant itself stays small.
  const auto bound_check = [&](const std::string& name, const RatioStats& s) {
    if (!s.evaluated) {
      CheckResult r;
      r.name = name;
      r.passed = true;
      r.detail = "skipped: " + s.skip_reason;
      out.push_back(r);
      return;
    }
    const bool finite = std::isfinite(s.max_ratio) && s.max_ratio > 0 && s.median_ratio > 0;
    const Real spread = s.median_ratio > 0 ? s.max_ratio / s.median_ratio : std::numeric_limits<Real>::infinity();
    std::ostringstream detail;
    detail << "median=" << s.median_ratio << " max/median=" << spread << " worst: " << s.worst_case;
    CheckResult r = check(name, std::max(s.max_ratio, s.median_ratio), 50, detail.str());
    r.passed = r.passed && finite;
    out.push_back(r);
  };

  bound_check("bound_conjugated_nl_h1", rep.conjugated_h1);
  bound_check("bound_averaged_nl_h1", rep.averaged_h1);
  bound_check("bound_second_derivative_h3", rep.second_deriv_h3);
  bound_check("bound_lipschitz_h1", rep.lipschitz);
  out.push_back(check("homogeneity_single_mode", rep.homogeneity_rel_error, 1e-10));
  return out;
}

}  // namespace dmnls
