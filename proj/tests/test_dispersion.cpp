#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dmnls/dispersion.hpp"
#include "dmnls/ensemble.hpp"

using namespace dmnls;

namespace {

// Independent oracle: jump locations of d(t) = d_av + (1/eps) d0(t/eps) are
// enumerated directly and d is constant between them, so midpoint values
// times segment lengths integrate it exactly.
Real integral_oracle(Real t0, Real t1, const DispersionMap& map) {
  const Real sign = t1 >= t0 ? 1 : -1;
  const auto [lo, hi] = std::minmax(t0, t1);
  std::vector<Real> cuts{lo};
  const long long k_lo = static_cast<long long>(std::floor(lo / map.epsilon)) - 1;
  const long long k_hi = static_cast<long long>(std::ceil(hi / map.epsilon)) + 1;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const Real t = k * map.epsilon;
    if (t > lo && t < hi) cuts.push_back(t);
  }
  cuts.push_back(hi);
  Real acc = 0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Real mid = (cuts[i] + cuts[i + 1]) / 2;
    const Real d = map.d_av + d0(mid / map.epsilon) / map.epsilon;
    acc += d * (cuts[i + 1] - cuts[i]);
  }
  return sign * acc;
}

}  // namespace

TEST_CASE("fast profile values and periodicity") {
  CHECK(d0(0.5) == 1.0);
  CHECK(d0(1.5) == -1.0);
  CHECK(d0(2.5) == 1.0);
  CHECK(d0(0.0) == 1.0);
  CHECK(d0(1.0) == -1.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const Real tau = detail::uniform(rng, -10, 10);
    CHECK(d0(tau) == d0(tau + 2));
    CHECK((d0(tau) == 1.0 || d0(tau) == -1.0));
  }
}

TEST_CASE("antiderivative is the triangle wave") {
  CHECK(d0_antiderivative(0.0) == 0.0);
  CHECK(d0_antiderivative(0.5) == 0.5);
  CHECK(d0_antiderivative(1.0) == 1.0);
  CHECK(d0_antiderivative(1.5) == 0.5);
  CHECK(d0_antiderivative(2.0) == 0.0);
  CHECK(d0_antiderivative(-0.5) == 0.5);  // periodic extension

  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const Real tau = detail::uniform(rng, -20, 20);
    const Real v = d0_antiderivative(tau);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(d0_antiderivative(tau + 2) == doctest::Approx(v).epsilon(1e-12));
    // continuity: the slope is +-1
    CHECK(std::abs(d0_antiderivative(tau + 1e-7) - v) < 1.1e-7);
  }
}

TEST_CASE("antiderivative agrees with direct quadrature of the profile") {
  // fine midpoint rule from 0 to tau; error bounded by the cell width at the
  // profile jumps
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Real tau = detail::uniform(rng, -6, 6);
    const int n = 200000;
    const Real h = tau / n;
    Real acc = 0;
    for (int j = 0; j < n; ++j) acc += d0((j + 0.5) * h) * h;
    CHECK(std::abs(d0_antiderivative(tau) - acc) < 1e-3);
  }
}

TEST_CASE("integrated dispersion closed form") {
  const DispersionMap map = make_dispersion_map(0.7, 0.1);
  // full fast period: the fast part cancels
  CHECK(integrated_dispersion(0, 2 * map.epsilon, map) ==
        doctest::Approx(2 * map.epsilon * map.d_av).epsilon(1e-15));
  // half period: D(1) - D(0) = 1
  CHECK(integrated_dispersion(0, map.epsilon, map) == doctest::Approx(map.epsilon * map.d_av + 1).epsilon(1e-15));
}

TEST_CASE("integrated dispersion matches the segment oracle") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const DispersionMap map = make_dispersion_map(detail::uniform(rng, -2, 2), detail::uniform(rng, 0.02, 0.5));
    const Real t0 = detail::uniform(rng, -3, 3);
    const Real t1 = detail::uniform(rng, -3, 3);
    CHECK(std::abs(integrated_dispersion(t0, t1, map) - integral_oracle(t0, t1, map)) < 1e-10);
  }
}

TEST_CASE("integrated dispersion additivity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const DispersionMap map = make_dispersion_map(detail::uniform(rng, -2, 2), detail::uniform(rng, 0.02, 0.5));
    const Real a = detail::uniform(rng, -3, 3);
    const Real b = a + detail::uniform(rng, 0, 2);
    const Real c = b + detail::uniform(rng, 0, 2);
    const Real lhs = integrated_dispersion(a, b, map) + integrated_dispersion(b, c, map);
    CHECK(std::abs(lhs - integrated_dispersion(a, c, map)) < 1e-14);
  }
}

TEST_CASE("breakpoints: examples and endpoint exclusion") {
  const auto bp = breakpoints_in(0, 0.35, 0.1);
  REQUIRE(bp.size() == 3);
  CHECK(bp[0] == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(bp[1] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(bp[2] == doctest::Approx(0.3).epsilon(1e-15));

  CHECK(breakpoints_in(0, 0.1, 0.1).empty());  // endpoints excluded

  const auto mid = breakpoints_in(0.05, 0.25, 0.1);
  REQUIRE(mid.size() == 2);
  CHECK(mid[0] == doctest::Approx(0.1));
  CHECK(mid[1] == doctest::Approx(0.2));

  const auto neg = breakpoints_in(-0.25, 0.05, 0.1);
  REQUIRE(neg.size() == 3);
  CHECK(neg[0] == doctest::Approx(-0.2));
  CHECK(std::abs(neg[2]) < 1e-15);

  CHECK_THROWS_AS(breakpoints_in(1, 0, 0.1), std::invalid_argument);
}

TEST_CASE("breakpoint list is sorted, interior, and on the lattice") {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 100; ++i) {
    const Real eps = detail::uniform(rng, 0.01, 0.4);
    const Real t0 = detail::uniform(rng, -2, 2);
    const Real t1 = t0 + detail::uniform(rng, 0.001, 3);
    const auto bp = breakpoints_in(t0, t1, eps);
    for (size_t k = 0; k < bp.size(); ++k) {
      CHECK(bp[k] > t0);
      CHECK(bp[k] < t1);
      if (k) CHECK(bp[k] > bp[k - 1]);
      CHECK(std::abs(bp[k] / eps - std::round(bp[k] / eps)) < 1e-9);
    }
  }
}

TEST_CASE("dispersion map validation") {
  CHECK_THROWS_AS(make_dispersion_map(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_dispersion_map(1, -0.1), std::invalid_argument);
  CHECK_NOTHROW(make_dispersion_map(-3, 0.25));
}
