#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmnls/experiments.hpp"

namespace dmnls {

struct CheckResult {
  std::string name;
  bool passed = false;
  Real value = 0;      // measured quantity
  Real threshold = 0;  // pass iff value <= threshold
  std::string detail;
};

/// Structural identities of the operators: transform round trip, free-flow
/// unitarity and group law, profile/antiderivative identities, quadrature
/// normalization, conjugated-nonlinearity periodicity and gauge covariance,
/// the tau-average identity, the full-period fluctuation cancellation, and
/// stepper mass conservation. Deterministic for a fixed seed.
std::vector<CheckResult> run_structural_checks(const GridPtr& grid, Real alpha, std::uint64_t seed);

/// Ensemble bound checks: finite empirical constants with max/median < 50
/// for each applicable bound, plus the exact homogeneity identity.
std::vector<CheckResult> run_lemma_checks(const GridPtr& grid, Real alpha, int trials, std::uint64_t seed);

}  // namespace dmnls
