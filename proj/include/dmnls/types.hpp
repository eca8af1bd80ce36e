#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace dmnls {

using Real = double;
using Complex = std::complex<Real>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Real kPi = std::numbers::pi_v<Real>;

/// Thrown when a run cannot produce trustworthy numbers (blow-up guard
/// tripped, resolution check failed). Distinct from input validation errors.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dmnls
