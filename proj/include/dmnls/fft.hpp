#pragma once

#include <unsupported/Eigen/FFT>

#include "dmnls/types.hpp"

namespace dmnls::detail {

// One FFT engine per thread; Eigen caches plans per size internally.
// Raw (unscaled) sums in both directions, normalization applied by callers.
inline Eigen::FFT<Real>& fft_engine() {
  thread_local struct Holder {
    Eigen::FFT<Real> engine;
    Holder() { engine.SetFlag(Eigen::FFT<Real>::Unscaled); }
  } holder;
  return holder.engine;
}

/// Unitary forward transform: coeffs = DFT(values) / sqrt(N).
inline ComplexVector forward_unitary(const ComplexVector& values) {
  ComplexVector out(values.size());
  fft_engine().fwd(out, values);
  out /= std::sqrt(static_cast<Real>(values.size()));
  return out;
}

/// Unitary inverse transform, exact inverse of forward_unitary.
inline ComplexVector inverse_unitary(const ComplexVector& coeffs) {
  ComplexVector out(coeffs.size());
  fft_engine().inv(out, coeffs);
  out /= std::sqrt(static_cast<Real>(coeffs.size()));
  return out;
}

}  // namespace dmnls::detail
