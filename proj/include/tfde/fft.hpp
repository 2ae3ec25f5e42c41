#pragma once

#include <complex>
#include <unsupported/Eigen/FFT>

#include "tfde/types.hpp"

namespace tfde {

using VectorXcd = Vector<std::complex<double>>;

// One engine per thread; kissfft caches its twiddle tables per transform
// size inside the engine, so repeated transforms of one size reuse a plan.
inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> engine;
  return engine;
}

inline void fft_forward(const VectorXd& in, VectorXcd& out) {
  fft_engine().fwd(out, in);
}

inline void fft_inverse(const VectorXcd& in, VectorXd& out) {
  fft_engine().inv(out, in);
}

inline Index next_pow2_at_least(Index n) {
  Index p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace tfde
