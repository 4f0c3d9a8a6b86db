#pragma once

#include <complex>

#include "afc/params.hpp"
#include "afc/shape.hpp"

namespace afc {

/// Zeroth and minus-first Fourier coefficients of a comb,
///   F0   = (T / 2 pi) * integral f(w) dw
///   F-1  = (T / 2 pi) * integral f(w) exp(i w T) dw
/// over one period [-pi/T, pi/T].
struct FourierPair {
  double f0 = 0.0;
  std::complex<double> f_minus1{0.0, 0.0};
};

FourierPair fourier_pair(const ToothShape& shape, const MemoryParams& params, double rel_tol = 1e-10);

struct PhaseAlignment {
  ToothShape aligned;
  double omega0 = 0.0; ///< arg(F-1) / T in (-pi/T, pi/T]
};

/// Periodically translates `shape` so that its F-1 becomes real and positive.
/// The aligned shape equals shape(w + omega0). Throws DegenerateShape when
/// |F-1| <= 1e-12 F0.
PhaseAlignment phase_align(const ToothShape& shape, const MemoryParams& params);

} // namespace afc
