#include "afc/spectral.hpp"

#include <cmath>

#include "afc/errors.hpp"
#include "afc/quadrature.hpp"

namespace afc {

namespace {
constexpr double kDegenerateRatio = 1e-12;
}

FourierPair fourier_pair(const ToothShape& shape, const MemoryParams& params, double rel_tol) {
  params.validate();
  const double T = params.period_T;
  if (std::abs(shape.period_T() - T) > 1e-12 * T)
    throw InvalidShape("shape was built for a different comb period");
  const auto pts = shape.breakpoints();
  auto moments = [&](double w) {
    const double f = shape(w);
    return quad::Vec<3>{f, f * std::cos(w * T), f * std::sin(w * T)};
  };
  const auto m = quad::integrate_n<3>(moments, pts, rel_tol, 1e-300);
  const double scale = T / kTwoPi;
  return {scale * m[0], {scale * m[1], scale * m[2]}};
}

PhaseAlignment phase_align(const ToothShape& shape, const MemoryParams& params) {
  const auto pair = fourier_pair(shape, params);
  const double modulus = std::abs(pair.f_minus1);
  if (!(modulus > kDegenerateRatio * pair.f0) || modulus == 0.0)
    throw DegenerateShape("|F-1| vanishes; the phase of the comb is undefined");
  double phase = std::arg(pair.f_minus1);
  if (phase <= -kPi)
    phase = kPi;
  const double omega0 = phase / params.period_T;
  return {shape.shifted(-omega0), omega0};
}

} // namespace afc
