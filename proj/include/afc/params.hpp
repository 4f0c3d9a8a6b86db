#pragma once

#include <numbers>

namespace afc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Physical constraints of one AFC memory.
///
/// Frequencies are angular (rad/s). The comb repeats every 2*pi/period_T in
/// detuning; one tooth lives on [-pi/T, pi/T].
struct MemoryParams {
  double period_T = 1.0;  ///< storage (rephasing) time, s
  double length_L = 1.0;  ///< medium length, m
  double alpha_max = 1.0; ///< maximum absorption coefficient, 1/m
  double alpha_bg = 0.0;  ///< constant background absorption, 1/m
  double gamma = 0.0;     ///< homogeneous half-width, rad/s (solver only)

  /// Throws InvalidParams when an invariant does not hold.
  void validate() const;

  double optical_depth() const { return alpha_max * length_L; }
  double background_optical_depth() const { return alpha_bg * length_L; }
  /// delta = pi / T
  double half_period() const { return kPi / period_T; }
  /// 2*pi / T
  double comb_period() const { return kTwoPi / period_T; }

  /// T = 1 s, L = 1 m, alpha_max = od. For od == 0 the medium has zero length.
  static MemoryParams dimensionless(double od, double background_od = 0.0);
};

} // namespace afc
