#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "afc/params.hpp"

namespace afc {

/// A sample of a piecewise-linear profile.
struct Knot {
  double omega = 0.0; ///< detuning, rad/s
  double value = 0.0; ///< absorption (1/m) for teeth, density for kernels

  bool operator==(const Knot&) const = default;
};

/// Normalized single-atom line shape L(omega) that blurs a target tooth.
///
/// A zero-width Lorentzian or Gaussian line acts as a delta kernel.
class LineShapeKernel {
public:
  enum class Kind { Lorentzian, Gaussian, Tabulated };

  static LineShapeKernel lorentzian(double fwhm);
  static LineShapeKernel gaussian(double fwhm);
  /// Knots must be strictly increasing and already integrate to one.
  static LineShapeKernel tabulated(std::vector<Knot> knots);
  /// Rescales the knots to unit area first.
  static LineShapeKernel tabulated_normalized(std::vector<Knot> knots);

  Kind kind() const { return kind_; }
  double fwhm() const { return fwhm_; }
  bool is_delta() const { return kind_ != Kind::Tabulated && fwhm_ == 0.0; }
  const std::vector<Knot>& knots() const { return knots_; }

  /// Density at detuning omega (zero outside a tabulated support).
  double operator()(double omega) const;

  /// Finite integration support; Lorentzian and Gaussian lines are unbounded.
  std::optional<std::pair<double, double>> support() const;

  /// Detunings where the kernel has kinks or its weight concentrates.
  std::vector<double> hint_points() const;

  /// Set when the kernel is too wide for the narrow-line approximation.
  std::optional<std::string> width_warning(double period_T) const;

private:
  LineShapeKernel(Kind kind, double fwhm, std::vector<Knot> knots);

  Kind kind_;
  double fwhm_;
  std::vector<Knot> knots_;
};

/// Bounded non-negative absorption profile f(omega) on one comb period.
///
/// Values are periodic in omega with period 2*pi/T. Instances are immutable and
/// cheap to copy (shared structure). Every constructor checks
/// 0 <= f <= alpha_max on a dense grid and throws InvalidShape otherwise.
class ToothShape {
public:
  enum class Kind { Square, Lorentzian, Gaussian, Tabulated, Shifted, WithBackground, Convolved };

  /// Height alpha_max on |omega| <= half_width, zero elsewhere.
  static ToothShape square(const MemoryParams& params, double half_width,
                           std::optional<double> height = std::nullopt);
  /// height * fwhm^2 / (fwhm^2 + 4 omega^2), truncated to one period.
  static ToothShape lorentzian(const MemoryParams& params, double fwhm,
                               std::optional<double> height = std::nullopt);
  /// height * exp(-4 ln2 omega^2 / fwhm^2), truncated to one period.
  static ToothShape gaussian(const MemoryParams& params, double fwhm,
                             std::optional<double> height = std::nullopt);
  /// Piecewise linear on knots spanning exactly [-pi/T, pi/T].
  static ToothShape tabulated(const MemoryParams& params, std::vector<Knot> knots);
  /// f == value over the whole period.
  static ToothShape constant(const MemoryParams& params, double value);

  /// Periodic translation: the result at omega equals this shape at omega - offset,
  /// so a tooth centred at 0 ends up centred at offset.
  ToothShape shifted(double offset) const;
  /// Adds a constant floor; throws BoundViolation if the sum exceeds alpha_max.
  ToothShape with_background(double alpha_bg) const;
  /// Circular convolution with a normalized line shape.
  ToothShape convolved(const LineShapeKernel& kernel) const;

  Kind kind() const;
  double period_T() const;
  double alpha_max() const;

  /// f(omega) with omega wrapped into [-pi/T, pi/T).
  double operator()(double omega) const;

  /// Sorted points of [-pi/T, pi/T] (ends included) between which the shape is
  /// smooth. Quadrature splits here.
  std::vector<double> breakpoints() const;

  /// Knots when kind() == Tabulated.
  const std::vector<Knot>* tabulated_knots() const;
  /// Largest value on the bound-check grid.
  double max_value() const;

  std::string describe() const;

  struct Impl;

private:
  explicit ToothShape(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Free-function spelling of ToothShape::operator().
inline double evaluate(const ToothShape& shape, double omega) { return shape(omega); }

/// Wraps omega into [-pi/T, pi/T).
double wrap_detuning(double omega, double period_T);

/// Integral of f over one period, [-pi/T, pi/T].
double area(const ToothShape& shape, const MemoryParams& params, double rel_tol = 1e-10);

/// Grid size used by construction-time bound checks.
inline constexpr int kBoundCheckPoints = 8192;
/// Default number of knots per period for tabulated shapes.
inline constexpr int kDefaultTabulatedKnots = 2048;

/// Samples a shape on n uniform intervals per period (n + 1 knots, both ends).
std::vector<Knot> tabulate(const ToothShape& shape, int n = kDefaultTabulatedKnots);

} // namespace afc
