#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "afc/params.hpp"
#include "afc/shape.hpp"
#include "afc/spectral.hpp"

namespace afc {

/// 4 / e^2, the forward-retrieval ceiling.
inline const double kForwardEfficiencyLimit = 4.0 * std::exp(-2.0);

struct EfficiencyComponents {
  double eta_ideal = 0.0;
  double background_factor = 1.0;
  double linewidth_factor = 1.0;
};

struct EfficiencyResult {
  double eta = 0.0;
  FourierPair fourier;
  std::optional<EfficiencyComponents> components;
  std::vector<std::string> warnings;
};

/// |F-1 L|^2 exp(-F0 L).
double eta_from_fourier(const FourierPair& fourier, double length_L);

/// Forward retrieval efficiency of a comb with the given tooth.
EfficiencyResult efficiency(const ToothShape& shape, const MemoryParams& params);

// Dimensionless efficiencies. p is the width times T, od = alpha_max * L.
// For the square tooth p is the half-width; for Lorentzian and Gaussian teeth
// it is the FWHM. p may span [0, 2 pi].

double eta_square(double p, double od);
double eta_lorentzian(double p, double od);
double eta_gaussian(double p, double od);

/// arctan(2 pi / od); pi/2 at od == 0.
double optimal_square_width(double od);
/// Efficiency of the optimal square tooth; increases towards 4/e^2.
double optimal_square_efficiency(double od);

enum class ToothFamily { Square, Lorentzian, Gaussian };

double eta_family(ToothFamily family, double p, double od);

struct WidthOptimum {
  double p = 0.0;
  double eta = 0.0;
};

/// Maximizes eta over p in (0, 2 pi] (64-point bracket scan, then golden section).
WidthOptimum optimize_width(ToothFamily family, double od);

/// Efficiency of `above_background` sitting on a constant floor params.alpha_bg.
/// components.background_factor = exp(-alpha_bg L).
EfficiencyResult efficiency_with_background(const ToothShape& above_background, const MemoryParams& params);

/// |integral L(w) exp(i w T) dw|^2 over the kernel support.
double linewidth_scale_factor(const LineShapeKernel& kernel, const MemoryParams& params);

enum class ConvolutionMode { Exact, ScaleFactor };

/// Efficiency of the realized tooth (target convolved with the line shape),
/// either by explicit convolution or by the multiplicative scale factor.
EfficiencyResult efficiency_convolved(const ToothShape& target, const LineShapeKernel& kernel,
                                      const MemoryParams& params, ConvolutionMode mode);

/// Width optimum of the realized tooth for a line shape given in units of 1/T
/// (T = 1). ScaleFactor mode keeps the ideal optimum width and multiplies its
/// efficiency by the line-shape factor; for the square that width is
/// arctan(2 pi / od). Exact mode maximizes the explicitly convolved tooth.
WidthOptimum optimize_width_with_linewidth(ToothFamily family, double od, const LineShapeKernel& kernel,
                                           ConvolutionMode mode);

} // namespace afc
