#include "afc/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "afc/errors.hpp"
#include "afc/golden.hpp"
#include "afc/quadrature.hpp"

namespace afc {

namespace {

constexpr double kDimensionlessRelTol = 1e-10;
constexpr int kBracketScan = 64;
constexpr double kWidthTol = 1e-9;
// Lorentzian lines decay slowly; integrate their Fourier transform over this
// many comb periods on each side.
constexpr int kLorentzianLinePeriods = 200;

void check_dimensionless(double p, double od) {
  if (!(std::isfinite(p) && p >= 0.0 && p <= kTwoPi * (1.0 + 1e-12)))
    throw DomainError("dimensionless width p must lie in [0, 2 pi]");
  if (!(std::isfinite(od) && od >= 0.0))
    throw DomainError("optical depth must be non-negative");
}

/// (1/2pi) integral over [-pi, pi] of tooth(t) * {cos t, 1} dt, squared/exp'd.
template <class Tooth>
double eta_symmetric(const Tooth& tooth, double p) {
  std::vector<double> pts{-kPi, 0.0, kPi};
  for (double m : {0.5, 2.0, 8.0}) {
    if (m * p < kPi) {
      pts.push_back(m * p);
      pts.push_back(-m * p);
    }
  }
  std::sort(pts.begin(), pts.end());
  auto integrand = [&](double t) {
    const double v = tooth(t);
    return quad::Vec<2>{v * std::cos(t), v};
  };
  const auto m = quad::integrate_n<2>(integrand, pts, kDimensionlessRelTol, 1e-300);
  const double overlap = m[0] / kTwoPi;
  const double mean = m[1] / kTwoPi;
  return overlap * overlap * std::exp(-mean);
}

} // namespace

double eta_from_fourier(const FourierPair& fourier, double length_L) {
  const double a = std::abs(fourier.f_minus1) * length_L;
  return a * a * std::exp(-fourier.f0 * length_L);
}

EfficiencyResult efficiency(const ToothShape& shape, const MemoryParams& params) {
  EfficiencyResult r;
  r.fourier = fourier_pair(shape, params);
  r.eta = eta_from_fourier(r.fourier, params.length_L);
  return r;
}

double eta_square(double p, double od) {
  check_dimensionless(p, od);
  const double s = std::sin(p);
  return od * od * s * s / (kPi * kPi) * std::exp(-p * od / kPi);
}

double eta_lorentzian(double p, double od) {
  check_dimensionless(p, od);
  if (p == 0.0 || od == 0.0)
    return 0.0;
  const double p2 = p * p;
  return eta_symmetric([&](double t) { return p2 * od / (p2 + 4.0 * t * t); }, p);
}

double eta_gaussian(double p, double od) {
  check_dimensionless(p, od);
  if (p == 0.0 || od == 0.0)
    return 0.0;
  const double k = 4.0 * std::log(2.0) / (p * p);
  return eta_symmetric([&](double t) { return od * std::exp(-k * t * t); }, p);
}

double optimal_square_width(double od) {
  if (!(od >= 0.0))
    throw DomainError("optical depth must be non-negative");
  if (od == 0.0)
    return kPi / 2.0;
  return std::atan(kTwoPi / od);
}

double optimal_square_efficiency(double od) {
  if (!(std::isfinite(od) && od > 0.0))
    throw DomainError("optimal square efficiency needs od > 0");
  const double ratio = kTwoPi / od;
  return 4.0 * std::exp(-(od / kPi) * std::atan(ratio)) / (1.0 + ratio * ratio);
}

double eta_family(ToothFamily family, double p, double od) {
  switch (family) {
  case ToothFamily::Square:
    return eta_square(p, od);
  case ToothFamily::Lorentzian:
    return eta_lorentzian(p, od);
  case ToothFamily::Gaussian:
    return eta_gaussian(p, od);
  }
  throw DomainError("unknown tooth family");
}

WidthOptimum optimize_width(ToothFamily family, double od) {
  if (!(std::isfinite(od) && od > 0.0))
    throw DomainError("width optimization needs od > 0");
  const auto best =
      scan_then_golden([&](double p) { return eta_family(family, p, od); }, 0.0, kTwoPi, kBracketScan, kWidthTol);
  if (!(best.value > 0.0))
    throw OptimizationFailure("no positive efficiency found while bracketing the optimum");
  return {best.x, best.value};
}

WidthOptimum optimize_width_with_linewidth(ToothFamily family, double od, const LineShapeKernel& kernel,
                                           ConvolutionMode mode) {
  if (!(std::isfinite(od) && od > 0.0))
    throw DomainError("width optimization needs od > 0");
  const MemoryParams params = MemoryParams::dimensionless(od);
  if (mode == ConvolutionMode::ScaleFactor) {
    const double factor = linewidth_scale_factor(kernel, params);
    WidthOptimum ideal = family == ToothFamily::Square
                             ? WidthOptimum{optimal_square_width(od), optimal_square_efficiency(od)}
                             : optimize_width(family, od);
    ideal.eta *= factor;
    return ideal;
  }
  auto realized = [&](double p) {
    ToothShape target = family == ToothFamily::Square       ? ToothShape::square(params, p)
                        : family == ToothFamily::Lorentzian ? ToothShape::lorentzian(params, p)
                                                            : ToothShape::gaussian(params, p);
    return efficiency_convolved(target, kernel, params, ConvolutionMode::Exact).eta;
  };
  const double lo = family == ToothFamily::Square ? 0.0 : 1e-6;
  const double hi = family == ToothFamily::Square ? kPi : kTwoPi;
  const auto best = scan_then_golden(realized, lo, hi, kBracketScan, 1e-7);
  if (!(best.value > 0.0))
    throw OptimizationFailure("no positive efficiency found while bracketing the optimum");
  return {best.x, best.value};
}

EfficiencyResult efficiency_with_background(const ToothShape& above_background, const MemoryParams& params) {
  params.validate();
  const ToothShape composite = above_background.with_background(params.alpha_bg);
  EfficiencyResult r = efficiency(composite, params);
  const EfficiencyResult ideal = efficiency(above_background, params);
  r.components = EfficiencyComponents{ideal.eta, std::exp(-params.alpha_bg * params.length_L), 1.0};
  return r;
}

double linewidth_scale_factor(const LineShapeKernel& kernel, const MemoryParams& params) {
  params.validate();
  if (kernel.is_delta())
    return 1.0;
  const double T = params.period_T;
  const double period = params.comb_period();
  std::vector<double> pts;
  if (const auto sup = kernel.support()) {
    pts = kernel.hint_points();
  } else {
    int periods = kLorentzianLinePeriods;
    if (kernel.kind() == LineShapeKernel::Kind::Gaussian) {
      const double sigma = kernel.fwhm() / (2.0 * std::sqrt(2.0 * std::log(2.0)));
      periods = std::max(1, static_cast<int>(std::ceil(12.0 * sigma / period)));
    } else {
      periods = std::max(periods, static_cast<int>(std::ceil(1e3 * kernel.fwhm() / period)));
    }
    for (int k = -periods; k <= periods; ++k)
      pts.push_back(k * period);
    const double lo = pts.front();
    const double hi = pts.back();
    for (double h : kernel.hint_points())
      if (h > lo && h < hi)
        pts.push_back(h);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  }
  auto integrand = [&](double w) {
    const double v = kernel(w);
    return quad::Vec<2>{v * std::cos(w * T), v * std::sin(w * T)};
  };
  const auto m = quad::integrate_n<2>(integrand, pts, 1e-12, 1e-300);
  return m[0] * m[0] + m[1] * m[1];
}

EfficiencyResult efficiency_convolved(const ToothShape& target, const LineShapeKernel& kernel,
                                      const MemoryParams& params, ConvolutionMode mode) {
  params.validate();
  EfficiencyResult r;
  if (auto w = kernel.width_warning(params.period_T))
    r.warnings.push_back(*w);
  const EfficiencyResult ideal = efficiency(target, params);
  const double factor = linewidth_scale_factor(kernel, params);
  if (mode == ConvolutionMode::Exact) {
    const EfficiencyResult exact = efficiency(target.convolved(kernel), params);
    r.eta = exact.eta;
    r.fourier = exact.fourier;
  } else {
    r.eta = factor * ideal.eta;
    r.fourier = ideal.fourier;
  }
  r.components = EfficiencyComponents{ideal.eta, 1.0, factor};
  return r;
}

} // namespace afc
