#include "afc/shape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <variant>

#include "afc/errors.hpp"
#include "afc/quadrature.hpp"

namespace afc {

namespace {

constexpr double kBoundRelTol = 1e-9;
constexpr double kConvolutionRelTol = 1e-11;
// Kernel integration window for circular convolution: five comb periods.
constexpr double kConvolutionHalfWindowPeriods = 2.5;
// Tabulated shapes with more knots than this are integrated without
// splitting at every knot inside the convolution integral.
constexpr std::size_t kMaxConvolutionBreaks = 64;

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

double trapezoid_area(const std::vector<Knot>& knots) {
  double s = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i)
    s += 0.5 * (knots[i].value + knots[i - 1].value) * (knots[i].omega - knots[i - 1].omega);
  return s;
}

double interpolate(const std::vector<Knot>& knots, double x) {
  if (x <= knots.front().omega)
    return knots.front().omega == x ? knots.front().value : 0.0;
  if (x >= knots.back().omega)
    return knots.back().omega == x ? knots.back().value : 0.0;
  const auto it = std::upper_bound(knots.begin(), knots.end(), x,
                                   [](double v, const Knot& k) { return v < k.omega; });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  const double t = (x - lo.omega) / (hi.omega - lo.omega);
  return lo.value + t * (hi.value - lo.value);
}

void check_strictly_increasing(const std::vector<Knot>& knots, const char* what) {
  if (knots.size() < 2)
    throw InvalidShape(std::string(what) + ": at least two knots are required");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].omega) || !std::isfinite(knots[i].value))
      throw InvalidShape(std::string(what) + ": knots must be finite");
    if (i > 0 && !(knots[i].omega > knots[i - 1].omega))
      throw InvalidShape(std::string(what) + ": knot detunings must be strictly increasing");
  }
}

} // namespace

// ---------------------------------------------------------------- kernels

LineShapeKernel::LineShapeKernel(Kind kind, double fwhm, std::vector<Knot> knots)
    : kind_(kind), fwhm_(fwhm), knots_(std::move(knots)) {}

LineShapeKernel LineShapeKernel::lorentzian(double fwhm) {
  if (!(std::isfinite(fwhm) && fwhm >= 0.0))
    throw InvalidShape("Lorentzian line width must be non-negative");
  return LineShapeKernel(Kind::Lorentzian, fwhm, {});
}

LineShapeKernel LineShapeKernel::gaussian(double fwhm) {
  if (!(std::isfinite(fwhm) && fwhm >= 0.0))
    throw InvalidShape("Gaussian line width must be non-negative");
  return LineShapeKernel(Kind::Gaussian, fwhm, {});
}

LineShapeKernel LineShapeKernel::tabulated(std::vector<Knot> knots) {
  check_strictly_increasing(knots, "tabulated line shape");
  double peak = 0.0;
  for (const auto& k : knots) {
    if (k.value < 0.0)
      throw InvalidShape("tabulated line shape must be non-negative");
    peak = std::max(peak, k.value);
  }
  const double mass = trapezoid_area(knots);
  if (std::abs(mass - 1.0) > 1e-8)
    throw InvalidShape("tabulated line shape is not normalized (area " + std::to_string(mass) + ")");

  // Full width at half maximum from the outermost half-height crossings.
  const double half = 0.5 * peak;
  double left = knots.front().omega;
  double right = knots.back().omega;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (knots[i - 1].value < half && knots[i].value >= half) {
      left = knots[i - 1].omega + (half - knots[i - 1].value) / (knots[i].value - knots[i - 1].value) *
                                      (knots[i].omega - knots[i - 1].omega);
      break;
    }
    if (knots[i - 1].value >= half) {
      left = knots[i - 1].omega;
      break;
    }
  }
  for (std::size_t i = knots.size() - 1; i > 0; --i) {
    if (knots[i].value < half && knots[i - 1].value >= half) {
      right = knots[i].omega - (half - knots[i].value) / (knots[i - 1].value - knots[i].value) *
                                   (knots[i].omega - knots[i - 1].omega);
      break;
    }
    if (knots[i].value >= half) {
      right = knots[i].omega;
      break;
    }
  }
  return LineShapeKernel(Kind::Tabulated, std::max(0.0, right - left), std::move(knots));
}

LineShapeKernel LineShapeKernel::tabulated_normalized(std::vector<Knot> knots) {
  check_strictly_increasing(knots, "tabulated line shape");
  const double mass = trapezoid_area(knots);
  if (!(mass > 0.0))
    throw InvalidShape("tabulated line shape has no positive area");
  for (auto& k : knots)
    k.value /= mass;
  return tabulated(std::move(knots));
}

double LineShapeKernel::operator()(double omega) const {
  switch (kind_) {
  case Kind::Lorentzian: {
    const double h = 0.5 * fwhm_;
    return h / (kPi * (omega * omega + h * h));
  }
  case Kind::Gaussian: {
    const double sigma = fwhm_ / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    return std::exp(-0.5 * omega * omega / (sigma * sigma)) / (sigma * std::sqrt(kTwoPi));
  }
  case Kind::Tabulated:
    return interpolate(knots_, omega);
  }
  return 0.0;
}

std::optional<std::pair<double, double>> LineShapeKernel::support() const {
  if (kind_ == Kind::Tabulated)
    return std::make_pair(knots_.front().omega, knots_.back().omega);
  return std::nullopt;
}

std::vector<double> LineShapeKernel::hint_points() const {
  std::vector<double> pts;
  if (kind_ == Kind::Tabulated) {
    for (const auto& k : knots_)
      pts.push_back(k.omega);
    return pts;
  }
  pts.push_back(0.0);
  const double h = 0.5 * fwhm_;
  for (double m : {1.0, 4.0, 16.0, 64.0, 256.0}) {
    pts.push_back(m * h);
    pts.push_back(-m * h);
  }
  sort_unique(pts);
  return pts;
}

std::optional<std::string> LineShapeKernel::width_warning(double period_T) const {
  const double limit = 0.2 * kTwoPi / period_T;
  if (fwhm_ > limit) {
    std::ostringstream os;
    os << "line shape FWHM " << fwhm_ << " rad/s exceeds 0.2 comb periods (" << limit
       << " rad/s); the narrow-line approximation is unreliable";
    return os.str();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- shapes

namespace {

struct SquareNode {
  double half_width;
  double height;
};
struct LorentzianNode {
  double fwhm;
  double height;
};
struct GaussianNode {
  double fwhm;
  double height;
};
struct TabulatedNode {
  std::vector<Knot> knots;
};
struct ShiftedNode {
  ToothShape inner;
  double offset;
};
struct BackgroundNode {
  ToothShape inner;
  double alpha_bg;
};
struct ConvolvedNode {
  ToothShape inner;
  LineShapeKernel kernel;
};

} // namespace

struct ToothShape::Impl {
  double period_T;
  double alpha_max;
  std::variant<SquareNode, LorentzianNode, GaussianNode, TabulatedNode, ShiftedNode, BackgroundNode,
               ConvolvedNode>
      node;
  double max_value = 0.0;

  double half_period() const { return kPi / period_T; }

  /// Value at an omega already wrapped into one period.
  double eval(double w) const;
  std::vector<double> breaks() const;
};

double wrap_detuning(double omega, double period_T) {
  const double period = kTwoPi / period_T;
  const double half = 0.5 * period;
  if (omega >= -half && omega < half)
    return omega;
  double w = omega - period * std::floor((omega + half) / period);
  if (w >= half)
    w -= period;
  if (w < -half)
    w = -half;
  return w;
}

double ToothShape::Impl::eval(double w) const {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SquareNode>) {
          return std::abs(w) <= n.half_width ? n.height : 0.0;
        } else if constexpr (std::is_same_v<T, LorentzianNode>) {
          return n.height * n.fwhm * n.fwhm / (n.fwhm * n.fwhm + 4.0 * w * w);
        } else if constexpr (std::is_same_v<T, GaussianNode>) {
          return n.height * std::exp(-4.0 * std::log(2.0) * w * w / (n.fwhm * n.fwhm));
        } else if constexpr (std::is_same_v<T, TabulatedNode>) {
          return interpolate(n.knots, w);
        } else if constexpr (std::is_same_v<T, ShiftedNode>) {
          return n.inner(w - n.offset);
        } else if constexpr (std::is_same_v<T, BackgroundNode>) {
          return n.inner(w) + n.alpha_bg;
        } else {
          if (n.kernel.is_delta())
            return n.inner(w);
          const double period = kTwoPi / period_T;
          const double window = kConvolutionHalfWindowPeriods * period;
          double lo = -window;
          double hi = window;
          if (const auto sup = n.kernel.support()) {
            lo = std::max(lo, sup->first);
            hi = std::min(hi, sup->second);
          }
          if (!(hi > lo))
            return 0.0;
          std::vector<double> pts{lo, hi};
          for (double h : n.kernel.hint_points())
            if (h > lo && h < hi)
              pts.push_back(h);
          const auto inner_breaks = n.inner.breakpoints();
          if (inner_breaks.size() <= kMaxConvolutionBreaks) {
            for (double b : inner_breaks) {
              for (int k = -3; k <= 3; ++k) {
                const double u = w - (b + k * period);
                if (u > lo && u < hi)
                  pts.push_back(u);
              }
            }
          }
          sort_unique(pts);
          const auto& inner = n.inner;
          const auto& kernel = n.kernel;
          auto integrand = [&](double u) { return quad::Vec<1>{inner(w - u) * kernel(u)}; };
          return quad::integrate_n<1>(integrand, pts, kConvolutionRelTol, 1e-300)[0];
        }
      },
      node);
}

std::vector<double> ToothShape::Impl::breaks() const {
  const double half = half_period();
  std::vector<double> pts{-half, half};
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SquareNode>) {
          if (n.half_width > 0.0 && n.half_width < half) {
            pts.push_back(-n.half_width);
            pts.push_back(n.half_width);
          }
        } else if constexpr (std::is_same_v<T, LorentzianNode> || std::is_same_v<T, GaussianNode>) {
          pts.push_back(0.0);
          for (double m : {0.5, 2.0, 8.0}) {
            const double x = m * n.fwhm;
            if (x < half) {
              pts.push_back(x);
              pts.push_back(-x);
            }
          }
        } else if constexpr (std::is_same_v<T, TabulatedNode>) {
          for (const auto& k : n.knots)
            pts.push_back(k.omega);
        } else if constexpr (std::is_same_v<T, ShiftedNode>) {
          for (double b : n.inner.breakpoints())
            pts.push_back(wrap_detuning(b + n.offset, period_T));
        } else if constexpr (std::is_same_v<T, BackgroundNode>) {
          for (double b : n.inner.breakpoints())
            pts.push_back(b);
        } else {
          const auto inner = n.inner.breakpoints();
          if (inner.size() <= kMaxConvolutionBreaks)
            for (double b : inner)
              pts.push_back(b);
        }
      },
      node);
  for (double& p : pts)
    p = std::clamp(p, -half, half);
  sort_unique(pts);
  return pts;
}

namespace {

double resolve_height(const MemoryParams& params, std::optional<double> height) {
  const double h = height.value_or(params.alpha_max);
  if (!(std::isfinite(h) && h >= 0.0))
    throw InvalidShape("tooth height must be non-negative");
  return h;
}

/// Dense-grid check of 0 <= f <= alpha_max; returns the largest value seen.
double check_bounds(const ToothShape::Impl& impl, bool background) {
  const double half = impl.half_period();
  const double nudge = 1e-12 * half;
  double lo = 0.0;
  double hi = 0.0;
  auto probe = [&](double w) {
    const double v = impl.eval(wrap_detuning(w, impl.period_T));
    if (!std::isfinite(v))
      throw InvalidShape("shape evaluates to a non-finite value");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (int i = 0; i < kBoundCheckPoints; ++i)
    probe(-half + (2.0 * half) * i / kBoundCheckPoints);
  for (double b : impl.breaks()) {
    probe(b);
    probe(b - nudge);
    probe(b + nudge);
  }
  if (lo < -kBoundRelTol * impl.alpha_max)
    throw InvalidShape("shape takes negative values (min " + std::to_string(lo) + ")");
  if (hi > impl.alpha_max * (1.0 + kBoundRelTol)) {
    const std::string msg = "shape exceeds alpha_max (max " + std::to_string(hi) + " > " +
                            std::to_string(impl.alpha_max) + ")";
    if (background)
      throw BoundViolation(msg);
    throw InvalidShape(msg);
  }
  return hi;
}

} // namespace

ToothShape::ToothShape(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ToothShape ToothShape::square(const MemoryParams& params, double half_width, std::optional<double> height) {
  params.validate();
  const double half = params.half_period();
  if (!(std::isfinite(half_width) && half_width >= 0.0 && half_width <= half * (1.0 + 1e-12)))
    throw InvalidShape("square half-width must lie in [0, pi/T]");
  auto impl = std::make_shared<Impl>(
      Impl{params.period_T, params.alpha_max,
           SquareNode{std::min(half_width, half), resolve_height(params, height)}});
  impl->max_value = check_bounds(*impl, false);
  return ToothShape(std::move(impl));
}

ToothShape ToothShape::lorentzian(const MemoryParams& params, double fwhm, std::optional<double> height) {
  params.validate();
  if (!(std::isfinite(fwhm) && fwhm > 0.0))
    throw InvalidShape("Lorentzian tooth FWHM must be positive");
  auto impl = std::make_shared<Impl>(
      Impl{params.period_T, params.alpha_max, LorentzianNode{fwhm, resolve_height(params, height)}});
  impl->max_value = check_bounds(*impl, false);
  return ToothShape(std::move(impl));
}

ToothShape ToothShape::gaussian(const MemoryParams& params, double fwhm, std::optional<double> height) {
  params.validate();
  if (!(std::isfinite(fwhm) && fwhm > 0.0))
    throw InvalidShape("Gaussian tooth FWHM must be positive");
  auto impl = std::make_shared<Impl>(
      Impl{params.period_T, params.alpha_max, GaussianNode{fwhm, resolve_height(params, height)}});
  impl->max_value = check_bounds(*impl, false);
  return ToothShape(std::move(impl));
}

ToothShape ToothShape::tabulated(const MemoryParams& params, std::vector<Knot> knots) {
  params.validate();
  check_strictly_increasing(knots, "tabulated tooth");
  const double half = params.half_period();
  const double tol = 1e-9 * half;
  if (std::abs(knots.front().omega + half) > tol || std::abs(knots.back().omega - half) > tol)
    throw InvalidShape("tabulated tooth must span exactly [-pi/T, pi/T]");
  knots.front().omega = -half;
  knots.back().omega = half;
  if (std::abs(knots.front().value - knots.back().value) > 1e-12 * params.alpha_max)
    throw InvalidShape("tabulated tooth must have equal end values (periodicity)");
  knots.back().value = knots.front().value;
  auto impl = std::make_shared<Impl>(Impl{params.period_T, params.alpha_max, TabulatedNode{std::move(knots)}});
  impl->max_value = check_bounds(*impl, false);
  return ToothShape(std::move(impl));
}

ToothShape ToothShape::constant(const MemoryParams& params, double value) {
  return square(params, params.half_period(), value);
}

ToothShape ToothShape::shifted(double offset) const {
  if (!std::isfinite(offset))
    throw InvalidShape("shift offset must be finite");
  ToothShape base = *this;
  double total = offset;
  // Nested shifts collapse into one translation.
  if (const auto* s = std::get_if<ShiftedNode>(&impl_->node)) {
    base = s->inner;
    total += s->offset;
  }
  total = wrap_detuning(total, impl_->period_T);
  auto impl = std::make_shared<Impl>(Impl{impl_->period_T, impl_->alpha_max, ShiftedNode{base, total}});
  impl->max_value = check_bounds(*impl, false);
  return ToothShape(std::move(impl));
}

ToothShape ToothShape::with_background(double alpha_bg) const {
  if (!(std::isfinite(alpha_bg) && alpha_bg >= 0.0))
    throw InvalidShape("background absorption must be non-negative");
  if (alpha_bg + impl_->max_value > impl_->alpha_max * (1.0 + kBoundRelTol))
    throw BoundViolation("background plus tooth exceeds alpha_max");
  auto impl = std::make_shared<Impl>(Impl{impl_->period_T, impl_->alpha_max, BackgroundNode{*this, alpha_bg}});
  impl->max_value = check_bounds(*impl, true);
  return ToothShape(std::move(impl));
}

ToothShape ToothShape::convolved(const LineShapeKernel& kernel) const {
  auto impl = std::make_shared<Impl>(Impl{impl_->period_T, impl_->alpha_max, ConvolvedNode{*this, kernel}});
  // A normalized kernel cannot raise the maximum, so the bound is inherited.
  impl->max_value = impl_->max_value;
  return ToothShape(std::move(impl));
}

ToothShape::Kind ToothShape::kind() const { return static_cast<Kind>(impl_->node.index()); }
double ToothShape::period_T() const { return impl_->period_T; }
double ToothShape::alpha_max() const { return impl_->alpha_max; }
double ToothShape::max_value() const { return impl_->max_value; }

double ToothShape::operator()(double omega) const {
  return impl_->eval(wrap_detuning(omega, impl_->period_T));
}

std::vector<double> ToothShape::breakpoints() const { return impl_->breaks(); }

const std::vector<Knot>* ToothShape::tabulated_knots() const {
  if (const auto* t = std::get_if<TabulatedNode>(&impl_->node))
    return &t->knots;
  return nullptr;
}

std::string ToothShape::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SquareNode>)
          os << "square(half_width=" << n.half_width << ", height=" << n.height << ")";
        else if constexpr (std::is_same_v<T, LorentzianNode>)
          os << "lorentzian(fwhm=" << n.fwhm << ", height=" << n.height << ")";
        else if constexpr (std::is_same_v<T, GaussianNode>)
          os << "gaussian(fwhm=" << n.fwhm << ", height=" << n.height << ")";
        else if constexpr (std::is_same_v<T, TabulatedNode>)
          os << "tabulated(" << n.knots.size() << " knots)";
        else if constexpr (std::is_same_v<T, ShiftedNode>)
          os << "shifted(" << n.inner.describe() << ", offset=" << n.offset << ")";
        else if constexpr (std::is_same_v<T, BackgroundNode>)
          os << "with_background(" << n.inner.describe() << ", alpha_bg=" << n.alpha_bg << ")";
        else
          os << "convolved(" << n.inner.describe() << ", kernel_fwhm=" << n.kernel.fwhm() << ")";
      },
      impl_->node);
  return os.str();
}

double area(const ToothShape& shape, const MemoryParams& params, double rel_tol) {
  if (std::abs(shape.period_T() - params.period_T) > 1e-12 * params.period_T)
    throw InvalidShape("shape was built for a different comb period");
  const auto pts = shape.breakpoints();
  auto f = [&](double w) { return quad::Vec<1>{shape(w)}; };
  return quad::integrate_n<1>(f, pts, rel_tol, 1e-300)[0];
}

std::vector<Knot> tabulate(const ToothShape& shape, int n) {
  if (n < 2)
    throw DomainError("tabulation needs at least two intervals");
  const double half = kPi / shape.period_T();
  std::vector<Knot> knots(static_cast<std::size_t>(n) + 1);
  for (int j = 0; j <= n; ++j) {
    const double w = j == n ? half : -half + 2.0 * half * j / n;
    knots[j] = {w, shape(w)};
  }
  knots.back().value = knots.front().value;
  return knots;
}

} // namespace afc
