#include "afc/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include <json.hpp>

#include "afc/errors.hpp"
#include "afc/golden.hpp"
#include "afc/parallel.hpp"
#include "afc/quadrature.hpp"
#include "afc/spectral.hpp"

namespace afc {

namespace {

constexpr double kAreaRelTol = 1e-8;
constexpr int kMonotoneSamples = 1024;

double clipped_area(const std::vector<double>& v, double scale, double alpha, double h) {
  double s = 0.0;
  for (double x : v)
    s += std::clamp(scale * x, 0.0, alpha);
  return s * h;
}

} // namespace

ToothShape random_bounded_shape(std::uint64_t seed, double target_area, double alpha_max, int n_knots,
                                bool symmetric, const MemoryParams& params) {
  params.validate();
  if (!(alpha_max > 0.0) || alpha_max > params.alpha_max)
    throw InvalidParams("alpha_max must lie in (0, params.alpha_max]");
  if (n_knots < 8)
    throw InvalidParams("n_knots must be at least 8");
  const double delta = params.half_period();
  const double max_area = alpha_max * 2.0 * delta;
  if (!(target_area >= 0.0) || target_area > max_area * (1.0 + 1e-12))
    throw InfeasibleArea("target area " + std::to_string(target_area) + " exceeds alpha_max * 2 pi / T = " +
                         std::to_string(max_area));

  const auto n = static_cast<std::size_t>(n_knots);
  const double h = 2.0 * delta / static_cast<double>(n);
  std::vector<double> v(n, 0.0);

  if (target_area >= max_area * (1.0 - 1e-12)) {
    std::fill(v.begin(), v.end(), alpha_max);
  } else if (target_area > 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> raw(n);
    for (auto& x : raw)
      x = alpha_max * unit(rng);
    for (std::size_t j = 0; j < n; ++j)
      v[j] = (raw[(j + n - 1) % n] + raw[j] + raw[(j + 1) % n]) / 3.0;
    if (symmetric) {
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t m = (n - j) % n;
        if (m < j)
          v[j] = v[m];
      }
    }
    // Rescale and clip until the area settles, then bisect the scale if needed.
    double scale = 1.0;
    double a = clipped_area(v, scale, alpha_max, h);
    bool done = false;
    for (int it = 0; it < 200 && !done; ++it) {
      scale *= target_area / a;
      a = clipped_area(v, scale, alpha_max, h);
      done = std::abs(a - target_area) <= 0.1 * kAreaRelTol * target_area;
    }
    if (!done) {
      double lo = 0.0;
      double hi = scale;
      while (clipped_area(v, hi, alpha_max, h) < target_area)
        hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clipped_area(v, mid, alpha_max, h) < target_area ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi)
          break;
      }
      scale = 0.5 * (lo + hi);
    }
    for (auto& x : v)
      x = std::clamp(scale * x, 0.0, alpha_max);
  }

  std::vector<Knot> knots(n + 1);
  for (std::size_t j = 0; j < n; ++j)
    knots[j] = {-delta + static_cast<double>(j) * h, v[j]};
  knots[n] = {delta, v[0]};
  return ToothShape::tabulated(params, std::move(knots));
}

DominanceReport square_dominance_check(const ToothShape& shape, const MemoryParams& params) {
  DominanceReport r;
  r.matched_area = area(shape, params);
  const double half_width = std::min(r.matched_area / (2.0 * params.alpha_max), params.half_period());
  const auto square = ToothShape::square(params, half_width);
  r.shape_fm1_modulus = std::abs(fourier_pair(shape, params).f_minus1);
  r.square_fm1_modulus = std::abs(fourier_pair(square, params).f_minus1);
  r.margin = r.square_fm1_modulus - r.shape_fm1_modulus;
  const double tol = std::max(1e-9 * r.square_fm1_modulus, 1e-14 * params.alpha_max);
  r.pass = r.margin >= -tol;
  return r;
}

namespace {

void check_lemma2_domain(double half_width, double center, const MemoryParams& params) {
  params.validate();
  const double delta = params.half_period();
  const double slack = 1e-12 * delta;
  if (!(half_width >= 0.0) || half_width > delta + slack)
    throw DomainError("half-width must lie in [0, pi/T]");
  if (!(std::abs(center) <= delta - half_width + slack))
    throw DomainError("centre must satisfy |c| <= pi/T - half-width");
}

} // namespace

double lemma2_integral(double half_width, double center, const MemoryParams& params) {
  check_lemma2_domain(half_width, center, params);
  const double T = params.period_T;
  return 2.0 * params.alpha_max * std::sin(half_width * T) * std::cos(center * T) / T;
}

double lemma2_integral_quadrature(double half_width, double center, const MemoryParams& params) {
  check_lemma2_domain(half_width, center, params);
  const double T = params.period_T;
  const auto shape = ToothShape::square(params, half_width).shifted(center);
  const auto breaks = shape.breakpoints();
  const auto v = quad::integrate_n<1>([&](double w) { return quad::Vec<1>{shape(w) * std::cos(w * T)}; },
                                      breaks, 1e-12, 1e-15 * params.alpha_max / T);
  return v[0];
}

double lemma2_center_scan(double half_width, const MemoryParams& params, int n_centers) {
  check_lemma2_domain(half_width, 0.0, params);
  if (n_centers < 1)
    throw InvalidParams("n_centers must be positive");
  const double range = std::max(0.0, params.half_period() - half_width);
  if (range == 0.0 || n_centers == 1 || half_width == 0.0)
    return 0.0;
  double best_c = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_centers; ++i) {
    const double c = range * (2 * i - (n_centers - 1)) / (n_centers - 1);
    const double value = lemma2_integral_quadrature(half_width, c, params);
    if (value > best || (value == best && std::abs(c) < std::abs(best_c))) {
      best = value;
      best_c = c;
    }
  }
  return best_c;
}

DominanceCase dominance_case(std::uint64_t seed, const MemoryParams& params, bool symmetric, bool wide) {
  static constexpr int kKnotChoices[] = {16, 64, 256, 1024};
  DominanceCase c;
  c.seed = seed;
  c.symmetric = symmetric;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Gamma T in (0, pi/2) or (pi/2, pi), staying away from the exact ends.
  const double u = 0.01 + 0.98 * unit(rng);
  const double gamma_T = (wide ? 0.5 * kPi : 0.0) + 0.5 * kPi * u;
  c.target_area = 2.0 * params.alpha_max * gamma_T / params.period_T;
  c.n_knots = kKnotChoices[std::uniform_int_distribution<int>(0, 3)(rng)];
  return c;
}

DominanceCase dominance_case(std::uint64_t seed, const MemoryParams& params) {
  return dominance_case(seed, params, seed % 2 == 0, (seed / 2) % 2 == 1);
}

VerificationRecord run_dominance_case(const DominanceCase& c, const MemoryParams& params) {
  const auto shape = random_bounded_shape(c.seed, c.target_area, params.alpha_max, c.n_knots, c.symmetric, params);
  const auto r = square_dominance_check(shape, params);
  return {c.seed, r.matched_area, r.shape_fm1_modulus, r.square_fm1_modulus, r.margin, r.pass, c.symmetric};
}

std::vector<VerificationRecord> verify_dominance_batch(std::uint64_t first_seed, std::size_t count,
                                                       const MemoryParams& params, unsigned threads) {
  std::vector<VerificationRecord> out(count);
  parallel_for(count, threads,
               [&](std::size_t i) { out[i] = run_dominance_case(dominance_case(first_seed + i, params), params); });
  return out;
}

std::string to_json_line(const VerificationRecord& record) {
  nlohmann::json j = {{"seed", record.seed},           {"area", record.area},
                      {"shape_fm1", record.shape_fm1}, {"square_fm1", record.square_fm1},
                      {"margin", record.margin},       {"pass", record.pass}};
  return j.dump();
}

// ---------------------------------------------------------------------------
// Generalized functional

void GeneralFunctionalSpec::validate() const {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("functional interval must satisfy a < b");
  if (!(bound_alpha > 0.0))
    throw DomainError("bound_alpha must be positive");
  if (!g || !G || !H)
    throw DomainError("functional spec '" + name + "' is incomplete");

  std::vector<double> gv(kMonotoneSamples + 1);
  double gscale = 0.0;
  for (int i = 0; i <= kMonotoneSamples; ++i) {
    gv[i] = g(a + (b - a) * i / kMonotoneSamples);
    gscale = std::max(gscale, std::abs(gv[i]));
  }
  for (int i = 0; i < kMonotoneSamples; ++i) {
    if (gv[i + 1] > gv[i] + 1e-12 * std::max(gscale, 1.0))
      throw MonotonicityViolation("g of '" + name + "' is not non-increasing");
  }

  const std::vector<double> breaks{a, b};
  const double lo = bound_alpha * quadrature([&](double x) { return std::min(g(x), 0.0); }, breaks, 1e-10);
  const double hi = bound_alpha * quadrature([&](double x) { return std::max(g(x), 0.0); }, breaks, 1e-10);
  double prev = G(lo);
  double Gscale = std::abs(prev);
  std::vector<double> Gv(kMonotoneSamples + 1);
  for (int i = 0; i <= kMonotoneSamples; ++i) {
    Gv[i] = G(lo + (hi - lo) * i / kMonotoneSamples);
    Gscale = std::max(Gscale, std::abs(Gv[i]));
  }
  for (int i = 0; i < kMonotoneSamples; ++i) {
    if (Gv[i + 1] < Gv[i] - 1e-12 * std::max(Gscale, 1.0))
      throw MonotonicityViolation("G of '" + name + "' is not non-decreasing");
  }
}

GeneralFunctionalSpec afc_functional_spec(double od) {
  if (!(od > 0.0))
    throw DomainError("od must be positive");
  GeneralFunctionalSpec s;
  s.name = "afc";
  s.g = [](double x) { return std::cos(x); };
  s.G = [od](double x) {
    const double y = od * x / kPi;
    return y * y;
  };
  s.H = [od](double y) { return std::exp(-od * y / kPi); };
  s.bound_alpha = 1.0;
  s.a = 0.0;
  s.b = 0.5 * kPi;
  return s;
}

GeneralFunctionalSpec linear_kernel_spec() {
  GeneralFunctionalSpec s;
  s.name = "linear";
  s.g = [](double x) { return -x; };
  s.G = [](double x) { return x; };
  s.H = [](double) { return 1.0; };
  return s;
}

GeneralFunctionalSpec constant_kernel_spec() {
  GeneralFunctionalSpec s;
  s.name = "constant";
  s.g = [](double) { return 1.0; };
  s.G = [](double x) { return x; };
  s.H = [](double y) { return std::exp(-2.0 * y); };
  return s;
}

double functional_value(const GeneralFunctionalSpec& spec, const std::function<double(double)>& f,
                        const std::vector<double>& breaks) {
  const auto v = quad::integrate_n<2>(
      [&](double x) {
        const double fx = f(x);
        return quad::Vec<2>{fx * spec.g(x), fx};
      },
      breaks, 1e-11, 1e-15);
  return spec.G(v[0]) * spec.H(v[1]);
}

namespace {

double square_value(const GeneralFunctionalSpec& spec, double c) {
  if (c <= spec.a)
    return spec.G(0.0) * spec.H(0.0);
  const std::vector<double> breaks{spec.a, c};
  const double inner = spec.bound_alpha * quadrature(spec.g, breaks, 1e-12);
  return spec.G(inner) * spec.H(spec.bound_alpha * (c - spec.a));
}

// Piecewise-linear sample on uniform knots; three flavours for variety.
struct Sample {
  std::vector<double> xs;
  std::vector<double> ys;
  double operator()(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin())
      return ys.front();
    if (it == xs.end())
      return ys.back();
    const auto k = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
    return ys[k - 1] + t * (ys[k] - ys[k - 1]);
  }
};

Sample random_sample(const GeneralFunctionalSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = std::uniform_int_distribution<int>(8, 128)(rng);
  const int flavour = std::uniform_int_distribution<int>(0, 2)(rng);
  Sample s;
  s.xs.resize(n + 1);
  s.ys.resize(n + 1);
  const double p_on = unit(rng);
  for (int i = 0; i <= n; ++i) {
    s.xs[i] = spec.a + (spec.b - spec.a) * i / n;
    const double u = unit(rng);
    switch (flavour) {
    case 0:
      s.ys[i] = spec.bound_alpha * u;
      break;
    case 1:
      s.ys[i] = u < p_on ? spec.bound_alpha : 0.0;
      break;
    default:
      s.ys[i] = spec.bound_alpha * u * u * u;
      break;
    }
  }
  s.xs.back() = spec.b;
  return s;
}

} // namespace

GeneralCheckReport generalized_optimality_check(const GeneralFunctionalSpec& spec, std::size_t n_samples,
                                                std::uint64_t seed) {
  spec.validate();
  GeneralCheckReport r;
  r.name = spec.name;
  r.n_samples = n_samples;
  const auto best = scan_then_golden([&](double c) { return square_value(spec, c); }, spec.a, spec.b, 512,
                                     1e-10 * (spec.b - spec.a));
  r.best_width = best.x - spec.a;
  r.best_value = best.value;
  const double tol = std::max(1e-9 * std::abs(best.value), 1e-13);
  r.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto s = random_sample(spec, rng);
    const double value = functional_value(spec, s, s.xs);
    const double margin = best.value - value;
    r.worst_margin = std::min(r.worst_margin, margin);
    if (margin < -tol) {
      ++r.n_counterexamples;
      r.counterexamples.push_back(i);
    }
  }
  if (n_samples == 0)
    r.worst_margin = 0.0;
  r.pass = r.n_counterexamples == 0;
  return r;
}

std::string to_json(const GeneralCheckReport& report) {
  nlohmann::json j = {{"name", report.name},
                      {"n_samples", report.n_samples},
                      {"n_counterexamples", report.n_counterexamples},
                      {"best_width", report.best_width},
                      {"best_value", report.best_value},
                      {"worst_margin", report.worst_margin},
                      {"counterexamples", report.counterexamples},
                      {"pass", report.pass}};
  return j.dump();
}

} // namespace afc
