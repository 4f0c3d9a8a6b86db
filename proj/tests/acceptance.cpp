// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "afc/efficiency.hpp"
#include "afc/efficiency_map.hpp"
#include "afc/golden.hpp"
#include "afc/mbsolver.hpp"
#include "afc/optimality.hpp"

using namespace afc;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs > limit_s) {
    r.ok = false;
    r.detail += " [over time limit " + std::to_string(limit_s) + " s]";
  }
  failures += !r.ok;
  std::printf("%s [%d] %s: %s (%.2f s)\n", r.ok ? "PASS" : "FAIL", id, title, r.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

MemoryParams lab(double od) {
  MemoryParams p;
  p.period_T = 1e-6;
  p.length_L = 0.01;
  p.alpha_max = od / p.length_L;
  return p;
}

Outcome asymptotic_bound() {
  Outcome r;
  double prev = -1.0;
  int breaks = 0;
  for (int i = 0; i < 1000; ++i) {
    const double od = 0.1 * std::pow(1e5, i / 999.0);
    const double e = optimal_square_efficiency(od);
    breaks += !(e > prev);
    prev = e;
  }
  const double top = optimal_square_efficiency(1e4);
  const double gap = std::abs(top - 4.0 * std::exp(-2.0));
  r.ok = breaks == 0 && gap <= 1e-3;
  r.detail = fmt("eta_opt(1e4)=%.6f", top) + fmt(" |eta-4/e^2|=%.2e", gap) +
             " monotonicity breaks=" + std::to_string(breaks) + " on 1000 od in [0.1,1e4]";
  return r;
}

Outcome closed_form_consistency() {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_s = 0.0, worst_l = 0.0, worst_g = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double od = 20.0 * (0.001 + 0.999 * unit(rng));
    const double ps = kPi * (0.001 + 0.998 * unit(rng));
    const double pl = kTwoPi * (0.001 + 0.999 * unit(rng));
    const auto prm = lab(od);
    const double T = prm.period_T;
    const double es = efficiency(ToothShape::square(prm, ps / T), prm).eta;
    const double el = efficiency(ToothShape::lorentzian(prm, pl / T), prm).eta;
    const double eg = efficiency(ToothShape::gaussian(prm, pl / T), prm).eta;
    worst_s = std::max(worst_s, std::abs(eta_square(ps, od) - es) / es);
    worst_l = std::max(worst_l, std::abs(eta_lorentzian(pl, od) - el) / el);
    worst_g = std::max(worst_g, std::abs(eta_gaussian(pl, od) - eg) / eg);
  }
  Outcome r;
  r.ok = worst_s <= 1e-9 && worst_l <= 1e-8 && worst_g <= 1e-8;
  r.detail = fmt("max rel diff square=%.2e", worst_s) + fmt(" lorentzian=%.2e", worst_l) +
             fmt(" gaussian=%.2e over 100 pairs", worst_g);
  return r;
}

Outcome square_dominance() {
  const auto prm = lab(3.0);
  const auto records = verify_dominance_batch(0, 1000, prm);
  int symmetric = 0, narrow = 0, fails = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& rec : records) {
    symmetric += rec.symmetric;
    narrow += rec.area / (2.0 * prm.alpha_max) * prm.period_T < 0.5 * kPi;
    const bool ok = rec.margin >= -1e-9 * rec.square_fm1;
    fails += !ok;
    worst = std::min(worst, rec.margin / rec.square_fm1);
  }
  const int asym = 1000 - symmetric;
  Outcome r;
  r.ok = fails == 0 && symmetric == 500 && narrow > 0 && narrow < 1000;
  r.detail = std::to_string(fails) + " counterexamples in 1000 shapes (" + std::to_string(symmetric) +
             " symmetric, " + std::to_string(asym) + " asymmetric; " + std::to_string(narrow) + " with Gamma T<pi/2, " +
             std::to_string(1000 - narrow) + " above)" + fmt(", min relative margin %.3e", worst);
  return r;
}

Outcome lemma2() {
  const auto prm = lab(2.0);
  const double T = prm.period_T;
  const double scale = 2.0 * prm.alpha_max / T;
  double worst = 0.0;
  int off_centre = 0;
  for (int i = 0; i < 20; ++i) {
    const double gamma = (i + 0.5) / 20.0 * kPi / T;
    const double range = kPi / T - gamma;
    for (int j = 0; j < 20; ++j) {
      const double c = -range + 2.0 * range * j / 19.0;
      worst = std::max(worst, std::abs(lemma2_integral(gamma, c, prm) - lemma2_integral_quadrature(gamma, c, prm)) / scale);
    }
    off_centre += lemma2_center_scan(gamma, prm, 401) != 0.0;
  }
  Outcome r;
  r.ok = worst <= 1e-10 && off_centre == 0;
  r.detail = fmt("max |closed-quadrature|/(2 alpha/T)=%.2e on 20x20 grid", worst) + ", argmax c != 0 for " +
             std::to_string(off_centre) + " of 20 widths";
  return r;
}

Outcome maxwell_bloch() {
  double worst = 0.0;
  for (double gT : {0.3, 0.56, 0.9}) {
    for (double od : {2.0, 10.0, 20.0}) {
      const auto prm = MemoryParams::dimensionless(od);
      const auto s = ToothShape::square(prm, gT);
      worst = std::max(worst, mb::summarize(mb::solve_mb(s, prm), s, prm).rel_error);
    }
  }
  double flat = 0.0;
  for (double od : {2.0, 4.0, 10.0, 20.0}) {
    const auto prm = MemoryParams::dimensionless(od);
    const auto rec = mb::solve_mb(ToothShape::constant(prm, prm.alpha_max), prm);
    flat = std::max(flat, std::abs(std::norm(rec.amplitudes[0]) / std::exp(-od) - 1.0));
  }
  Outcome r;
  r.ok = worst <= 0.02 && flat <= 0.01;
  r.detail = fmt("max rel error |a1|^2 vs analytic=%.2e on 3x3 grid", worst) +
             fmt(", flat |a0|^2 vs e^-OD max rel=%.2e (OD 2,4,10,20)", flat);
  return r;
}

Outcome background() {
  double worst = 0.0;
  for (double od_bg : {0.0, 0.5, 1.0, 2.0}) {
    MemoryParams prm = MemoryParams::dimensionless(12.0, od_bg);
    const double room = prm.alpha_max - prm.alpha_bg;
    const ToothShape shapes[] = {
        ToothShape::square(prm, 0.4, room),
        ToothShape::lorentzian(prm, 0.7, room),
        random_bounded_shape(77, 0.6 * room * kTwoPi / 2.0, room, 64, false, prm),
    };
    for (const auto& s : shapes) {
      const auto res = efficiency_with_background(s, prm);
      const double expected = efficiency(s, prm).eta * std::exp(-prm.alpha_bg * prm.length_L);
      worst = std::max(worst, std::abs(res.eta - expected) / expected);
    }
  }
  // Width re-optimization: OD' = OD - OD0 against a refined grid search of the composite.
  double worst_p = 0.0;
  for (double od_bg : {1.0, 3.0}) {
    const double od = 12.0;
    MemoryParams prm = MemoryParams::dimensionless(od, od_bg);
    const double room = prm.alpha_max - prm.alpha_bg;
    auto composite = [&](double p) {
      return efficiency_with_background(ToothShape::square(prm, p, room), prm).eta;
    };
    double lo = 0.0, hi = kPi;
    double best = 0.0;
    for (int level = 0; level < 8; ++level) {
      double best_v = -1.0;
      for (int k = 0; k <= 40; ++k) {
        const double p = lo + (hi - lo) * k / 40.0;
        const double v = composite(p);
        if (v > best_v) {
          best_v = v;
          best = p;
        }
      }
      const double step = (hi - lo) / 40.0;
      lo = std::max(0.0, best - step);
      hi = std::min(kPi, best + step);
    }
    const double p_opt = optimize_width(ToothFamily::Square, od - od_bg).p;
    worst_p = std::max(worst_p, std::abs(p_opt - best));
  }
  Outcome r;
  r.ok = worst <= 1e-9 && worst_p <= 1e-6;
  r.detail = fmt("max rel |eta - eta_ideal e^{-alpha_bg L}|=%.2e", worst) +
             fmt(", |p(OD') - grid p|=%.2e", worst_p);
  return r;
}

Outcome linewidth() {
  MemoryParams prm = MemoryParams::dimensionless(10.0);
  const double T = prm.period_T;
  double worst_l = 0.0, worst_g = 0.0;
  for (double frac : {0.001, 0.01, 0.05, 0.1}) {
    const double fwhm = frac * prm.comb_period();
    worst_l = std::max(worst_l, std::abs(linewidth_scale_factor(LineShapeKernel::lorentzian(fwhm), prm) -
                                         std::exp(-fwhm * T)));
    worst_g = std::max(worst_g, std::abs(linewidth_scale_factor(LineShapeKernel::gaussian(fwhm), prm) -
                                         std::exp(-fwhm * fwhm * T * T / (8.0 * std::log(2.0)))));
  }
  const double fwhm = 0.05 * prm.comb_period();
  double worst_ratio = 0.0;
  for (const auto& kernel : {LineShapeKernel::lorentzian(fwhm), LineShapeKernel::gaussian(fwhm)}) {
    for (const auto& s : {ToothShape::square(prm, optimal_square_width(10.0)), ToothShape::gaussian(prm, 1.0)}) {
      const double exact = efficiency_convolved(s, kernel, prm, ConvolutionMode::Exact).eta;
      const double scaled = efficiency_convolved(s, kernel, prm, ConvolutionMode::ScaleFactor).eta;
      worst_ratio = std::max(worst_ratio, std::abs(exact / scaled - 1.0));
    }
  }
  int moved = 0;
  for (double od : {2.0, 10.0, 20.0}) {
    const auto kernel = LineShapeKernel::lorentzian(fwhm);
    moved += optimize_width_with_linewidth(ToothFamily::Square, od, kernel, ConvolutionMode::ScaleFactor).p !=
             optimal_square_width(od);
    moved += optimize_width_with_linewidth(ToothFamily::Gaussian, od, kernel, ConvolutionMode::ScaleFactor).p !=
             optimize_width(ToothFamily::Gaussian, od).p;
  }
  Outcome r;
  r.ok = worst_l <= 1e-6 && worst_g <= 1e-6 && worst_ratio <= 0.05 && moved == 0;
  r.detail = fmt("factor error lorentzian=%.2e", worst_l) + fmt(" gaussian=%.2e", worst_g) +
             fmt(", |exact/scaled-1| max=%.3f at fwhm 0.05*2pi/T", worst_ratio) + ", argmax changes=" +
             std::to_string(moved);
  return r;
}

double positive_width(const EfficiencyMap& m, std::size_t row) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < m.p_axis.size(); ++i)
    n += m.at(row, i) > 0.0;
  return n * (m.p_axis[1] - m.p_axis[0]);
}

Outcome figures() {
  const auto p_axis = linspace(0.0, kTwoPi, 200);
  const auto od_axis = linspace(0.0, 20.0, 200);
  double top = 0.0;
  for (auto kind : {MapKind::EtaSquare, MapKind::EtaLorentzian, MapKind::EtaGaussian}) {
    const auto m = build_map(kind, p_axis, od_axis);
    top = std::max(top, *std::max_element(m.values.begin(), m.values.end()));
  }
  double min_gap = 1.0;
  for (double od : {5.0, 10.0, 20.0}) {
    const double es = eta_square(optimal_square_width(od), od);
    min_gap = std::min({min_gap, es - best_family_efficiency(ToothFamily::Lorentzian, od),
                        es - best_family_efficiency(ToothFamily::Gaussian, od)});
  }
  const auto d = difference_maps(p_axis, {5.0, 20.0});
  const double wl5 = positive_width(d.abs_l, 0), wl20 = positive_width(d.abs_l, 1);
  const double wg5 = positive_width(d.abs_g, 0), wg20 = positive_width(d.abs_g, 1);
  Outcome r;
  r.ok = top <= 0.54 && min_gap > 0.0 && wl5 > wl20 && wg5 > wg20;
  r.detail = fmt("eta map max=%.5f", top) + fmt(", min D at square optimum=%.4f", min_gap) +
             fmt(", D_L>0 width %.3f (OD 5)", wl5) + fmt(" vs %.3f (OD 20)", wl20) + fmt(", D_G %.3f", wg5) +
             fmt(" vs %.3f", wg20);
  return r;
}

Outcome generalized() {
  Outcome r;
  std::size_t total = 0;
  for (const auto& spec : {afc_functional_spec(), linear_kernel_spec(), constant_kernel_spec()}) {
    const auto rep = generalized_optimality_check(spec, 500, 2024);
    total += rep.n_counterexamples;
    r.detail += spec.name + "=" + std::to_string(rep.n_counterexamples) + " ";
  }
  r.ok = total == 0;
  r.detail = "counterexamples in 500 samples each: " + r.detail;
  return r;
}

} // namespace

int main() {
  run(1, "asymptotic bound", 1.0, asymptotic_bound);
  run(2, "closed form vs quadrature", 30.0, closed_form_consistency);
  run(3, "square dominance", 120.0, square_dominance);
  run(4, "off-centre square integral", 10.0, lemma2);
  run(5, "Maxwell-Bloch cross-validation", 300.0, maxwell_bloch);
  run(6, "background absorption", 10.0, background);
  run(7, "linewidth factor", 30.0, linewidth);
  run(8, "figure properties", 120.0, figures);
  run(9, "generalized functional", 60.0, generalized);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
