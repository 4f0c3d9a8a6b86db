#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "afc/errors.hpp"
#include "afc/optimality.hpp"
#include "afc/quadrature.hpp"
#include "afc/spectral.hpp"

using afc::kPi;
using afc::MemoryParams;
using afc::ToothShape;

namespace {

MemoryParams dimensional() {
  MemoryParams p;
  p.period_T = 1e-6;
  p.length_L = 0.02;
  p.alpha_max = 500.0;
  return p;
}

// Two lobes of different height, off centre.
ToothShape two_lobes(const MemoryParams& p) {
  const double d = p.half_period();
  const double a = p.alpha_max;
  return ToothShape::tabulated(p, {{-d, 0.0},
                                   {-0.7 * d, 0.0},
                                   {-0.5 * d, 0.4 * a},
                                   {-0.3 * d, 0.0},
                                   {0.1 * d, 0.0},
                                   {0.35 * d, a},
                                   {0.6 * d, 0.0},
                                   {d, 0.0}});
}

} // namespace

TEST_CASE("centred square coefficients") {
  const auto p = dimensional();
  const double T = p.period_T;
  for (double gT : {0.1, 0.56, 1.2, 2.0, 3.0}) {
    const auto f = afc::fourier_pair(ToothShape::square(p, gT / T), p);
    CHECK(f.f0 == doctest::Approx(gT * p.alpha_max / kPi).epsilon(1e-12));
    CHECK(f.f_minus1.real() == doctest::Approx(p.alpha_max * std::sin(gT) / kPi).epsilon(1e-11));
    CHECK(std::abs(f.f_minus1.imag()) <= 1e-10 * f.f0);
  }
}

TEST_CASE("constant shape") {
  const auto p = dimensional();
  const auto f = afc::fourier_pair(ToothShape::constant(p, 40.0), p);
  CHECK(f.f0 == doctest::Approx(40.0).epsilon(1e-13));
  CHECK(std::abs(f.f_minus1) <= 1e-13 * 40.0);
}

TEST_CASE("shift theorem") {
  const auto p = dimensional();
  const double d = p.half_period();
  const double T = p.period_T;
  const auto base = two_lobes(p);
  const auto ref = afc::fourier_pair(base, p);
  for (double c : {-0.9 * d, -0.3 * d, 0.05 * d, 0.77 * d, 2.4 * d}) {
    const auto f = afc::fourier_pair(base.shifted(c), p);
    const auto expected = ref.f_minus1 * std::polar(1.0, c * T);
    CHECK(std::abs(f.f_minus1 - expected) <= 1e-9 * std::abs(ref.f_minus1));
    CHECK(std::abs(f.f0 - ref.f0) <= 1e-9 * ref.f0);
  }
}

TEST_CASE("phase alignment") {
  const auto p = dimensional();
  const double d = p.half_period();
  const double T = p.period_T;

  SUBCASE("centred square is already aligned") {
    const auto a = afc::phase_align(ToothShape::square(p, 0.3 * d), p);
    CHECK(std::abs(a.omega0) <= 1e-12 * d);
  }
  SUBCASE("recovers the applied offset") {
    for (double c : {-0.4 * d, 0.1 * d, 0.45 * d}) {
      const auto a = afc::phase_align(ToothShape::square(p, 0.4 * d).shifted(c), p);
      CHECK(a.omega0 == doctest::Approx(c).epsilon(1e-10));
    }
  }
  SUBCASE("two lobes: sine moment vanishes after alignment") {
    const auto a = afc::phase_align(two_lobes(p), p);
    const auto& s = a.aligned;
    const double sine = afc::quadrature([&](double w) { return s(w) * std::sin(w * T); }, s.breakpoints(), 1e-12);
    const double cosine = afc::quadrature([&](double w) { return s(w) * std::cos(w * T); }, s.breakpoints(), 1e-12);
    CHECK(std::abs(sine) <= 1e-9 * std::abs(cosine));
    CHECK(cosine > 0.0);
    const auto before = afc::fourier_pair(two_lobes(p), p);
    const auto after = afc::fourier_pair(s, p);
    CHECK(std::abs(after.f_minus1.imag()) <= 1e-9 * after.f0);
    CHECK(after.f_minus1.real() == doctest::Approx(std::abs(before.f_minus1)).epsilon(1e-10));
    CHECK(after.f0 == doctest::Approx(before.f0).epsilon(1e-10));
    const auto again = afc::phase_align(s, p);
    CHECK(std::abs(again.omega0) * T <= 1e-9);
  }
  SUBCASE("degenerate coefficient") {
    CHECK_THROWS_AS(afc::phase_align(ToothShape::constant(p, 10.0), p), afc::DegenerateShape);
  }
}

TEST_CASE("random shapes: coefficient bound, symmetry, translation") {
  const auto p = dimensional();
  const double d = p.half_period();
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const bool symmetric = seed % 2 == 0;
    const double area = p.alpha_max * 2.0 * d * (0.05 + 0.9 * (seed - 100) / 40.0);
    const auto s = afc::random_bounded_shape(seed, area, p.alpha_max, 64, symmetric, p);
    const auto f = afc::fourier_pair(s, p);
    CHECK(f.f0 >= 0.0);
    CHECK(std::abs(f.f_minus1) <= f.f0 * (1.0 + 1e-12));
    if (symmetric)
      CHECK(std::abs(f.f_minus1.imag()) <= 1e-9 * f.f0);
    const auto g = afc::fourier_pair(s.shifted(0.123 * d * (seed - 110)), p);
    CHECK(std::abs(std::abs(g.f_minus1) - std::abs(f.f_minus1)) <= 1e-9 * std::abs(f.f_minus1));
    CHECK(std::abs(g.f0 - f.f0) <= 1e-9 * f.f0);
  }
}
