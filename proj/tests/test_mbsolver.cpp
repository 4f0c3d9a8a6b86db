#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "afc/efficiency.hpp"
#include "afc/errors.hpp"
#include "afc/mbsolver.hpp"

#include <json.hpp>

using afc::kPi;
using afc::MemoryParams;
using afc::ToothShape;
namespace mb = afc::mb;

namespace {

double phase_gap(std::complex<double> a, std::complex<double> b) { return std::abs(std::arg(a / b)); }

mb::SimGrid light_grid() {
  mb::SimGrid g;
  g.teeth = 40;
  g.points_per_period = 32;
  g.window_periods = 64;
  return g;
}

} // namespace

TEST_CASE("analytic amplitudes") {
  const afc::FourierPair f{2.0, {0.5, -0.25}};
  const auto [a0, a1] = mb::analytic_amplitudes(f, 0.0);
  CHECK(a0 == std::complex<double>(1.0, 0.0));
  CHECK(a1 == std::complex<double>(0.0, 0.0));
  const auto [b0, b1] = mb::analytic_amplitudes(f, 1.0);
  CHECK(std::norm(b0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(b1.real() == doctest::Approx(-0.5 * std::exp(-1.0)).epsilon(1e-15));
  CHECK_THROWS_AS(mb::analytic_amplitudes(f, -1.0), afc::DomainError);

  const auto p = MemoryParams::dimensionless(7.0);
  const auto s = ToothShape::gaussian(p, 1.2);
  const auto r = afc::efficiency(s, p);
  CHECK(std::norm(mb::analytic_amplitudes(r.fourier, p.length_L).second) == doctest::Approx(r.eta).epsilon(1e-14));
}

TEST_CASE("free propagation") {
  const auto p = MemoryParams::dimensionless(5.0);
  const auto rec = mb::solve_mb(ToothShape::constant(p, 0.0), p);
  CHECK(std::abs(rec.amplitudes[0] - 1.0) <= 1e-9);
  CHECK(std::abs(rec.amplitudes[1]) <= 1e-9);
  CHECK(rec.output_energy == doctest::Approx(rec.input_energy).epsilon(1e-9));
}

TEST_CASE("flat absorber decays as Beer-Lambert") {
  for (double od : {1.0, 4.0}) {
    const auto p = MemoryParams::dimensionless(od);
    const auto rec = mb::solve_mb(ToothShape::constant(p, p.alpha_max), p);
    CHECK(std::norm(rec.amplitudes[0]) == doctest::Approx(std::exp(-od)).epsilon(0.01));
    CHECK(std::abs(rec.amplitudes[1]) <= 1e-6);
    CHECK(rec.output_energy < rec.input_energy);
  }
}

TEST_CASE("optimal square comb at od 10") {
  const auto p = MemoryParams::dimensionless(10.0);
  const auto s = ToothShape::square(p, afc::optimal_square_width(10.0));
  const auto rec = mb::solve_mb(s, p);
  CHECK(rec.efficiency_sim == doctest::Approx(0.480894741738825568).epsilon(0.02));
  const auto [a0, a1] = mb::analytic_amplitudes(afc::fourier_pair(s, p), p.length_L);
  CHECK(std::abs(rec.amplitudes[1]) == doctest::Approx(std::abs(a1)).epsilon(0.02));
  CHECK(phase_gap(rec.amplitudes[1], a1) <= 0.05);
  CHECK(std::abs(rec.amplitudes[0]) == doctest::Approx(std::abs(a0)).epsilon(0.02));
  CHECK(std::abs(rec.amplitudes[0]) <= 1.0);
  CHECK(rec.output_energy < rec.input_energy);

  const auto summary = mb::summarize(rec, s, p);
  CHECK(summary.rel_error <= 0.02);
  const auto j = nlohmann::json::parse(mb::to_json(summary));
  for (const char* key : {"a0_re", "a0_im", "a1_re", "a1_im", "efficiency_sim", "efficiency_analytic", "rel_error"})
    CHECK(j.contains(key));
}

TEST_CASE("asymmetric tooth: modulus matches, phase is conjugated") {
  const auto p = MemoryParams::dimensionless(6.0);
  const double d = p.half_period();
  const auto s = ToothShape::square(p, 0.35 * d).shifted(0.3 * d);
  auto g = light_grid();
  g.teeth = 80;
  const auto rec = mb::solve_mb(s, p, g);
  const auto [a0, a1] = mb::analytic_amplitudes(afc::fourier_pair(s, p), p.length_L);
  CHECK(std::abs(rec.amplitudes[1]) == doctest::Approx(std::abs(a1)).epsilon(0.02));
  CHECK(phase_gap(rec.amplitudes[1], std::conj(a1)) <= 0.05);
}

TEST_CASE("self convergence for a smooth tooth") {
  const auto p = MemoryParams::dimensionless(8.0);
  const auto s = ToothShape::lorentzian(p, 0.9);
  auto g = light_grid();
  g.check_convergence = false;
  const auto coarse = mb::solve_mb(s, p, g);
  g.points_per_period *= 2;
  g.n_z *= 2;
  const auto fine = mb::solve_mb(s, p, g);
  CHECK(std::abs(fine.efficiency_sim - coarse.efficiency_sim) < 0.01 * fine.efficiency_sim);
  CHECK(fine.efficiency_sim == doctest::Approx(afc::efficiency(s, p).eta).epsilon(0.03));
}

TEST_CASE("coarse detuning grid is rejected") {
  const auto p = MemoryParams::dimensionless(15.0);
  const auto s = ToothShape::gaussian(p, 0.25);
  auto g = light_grid();
  g.points_per_period = 8;
  CHECK_THROWS_AS(mb::solve_mb(s, p, g), afc::GridTooCoarse);
}

TEST_CASE("homogeneous broadening lowers the echo") {
  auto p = MemoryParams::dimensionless(10.0);
  const auto s = ToothShape::square(p, afc::optimal_square_width(10.0));
  auto g = light_grid();
  g.check_convergence = false;
  double prev = 2.0;
  for (double gamma : {0.0, 0.01, 0.03, 0.1, 0.3}) {
    p.gamma = gamma;
    const auto rec = mb::solve_mb(s, p, g);
    CHECK(rec.efficiency_sim < prev);
    CHECK(rec.output_energy < rec.input_energy);
    prev = rec.efficiency_sim;
  }
}

TEST_CASE("grid validation") {
  auto g = light_grid();
  g.pulse_tau = 0.1;
  CHECK_THROWS_AS(g.validate(), afc::InvalidParams);
  g = light_grid();
  g.teeth = 10;
  CHECK_THROWS_AS(g.validate(), afc::InvalidParams);
  g = light_grid();
  g.samples_per_period = 16;
  CHECK_THROWS_AS(g.validate(), afc::InvalidParams);
}

TEST_CASE("echo extraction") {
  const double T = 1.0;
  const double tau = 0.05;
  std::vector<double> t;
  std::vector<std::complex<double>> y;
  for (int i = -40; i <= 200; ++i) {
    t.push_back(i * T / 64);
    y.push_back(0.8 * mb::input_pulse(t.back(), tau) + std::complex<double>(0.0, -0.3) * mb::input_pulse(t.back() - T, tau));
  }
  CHECK(std::abs(mb::extract_echo(t, y, tau, T, 0) - 0.8) <= 1e-12);
  CHECK(std::abs(mb::extract_echo(t, y, tau, T, 1) - std::complex<double>(0.0, -0.3)) <= 1e-12);
  CHECK_THROWS_AS(mb::extract_echo(t, y, tau, T, 3), afc::WindowError);
  const std::vector<double> late(t.begin() + 30, t.end());
  const std::vector<std::complex<double>> late_y(y.begin() + 30, y.end());
  CHECK_THROWS_AS(mb::extract_echo(late, late_y, tau, T, 0), afc::WindowError);
}

TEST_CASE("field export") {
  const auto p = MemoryParams::dimensionless(2.0);
  auto g = light_grid();
  g.check_convergence = false;
  const auto rec = mb::solve_mb(ToothShape::square(p, 0.8), p, g);
  std::ostringstream out;
  mb::write_field_csv(out, rec);
  const auto text = out.str();
  CHECK(text.rfind("t_s,re,im\n", 0) == 0);
  CHECK(rec.times.front() <= -4.0 * g.pulse_tau);
  CHECK(rec.times.back() >= 2.0 + 4.0 * g.pulse_tau);
  std::ostringstream again;
  mb::write_field_csv(again, mb::solve_mb(ToothShape::square(p, 0.8), p, g));
  CHECK(again.str() == text);
}
