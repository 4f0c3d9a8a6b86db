#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "afc/efficiency.hpp"
#include "afc/errors.hpp"
#include "afc/optimality.hpp"
#include "afc/shape_io.hpp"

using afc::MemoryParams;
using afc::ToothShape;

namespace {

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "afc_shape_io_test";
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace

TEST_CASE("export then import keeps the efficiency") {
  MemoryParams p;
  p.period_T = 1e-6;
  p.length_L = 0.01;
  p.alpha_max = 2000.0;
  const auto dir = scratch_dir();
  const double d = p.half_period();
  const ToothShape shapes[] = {
      afc::random_bounded_shape(17, 0.35 * p.alpha_max * 2.0 * d, p.alpha_max, 97, false, p),
      ToothShape::gaussian(p, 0.4 * d),
  };
  int k = 0;
  for (const auto& s : shapes) {
    const auto path = dir / ("shape" + std::to_string(k++) + ".csv");
    afc::save_shape_csv(path, s, 512);
    const auto back = afc::load_tabulated_shape(path, p);
    const auto* knots = s.tabulated_knots();
    const double eta_back = afc::efficiency(back, p).eta;
    const double eta_ref = afc::efficiency(knots ? s : ToothShape::tabulated(p, afc::tabulate(s, 512)), p).eta;
    CHECK(std::abs(eta_back - eta_ref) <= 1e-12 * eta_ref);
    afc::save_shape_csv(dir / "again.csv", back);
    std::ifstream a(path), b(dir / "again.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv parsing") {
  std::istringstream good("omega_rad_per_s,absorption_per_m\r\n-1,0\n0, 2.5\n\n1,0\n");
  const auto knots = afc::read_knots_csv(good);
  REQUIRE(knots.size() == 3);
  CHECK(knots[1].value == 2.5);

  std::istringstream bad_header("omega,alpha\n-1,0\n1,0\n");
  CHECK_THROWS_AS(afc::read_knots_csv(bad_header), afc::IoError);
  std::istringstream bad_order("omega_rad_per_s,absorption_per_m\n-1,0\n1,0\n0.5,0\n");
  CHECK_THROWS_AS(afc::read_knots_csv(bad_order), afc::IoError);
  std::istringstream bad_number("omega_rad_per_s,absorption_per_m\n-1,0\n1,x\n");
  CHECK_THROWS_AS(afc::read_knots_csv(bad_number), afc::IoError);
  std::istringstream extra("omega_rad_per_s,absorption_per_m\n-1,0,3\n1,0\n");
  CHECK_THROWS_AS(afc::read_knots_csv(extra), afc::IoError);
  CHECK_THROWS_AS(afc::load_tabulated_shape("/nonexistent/comb.csv", MemoryParams{}), afc::IoError);
}
