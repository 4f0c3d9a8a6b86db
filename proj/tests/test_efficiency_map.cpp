#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "afc/efficiency.hpp"
#include "afc/efficiency_map.hpp"
#include "afc/errors.hpp"

using afc::kPi;
using afc::MapKind;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST_CASE("csv layout") {
  const auto p_axis = afc::linspace(0.0, 2.0 * kPi, 20);
  const auto od_axis = afc::linspace(0.0, 20.0, 15);
  const auto m = afc::build_map(MapKind::EtaSquare, p_axis, od_axis, 2);
  std::ostringstream out;
  afc::write_csv(m, out);
  const auto text = out.str();
  CHECK(text.rfind("p,od,value\n", 0) == 0);
  CHECK(count_lines(text) == 1 + 20 * 15);
  CHECK(m.at(3, 7) == doctest::Approx(afc::eta_square(p_axis[7], od_axis[3])).epsilon(1e-15));
}

TEST_CASE("json round trip") {
  const auto m = afc::build_map(MapKind::EtaGaussian, afc::linspace(0.1, 6.0, 7), afc::linspace(1.0, 9.0, 5), 1);
  const auto back = afc::map_from_json(afc::to_json(m));
  CHECK(back.kind == m.kind);
  CHECK(back.p_axis == m.p_axis);
  CHECK(back.od_axis == m.od_axis);
  CHECK(back.values == m.values);
  CHECK(afc::to_json(back) == afc::to_json(m));
}

TEST_CASE("axis validation") {
  CHECK_THROWS_AS(afc::build_map(MapKind::EtaSquare, {0.0, 0.5, 0.5}, {1.0}), afc::DomainError);
  CHECK_THROWS_AS(afc::build_map(MapKind::EtaSquare, {0.0, 7.0}, {1.0}), afc::DomainError);
  CHECK_THROWS_AS(afc::build_map(MapKind::EtaSquare, {0.0, 1.0}, {-1.0, 1.0}), afc::DomainError);
  CHECK_THROWS_AS(afc::map_kind_from_string("EtaSquared"), afc::DomainError);
  CHECK(afc::map_kind_from_string("DiffRelG") == MapKind::DiffRelG);
}

TEST_CASE("eta maps stay under the forward limit") {
  const auto p_axis = afc::linspace(0.0, 2.0 * kPi, 60);
  const auto od_axis = afc::linspace(0.0, 20.0, 60);
  for (auto kind : {MapKind::EtaSquare, MapKind::EtaLorentzian, MapKind::EtaGaussian}) {
    const auto m = afc::build_map(kind, p_axis, od_axis);
    const double top = *std::max_element(m.values.begin(), m.values.end());
    const double bottom = *std::min_element(m.values.begin(), m.values.end());
    CHECK(top <= 0.54);
    CHECK(bottom >= 0.0);
  }
}

TEST_CASE("difference maps") {
  std::vector<double> p_axis{0.0};
  for (double od : {5.0, 10.0, 20.0})
    p_axis.push_back(afc::optimal_square_width(od));
  std::sort(p_axis.begin(), p_axis.end());
  const std::vector<double> od_axis{5.0, 10.0, 20.0};
  const auto d = afc::difference_maps(p_axis, od_axis);
  // Reference gaps at the square optimum, 30-digit arithmetic.
  const double ref_l[] = {0.177043526911692, 0.172412171563232, 0.121233901292148};
  const double ref_g[] = {0.0687172940136399, 0.0402409923967378, 0.014110873920783};
  for (std::size_t j = 0; j < od_axis.size(); ++j) {
    const auto i = static_cast<std::size_t>(
        std::find(p_axis.begin(), p_axis.end(), afc::optimal_square_width(od_axis[j])) - p_axis.begin());
    CHECK(d.abs_l.at(j, i) > 0.0);
    CHECK(d.abs_g.at(j, i) > 0.0);
    CHECK(d.abs_l.at(j, i) == doctest::Approx(ref_l[j]).epsilon(1e-8));
    CHECK(d.abs_g.at(j, i) == doctest::Approx(ref_g[j]).epsilon(1e-8));
    CHECK(d.abs_l.at(j, 0) < 0.0);
    CHECK(d.abs_g.at(j, 0) < 0.0);
    const double best_l = afc::best_family_efficiency(afc::ToothFamily::Lorentzian, od_axis[j]);
    CHECK(d.rel_l.at(j, i) == doctest::Approx(d.abs_l.at(j, i) / best_l).epsilon(1e-14));
  }
}

TEST_CASE("parallel evaluation is bit identical") {
  const auto p_axis = afc::linspace(0.0, 2.0 * kPi, 17);
  const auto od_axis = afc::linspace(0.0, 20.0, 13);
  const auto a = afc::difference_maps(p_axis, od_axis, 1);
  const auto b = afc::difference_maps(p_axis, od_axis, 8);
  CHECK(a.abs_l.values == b.abs_l.values);
  CHECK(a.rel_g.values == b.rel_g.values);
  const auto c = afc::build_map(MapKind::EtaLorentzian, p_axis, od_axis, 1);
  const auto e = afc::build_map(MapKind::EtaLorentzian, p_axis, od_axis, 5);
  CHECK(c.values == e.values);
}

TEST_CASE("heatmap export clamps only the image") {
  const auto dir = std::filesystem::temp_directory_path() / "afc_map_test";
  std::filesystem::create_directories(dir);
  const auto m = afc::difference_maps(afc::linspace(0.0, 2.0 * kPi, 30), afc::linspace(0.0, 20.0, 30)).rel_g;
  const double top = *std::max_element(m.values.begin(), m.values.end());
  const auto options = afc::default_heatmap_options(MapKind::DiffRelG, true);
  CHECK(top > options.color_max);
  const auto before = m.values;
  const auto path = (dir / "rel_g.png").string();
  afc::write_heatmap_png(m, path, options);
  CHECK(m.values == before);
  std::ifstream in(path, std::ios::binary);
  char sig[8] = {};
  in.read(sig, 8);
  CHECK(std::string(sig + 1, 3) == "PNG");
  CHECK(std::filesystem::file_size(path) > 100);
  std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting round trips") {
  for (double x : {0.1, 1.0 / 3.0, 2.0 * kPi, 1e-300, 0.0, -0.25})
    CHECK(std::stod(afc::format_double(x)) == x);
}
