#include "afc/efficiency_map.hpp"

#include <png.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>

#include <json.hpp>

#include "afc/errors.hpp"
#include "afc/parallel.hpp"

namespace afc {

namespace {

constexpr std::array<std::pair<MapKind, std::string_view>, 7> kKindNames = {{
    {MapKind::EtaSquare, "EtaSquare"},
    {MapKind::EtaLorentzian, "EtaLorentzian"},
    {MapKind::EtaGaussian, "EtaGaussian"},
    {MapKind::DiffAbsL, "DiffAbsL"},
    {MapKind::DiffAbsG, "DiffAbsG"},
    {MapKind::DiffRelL, "DiffRelL"},
    {MapKind::DiffRelG, "DiffRelG"},
}};

void check_axes(const std::vector<double>& p_axis, const std::vector<double>& od_axis) {
  if (p_axis.empty() || od_axis.empty())
    throw DomainError("map axes must not be empty");
  for (std::size_t i = 1; i < p_axis.size(); ++i)
    if (!(p_axis[i] > p_axis[i - 1]))
      throw DomainError("p axis must be strictly increasing");
  for (std::size_t i = 1; i < od_axis.size(); ++i)
    if (!(od_axis[i] > od_axis[i - 1]))
      throw DomainError("od axis must be strictly increasing");
  if (p_axis.front() < 0.0 || p_axis.back() > kTwoPi * (1.0 + 1e-12))
    throw DomainError("p axis must lie in [0, 2 pi]");
  if (od_axis.front() < 0.0)
    throw DomainError("od axis must be non-negative");
}

double difference(MapKind kind, double eta_s, double best) {
  const double d = eta_s - best;
  if (kind == MapKind::DiffAbsL || kind == MapKind::DiffAbsG)
    return d;
  return best > 0.0 ? d / best : 0.0;
}

ToothFamily rival_family(MapKind kind) {
  return (kind == MapKind::DiffAbsL || kind == MapKind::DiffRelL) ? ToothFamily::Lorentzian
                                                                   : ToothFamily::Gaussian;
}

std::array<unsigned char, 3> viridis(double t) {
  static constexpr std::array<std::array<double, 3>, 9> anchors = {{
      {68, 1, 84},
      {71, 44, 122},
      {59, 81, 139},
      {44, 113, 142},
      {33, 144, 141},
      {39, 173, 129},
      {92, 200, 99},
      {170, 220, 50},
      {253, 231, 37},
  }};
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * (anchors.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), anchors.size() - 2);
  const double f = x - i;
  std::array<unsigned char, 3> rgb{};
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<unsigned char>(std::lround(anchors[i][c] + f * (anchors[i + 1][c] - anchors[i][c])));
  return rgb;
}

} // namespace

std::string_view to_string(MapKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind)
      return name;
  return "unknown";
}

MapKind map_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name)
      return k;
  throw DomainError("unknown map kind: " + std::string(name));
}

bool is_eta_kind(MapKind kind) {
  return kind == MapKind::EtaSquare || kind == MapKind::EtaLorentzian || kind == MapKind::EtaGaussian;
}

void EfficiencyMap::validate() const {
  check_axes(p_axis, od_axis);
  if (values.size() != p_axis.size() * od_axis.size())
    throw DomainError("map values do not match the axes");
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n == 0)
    return {};
  if (n == 1)
    return {a};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

double best_family_efficiency(ToothFamily family, double od) {
  if (od == 0.0)
    return 0.0;
  return optimize_width(family, od).eta;
}

EfficiencyMap build_map(MapKind kind, std::vector<double> p_axis, std::vector<double> od_axis, unsigned threads) {
  check_axes(p_axis, od_axis);
  EfficiencyMap map{kind, std::move(p_axis), std::move(od_axis), {}};
  const std::size_t np = map.p_axis.size();
  const std::size_t nod = map.od_axis.size();
  map.values.assign(np * nod, 0.0);

  if (is_eta_kind(kind)) {
    const ToothFamily family = kind == MapKind::EtaSquare       ? ToothFamily::Square
                               : kind == MapKind::EtaLorentzian ? ToothFamily::Lorentzian
                                                                : ToothFamily::Gaussian;
    parallel_for(np * nod, threads, [&](std::size_t idx) {
      map.values[idx] = eta_family(family, map.p_axis[idx % np], map.od_axis[idx / np]);
    });
    return map;
  }

  std::vector<double> best(nod);
  parallel_for(nod, threads, [&](std::size_t i) { best[i] = best_family_efficiency(rival_family(kind), map.od_axis[i]); });
  parallel_for(np * nod, threads, [&](std::size_t idx) {
    const std::size_t i_od = idx / np;
    const double eta_s = eta_square(map.p_axis[idx % np], map.od_axis[i_od]);
    map.values[idx] = difference(kind, eta_s, best[i_od]);
  });
  return map;
}

DifferenceMaps difference_maps(const std::vector<double>& p_axis, const std::vector<double>& od_axis,
                               unsigned threads) {
  check_axes(p_axis, od_axis);
  const std::size_t np = p_axis.size();
  const std::size_t nod = od_axis.size();
  std::vector<double> best_l(nod);
  std::vector<double> best_g(nod);
  parallel_for(2 * nod, threads, [&](std::size_t i) {
    if (i < nod)
      best_l[i] = best_family_efficiency(ToothFamily::Lorentzian, od_axis[i]);
    else
      best_g[i - nod] = best_family_efficiency(ToothFamily::Gaussian, od_axis[i - nod]);
  });

  DifferenceMaps out{{MapKind::DiffAbsL, p_axis, od_axis, {}},
                     {MapKind::DiffAbsG, p_axis, od_axis, {}},
                     {MapKind::DiffRelL, p_axis, od_axis, {}},
                     {MapKind::DiffRelG, p_axis, od_axis, {}}};
  for (auto* m : {&out.abs_l, &out.abs_g, &out.rel_l, &out.rel_g})
    m->values.assign(np * nod, 0.0);
  for (std::size_t i_od = 0; i_od < nod; ++i_od) {
    for (std::size_t i_p = 0; i_p < np; ++i_p) {
      const std::size_t idx = i_od * np + i_p;
      const double eta_s = eta_square(p_axis[i_p], od_axis[i_od]);
      out.abs_l.values[idx] = difference(MapKind::DiffAbsL, eta_s, best_l[i_od]);
      out.abs_g.values[idx] = difference(MapKind::DiffAbsG, eta_s, best_g[i_od]);
      out.rel_l.values[idx] = difference(MapKind::DiffRelL, eta_s, best_l[i_od]);
      out.rel_g.values[idx] = difference(MapKind::DiffRelG, eta_s, best_g[i_od]);
    }
  }
  return out;
}

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

void write_csv(const EfficiencyMap& map, std::ostream& out) {
  map.validate();
  out << "p,od,value\n";
  const std::size_t np = map.p_axis.size();
  for (std::size_t i_od = 0; i_od < map.od_axis.size(); ++i_od) {
    for (std::size_t i_p = 0; i_p < np; ++i_p) {
      out << format_double(map.p_axis[i_p]) << ',' << format_double(map.od_axis[i_od]) << ','
          << format_double(map.values[i_od * np + i_p]) << '\n';
    }
  }
}

std::string to_json(const EfficiencyMap& map) {
  map.validate();
  nlohmann::json j;
  j["kind"] = std::string(to_string(map.kind));
  j["p_axis"] = map.p_axis;
  j["od_axis"] = map.od_axis;
  nlohmann::json rows = nlohmann::json::array();
  const std::size_t np = map.p_axis.size();
  for (std::size_t i_od = 0; i_od < map.od_axis.size(); ++i_od)
    rows.push_back(std::vector<double>(map.values.begin() + i_od * np, map.values.begin() + (i_od + 1) * np));
  j["values"] = std::move(rows);
  return j.dump();
}

EfficiencyMap map_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EfficiencyMap map;
    map.kind = map_kind_from_string(j.at("kind").get<std::string>());
    map.p_axis = j.at("p_axis").get<std::vector<double>>();
    map.od_axis = j.at("od_axis").get<std::vector<double>>();
    for (const auto& row : j.at("values")) {
      const auto r = row.get<std::vector<double>>();
      if (r.size() != map.p_axis.size())
        throw DomainError("map row length does not match the p axis");
      map.values.insert(map.values.end(), r.begin(), r.end());
    }
    map.validate();
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed map JSON: ") + e.what());
  }
}

HeatmapOptions default_heatmap_options(MapKind kind, bool figure_norm) {
  HeatmapOptions o;
  o.figure_norm = figure_norm;
  switch (kind) {
  case MapKind::EtaSquare:
  case MapKind::EtaLorentzian:
  case MapKind::EtaGaussian:
    o.color_min = 0.0;
    o.color_max = 0.54;
    break;
  case MapKind::DiffAbsL:
    o.color_max = 0.2;
    break;
  case MapKind::DiffAbsG:
    o.color_max = 0.08;
    break;
  case MapKind::DiffRelL:
    o.color_max = 2.0;
    break;
  case MapKind::DiffRelG:
    o.color_max = 0.5;
    break;
  }
  if (!is_eta_kind(kind))
    o.color_min = figure_norm ? 0.0 : -o.color_max;
  return o;
}

void write_heatmap_png(const EfficiencyMap& map, const std::string& path, const HeatmapOptions& options) {
  map.validate();
  if (!(options.color_max > options.color_min))
    throw DomainError("heatmap colour range is empty");
  const int scale = std::max(1, options.pixel_scale);
  const std::size_t np = map.p_axis.size();
  const std::size_t nod = map.od_axis.size();
  const auto width = static_cast<png_uint_32>(np * scale);
  const auto height = static_cast<png_uint_32>(nod * scale);

  std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!file)
    throw IoError("cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  std::vector<png_byte> row(static_cast<std::size_t>(width) * 3);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed while writing " + path);
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (png_uint_32 y = 0; y < height; ++y) {
    const std::size_t i_od = nod - 1 - y / scale;
    for (png_uint_32 x = 0; x < width; ++x) {
      double v = map.values[i_od * np + x / scale];
      if (options.figure_norm && v < 0.0)
        v = 0.0;
      const auto rgb = viridis((v - options.color_min) / (options.color_max - options.color_min));
      std::copy(rgb.begin(), rgb.end(), row.begin() + 3 * x);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

} // namespace afc
