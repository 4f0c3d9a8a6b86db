#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "afc/efficiency.hpp"

namespace afc {

enum class MapKind { EtaSquare, EtaLorentzian, EtaGaussian, DiffAbsL, DiffAbsG, DiffRelL, DiffRelG };

std::string_view to_string(MapKind kind);
/// Accepts the names produced by to_string; throws DomainError otherwise.
MapKind map_kind_from_string(std::string_view name);
bool is_eta_kind(MapKind kind);

/// Grid of values over (p, od). values[i_od * p_axis.size() + i_p].
struct EfficiencyMap {
  MapKind kind = MapKind::EtaSquare;
  std::vector<double> p_axis;
  std::vector<double> od_axis;
  std::vector<double> values;

  double at(std::size_t i_od, std::size_t i_p) const { return values[i_od * p_axis.size() + i_p]; }
  /// Axes strictly increasing and the grid sized to match; throws DomainError.
  void validate() const;
};

/// n evenly spaced points from a to b inclusive.
std::vector<double> linspace(double a, double b, std::size_t n);

/// max over p in [0, 2 pi] of eta_{L or G}(p, od), 0 at od == 0.
double best_family_efficiency(ToothFamily family, double od);

/// Evaluates one map; cells may be computed concurrently (threads = 0 uses all
/// cores). Output does not depend on the thread count.
EfficiencyMap build_map(MapKind kind, std::vector<double> p_axis, std::vector<double> od_axis,
                        unsigned threads = 0);

struct DifferenceMaps {
  EfficiencyMap abs_l;
  EfficiencyMap abs_g;
  EfficiencyMap rel_l;
  EfficiencyMap rel_g;
};

/// D = eta_S - max eta_{L/G}, R = D / max eta_{L/G}; the inner maximum is
/// computed once per od. R is 0 where the maximum vanishes (od == 0).
DifferenceMaps difference_maps(const std::vector<double>& p_axis, const std::vector<double>& od_axis,
                               unsigned threads = 0);

/// Long format with header `p,od,value`, od-major order.
void write_csv(const EfficiencyMap& map, std::ostream& out);
/// {"kind", "p_axis", "od_axis", "values"} with values as rows over od.
std::string to_json(const EfficiencyMap& map);
EfficiencyMap map_from_json(std::string_view text);

struct HeatmapOptions {
  double color_min = 0.0;
  double color_max = 0.54;
  /// Figure-style rendering: negative values are drawn as zero.
  bool figure_norm = false;
  int pixel_scale = 2;
};

/// Colour range used when the caller does not override it.
HeatmapOptions default_heatmap_options(MapKind kind, bool figure_norm);

/// Writes an RGB PNG (p along x, od increasing upwards). Values outside the
/// colour range are clamped in the image only.
void write_heatmap_png(const EfficiencyMap& map, const std::string& path, const HeatmapOptions& options);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

} // namespace afc
