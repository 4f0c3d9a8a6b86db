#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "afc/params.hpp"
#include "afc/shape.hpp"

namespace afc {

/// Reads `omega_rad_per_s,absorption_per_m` rows (strictly increasing omega).
/// Throws IoError on malformed input.
std::vector<Knot> read_knots_csv(std::istream& in);
void write_knots_csv(std::ostream& out, const std::vector<Knot>& knots);

/// Tabulated tooth from a CSV file; knots must span one period of params.
ToothShape load_tabulated_shape(const std::filesystem::path& path, const MemoryParams& params);
/// Writes the knots of a tabulated shape, or `n` uniform samples of any other shape.
void save_shape_csv(const std::filesystem::path& path, const ToothShape& shape, int n = kDefaultTabulatedKnots);

} // namespace afc
