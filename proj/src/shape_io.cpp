#include "afc/shape_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "afc/errors.hpp"

namespace afc {

namespace {

constexpr std::string_view kHeader = "omega_rad_per_s,absorption_per_m";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw IoError("line " + std::to_string(line) + ": cannot parse '" + std::string(s) + "'");
  return v;
}

} // namespace

std::vector<Knot> read_knots_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kHeader)
    throw IoError("expected header '" + std::string(kHeader) + "'");
  std::vector<Knot> knots;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    const auto row = trim(line);
    if (row.empty())
      continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw IoError("line " + std::to_string(number) + ": expected two columns");
    const Knot k{parse_double(row.substr(0, comma), number), parse_double(row.substr(comma + 1), number)};
    if (!knots.empty() && !(k.omega > knots.back().omega))
      throw IoError("line " + std::to_string(number) + ": omega must be strictly increasing");
    knots.push_back(k);
  }
  if (knots.size() < 2)
    throw IoError("need at least two knots");
  return knots;
}

void write_knots_csv(std::ostream& out, const std::vector<Knot>& knots) {
  out << kHeader << '\n';
  char buf[32];
  for (const auto& k : knots) {
    auto r = std::to_chars(buf, buf + sizeof buf, k.omega);
    out.write(buf, r.ptr - buf);
    out << ',';
    r = std::to_chars(buf, buf + sizeof buf, k.value);
    out.write(buf, r.ptr - buf);
    out << '\n';
  }
}

ToothShape load_tabulated_shape(const std::filesystem::path& path, const MemoryParams& params) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  return ToothShape::tabulated(params, read_knots_csv(in));
}

void save_shape_csv(const std::filesystem::path& path, const ToothShape& shape, int n) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write " + path.string());
  if (const auto* knots = shape.tabulated_knots())
    write_knots_csv(out, *knots);
  else
    write_knots_csv(out, tabulate(shape, n));
  if (!out)
    throw IoError("write failed for " + path.string());
}

} // namespace afc
