// afc: command-line front end for the AFC efficiency library.
//
// Exit codes: 0 ok, 2 invalid configuration, 3 numerical failure,
// 4 verification counterexample.

#include <CLI11.hpp>
#include <json.hpp>

#include "afc/efficiency.hpp"
#include "afc/efficiency_map.hpp"
#include "afc/errors.hpp"
#include "afc/mbsolver.hpp"
#include "afc/optimality.hpp"
#include "afc/params.hpp"
#include "afc/shape.hpp"
#include "afc/shape_io.hpp"
#include "afc/spectral.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCounterexample = 4;

struct ParamOptions {
  // dimensional
  std::optional<double> period_T, length_L, alpha_max, alpha_bg;
  double gamma = 0.0;
  // dimensionless
  std::optional<double> od, od_bg;
};

struct ShapeOptions {
  std::string family = "square";
  std::optional<double> p;     ///< Gamma T
  std::optional<double> width; ///< rad/s
  std::string file;
  std::optional<double> height;
};

struct KernelOptions {
  std::string kind = "none";
  std::optional<double> fwhm;    ///< rad/s
  std::optional<double> fwhm_pT; ///< fwhm * T
  std::string file;
  std::string mode = "exact";
};

struct OutputOptions {
  std::string out;
  std::string format = "json";
};

void warn(const std::string& msg) { std::cerr << "afc: warning: " << msg << '\n'; }

void add_param_options(CLI::App* cmd, ParamOptions& o) {
  cmd->add_option("--T", o.period_T, "storage time T, s")->check(CLI::PositiveNumber);
  cmd->add_option("--L", o.length_L, "medium length L, m");
  cmd->add_option("--alpha-max", o.alpha_max, "maximum absorption, 1/m");
  cmd->add_option("--alpha-bg", o.alpha_bg, "background absorption, 1/m");
  cmd->add_option("--gamma", o.gamma, "homogeneous half-width, rad/s (simulate only)");
  cmd->add_option("--od", o.od, "optical depth alpha_max L (overrides --alpha-max)");
  cmd->add_option("--od-bg", o.od_bg, "background optical depth alpha_bg L (overrides --alpha-bg)");
}

void add_shape_options(CLI::App* cmd, ShapeOptions& o) {
  cmd->add_option("--shape", o.family, "tooth shape")
      ->check(CLI::IsMember({"square", "lorentzian", "gaussian", "tabulated"}));
  cmd->add_option("--half-width-pT,--p", o.p,
                  "dimensionless width p = Gamma T (square half-width, Lorentzian/Gaussian FWHM)");
  cmd->add_option("--width", o.width, "tooth width Gamma, rad/s (same convention as p)");
  cmd->add_option("--height", o.height, "tooth height, 1/m (default alpha_max - alpha_bg)");
  cmd->add_option("--file", o.file, "tabulated tooth CSV (omega_rad_per_s,absorption_per_m)");
}

void add_kernel_options(CLI::App* cmd, KernelOptions& o) {
  cmd->add_option("--kernel", o.kind, "inhomogeneous line shape")
      ->check(CLI::IsMember({"none", "lorentzian", "gaussian", "tabulated"}));
  cmd->add_option("--kernel-fwhm", o.fwhm, "line FWHM, rad/s");
  cmd->add_option("--kernel-fwhm-pT", o.fwhm_pT, "line FWHM times T (overrides --kernel-fwhm)");
  cmd->add_option("--kernel-file", o.file, "tabulated line density CSV");
  cmd->add_option("--convolution", o.mode, "convolution treatment")
      ->check(CLI::IsMember({"exact", "scale"}));
}

void add_output_options(CLI::App* cmd, OutputOptions& o, std::vector<std::string> formats) {
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember(formats));
}

afc::MemoryParams resolve_params(const ParamOptions& o) {
  afc::MemoryParams p;
  if (o.period_T)
    p.period_T = *o.period_T;
  if (o.length_L)
    p.length_L = *o.length_L;
  if (o.alpha_max)
    p.alpha_max = *o.alpha_max;
  if (o.alpha_bg)
    p.alpha_bg = *o.alpha_bg;
  p.gamma = o.gamma;
  if (o.od) {
    if (o.alpha_max)
      warn("both --od and --alpha-max given; using --od");
    if (!(std::isfinite(*o.od) && *o.od >= 0.0))
      throw afc::InvalidParams("--od must be non-negative");
    if (*o.od == 0.0) {
      p.length_L = 0.0;
    } else {
      if (p.length_L == 0.0)
        throw afc::InvalidParams("--od > 0 needs a positive --L");
      p.alpha_max = *o.od / p.length_L;
    }
  }
  if (o.od_bg) {
    if (o.alpha_bg)
      warn("both --od-bg and --alpha-bg given; using --od-bg");
    if (!(std::isfinite(*o.od_bg) && *o.od_bg >= 0.0))
      throw afc::InvalidParams("--od-bg must be non-negative");
    if (p.length_L == 0.0 && *o.od_bg > 0.0)
      throw afc::InvalidParams("--od-bg > 0 needs a medium of positive length");
    p.alpha_bg = p.length_L > 0.0 ? *o.od_bg / p.length_L : 0.0;
  }
  p.validate();
  return p;
}

afc::ToothFamily family_from_string(const std::string& name) {
  if (name == "square")
    return afc::ToothFamily::Square;
  if (name == "lorentzian")
    return afc::ToothFamily::Lorentzian;
  if (name == "gaussian")
    return afc::ToothFamily::Gaussian;
  throw afc::InvalidParams("not a parametric tooth family: " + name);
}

double resolve_width(const ShapeOptions& o, const afc::MemoryParams& params) {
  if (o.p) {
    if (o.width)
      warn("both --half-width-pT and --width given; using --half-width-pT");
    return *o.p / params.period_T;
  }
  if (o.width)
    return *o.width;
  throw afc::InvalidParams("--shape " + o.family + " needs --half-width-pT or --width");
}

afc::ToothShape build_shape(const ShapeOptions& o, const afc::MemoryParams& params) {
  if (o.family == "tabulated") {
    if (o.file.empty())
      throw afc::InvalidParams("--shape tabulated needs --file");
    if (o.p || o.width)
      warn("width options are ignored for a tabulated shape");
    return afc::load_tabulated_shape(o.file, params);
  }
  if (!o.file.empty())
    warn("--file is ignored unless --shape tabulated");
  const double width = resolve_width(o, params);
  const double height = o.height.value_or(params.alpha_max - params.alpha_bg);
  if (o.family == "square")
    return afc::ToothShape::square(params, width, height);
  if (o.family == "lorentzian")
    return afc::ToothShape::lorentzian(params, width, height);
  return afc::ToothShape::gaussian(params, width, height);
}

std::optional<afc::LineShapeKernel> build_kernel(const KernelOptions& o, double period_T) {
  if (o.kind == "none") {
    if (o.fwhm || o.fwhm_pT || !o.file.empty())
      warn("kernel options are ignored without --kernel");
    return std::nullopt;
  }
  if (o.kind == "tabulated") {
    if (o.file.empty())
      throw afc::InvalidParams("--kernel tabulated needs --kernel-file");
    std::ifstream in(o.file);
    if (!in)
      throw afc::IoError("cannot open " + o.file);
    return afc::LineShapeKernel::tabulated_normalized(afc::read_knots_csv(in));
  }
  double fwhm = 0.0;
  if (o.fwhm_pT) {
    if (o.fwhm)
      warn("both --kernel-fwhm-pT and --kernel-fwhm given; using --kernel-fwhm-pT");
    fwhm = *o.fwhm_pT / period_T;
  } else if (o.fwhm) {
    fwhm = *o.fwhm;
  } else {
    throw afc::InvalidParams("--kernel " + o.kind + " needs --kernel-fwhm or --kernel-fwhm-pT");
  }
  return o.kind == "lorentzian" ? afc::LineShapeKernel::lorentzian(fwhm) : afc::LineShapeKernel::gaussian(fwhm);
}

afc::ConvolutionMode convolution_mode(const KernelOptions& o) {
  return o.mode == "scale" ? afc::ConvolutionMode::ScaleFactor : afc::ConvolutionMode::Exact;
}

// Writes to --out or stdout.
template <class F> void with_output(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw afc::IoError("cannot write " + path);
  write(out);
  if (!out)
    throw afc::IoError("write failed: " + path);
}

std::string csv_cell(const json& v) {
  if (v.is_number())
    return afc::format_double(v.get<double>());
  if (v.is_string())
    return v.get<std::string>();
  return v.dump();
}

// Flat object -> header line plus one row; nested objects use dotted keys.
void flatten(const json& obj, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  for (const auto& [k, v] : obj.items()) {
    if (v.is_object())
      flatten(v, prefix + k + ".", out);
    else
      out.emplace_back(prefix + k, v);
  }
}

void emit_record(const json& obj, const OutputOptions& o) {
  with_output(o.out, [&](std::ostream& os) {
    if (o.format == "csv") {
      std::vector<std::pair<std::string, json>> cells;
      flatten(obj, "", cells);
      for (std::size_t i = 0; i < cells.size(); ++i)
        os << (i ? "," : "") << cells[i].first;
      os << '\n';
      for (std::size_t i = 0; i < cells.size(); ++i)
        os << (i ? "," : "") << csv_cell(cells[i].second);
      os << '\n';
    } else {
      os << obj.dump(2) << '\n';
    }
  });
}

json fourier_json(const afc::FourierPair& f) {
  return {{"f0", f.f0},
          {"f_minus1_re", f.f_minus1.real()},
          {"f_minus1_im", f.f_minus1.imag()},
          {"f_minus1_modulus", std::abs(f.f_minus1)},
          {"f_minus1_phase", std::arg(f.f_minus1)}};
}

// ---------------------------------------------------------------- eval

struct EvalConfig {
  ParamOptions params;
  ShapeOptions shape;
  KernelOptions kernel;
  OutputOptions output;
};

int cmd_eval(const EvalConfig& c) {
  const auto params = resolve_params(c.params);
  const auto shape = build_shape(c.shape, params);
  const auto kernel = build_kernel(c.kernel, params.period_T);
  if (kernel)
    if (const auto w = kernel->width_warning(params.period_T))
      warn(*w);

  afc::EfficiencyResult r;
  if (kernel) {
    afc::MemoryParams clean = params;
    clean.alpha_bg = 0.0;
    r = afc::efficiency_convolved(shape, *kernel, clean, convolution_mode(c.kernel));
    if (params.alpha_bg > 0.0) {
      const double bg = std::exp(-params.background_optical_depth());
      r.eta *= bg;
      r.fourier.f0 += params.alpha_bg;
      if (r.components)
        r.components->background_factor = bg;
    }
  } else if (params.alpha_bg > 0.0) {
    r = afc::efficiency_with_background(shape, params);
  } else {
    r = afc::efficiency(shape, params);
  }

  json out;
  out["shape"] = c.shape.family;
  out["T"] = params.period_T;
  out["L"] = params.length_L;
  out["alpha_max"] = params.alpha_max;
  out["alpha_bg"] = params.alpha_bg;
  out["od"] = params.optical_depth();
  out["eta"] = r.eta;
  out.update(fourier_json(r.fourier));
  if (r.components) {
    out["components"] = {{"eta_ideal", r.components->eta_ideal},
                         {"background_factor", r.components->background_factor},
                         {"linewidth_factor", r.components->linewidth_factor}};
  }
  emit_record(out, c.output);
  return kExitOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeConfig {
  std::string family = "square";
  double od = 0.0;
  double od_bg = 0.0;
  KernelOptions kernel;
  OutputOptions output;
};

int cmd_optimize(const OptimizeConfig& c) {
  if (!(std::isfinite(c.od) && c.od >= 0.0))
    throw afc::InvalidParams("--od must be non-negative");
  if (!(std::isfinite(c.od_bg) && c.od_bg >= 0.0 && (c.od_bg < c.od || c.od_bg == 0.0)))
    throw afc::InvalidParams("--od-bg must satisfy 0 <= od_bg < od");
  const auto family = family_from_string(c.family);
  // tooth optical depth above the background
  const double od_tooth = c.od - c.od_bg;
  const auto kernel = build_kernel(c.kernel, 1.0);
  const afc::WidthOptimum w = kernel ? afc::optimize_width_with_linewidth(family, od_tooth, *kernel,
                                                                          convolution_mode(c.kernel))
                                     : afc::optimize_width(family, od_tooth);
  const double bg = std::exp(-c.od_bg);
  json out;
  out["shape"] = c.family;
  out["od"] = c.od;
  out["od_bg"] = c.od_bg;
  out["p_opt"] = w.p;
  out["eta_opt"] = w.eta * bg;
  if (c.od_bg > 0.0)
    out["eta_opt_without_background"] = w.eta;
  emit_record(out, c.output);
  return kExitOk;
}

// ---------------------------------------------------------------- map

struct MapConfig {
  double p_min = 0.0, p_max = 2.0 * afc::kPi;
  double od_min = 0.0, od_max = 20.0;
  std::size_t p_steps = 200, od_steps = 200;
  std::vector<std::string> kinds;
  bool differences = false;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string png;
  bool figure_norm = false;
  unsigned threads = 0;
};

int cmd_map(const MapConfig& c) {
  if (c.p_steps < 2 || c.od_steps < 2)
    throw afc::InvalidParams("--p-steps and --od-steps must be at least 2");
  const auto p_axis = afc::linspace(c.p_min, c.p_max, c.p_steps);
  const auto od_axis = afc::linspace(c.od_min, c.od_max, c.od_steps);

  std::vector<afc::MapKind> kinds;
  if (c.kinds.empty()) {
    kinds = {afc::MapKind::EtaSquare, afc::MapKind::EtaLorentzian, afc::MapKind::EtaGaussian};
    if (c.differences)
      kinds.insert(kinds.end(), {afc::MapKind::DiffAbsL, afc::MapKind::DiffAbsG, afc::MapKind::DiffRelL,
                                 afc::MapKind::DiffRelG});
  } else {
    for (const auto& k : c.kinds)
      kinds.push_back(afc::map_kind_from_string(k));
  }

  std::vector<afc::EfficiencyMap> maps;
  std::optional<afc::DifferenceMaps> diff;
  for (const auto kind : kinds) {
    if (afc::is_eta_kind(kind)) {
      maps.push_back(afc::build_map(kind, p_axis, od_axis, c.threads));
      continue;
    }
    if (!diff)
      diff = afc::difference_maps(p_axis, od_axis, c.threads);
    switch (kind) {
    case afc::MapKind::DiffAbsL: maps.push_back(diff->abs_l); break;
    case afc::MapKind::DiffAbsG: maps.push_back(diff->abs_g); break;
    case afc::MapKind::DiffRelL: maps.push_back(diff->rel_l); break;
    default: maps.push_back(diff->rel_g); break;
    }
  }

  const std::filesystem::path dir(c.out_dir);
  std::filesystem::create_directories(dir);
  const bool images_only = c.format == "png";
  if (images_only && c.png.empty())
    warn("--format png writes images into --out-dir");
  const std::filesystem::path png_dir = !c.png.empty() ? std::filesystem::path(c.png) : dir;
  if (images_only || !c.png.empty())
    std::filesystem::create_directories(png_dir);

  json index = json::array();
  for (const auto& m : maps) {
    const std::string name(afc::to_string(m.kind));
    json entry{{"kind", name}};
    if (!images_only) {
      const auto path = dir / (name + (c.format == "json" ? ".json" : ".csv"));
      with_output(path.string(), [&](std::ostream& os) {
        if (c.format == "json")
          os << afc::to_json(m) << '\n';
        else
          afc::write_csv(m, os);
      });
      entry["data"] = path.string();
    }
    if (images_only || !c.png.empty()) {
      const auto path = png_dir / (name + ".png");
      afc::write_heatmap_png(m, path.string(), afc::default_heatmap_options(m.kind, c.figure_norm));
      entry["image"] = path.string();
    }
    double lo = m.values.front(), hi = m.values.front();
    for (const double v : m.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    entry["min"] = lo;
    entry["max"] = hi;
    index.push_back(entry);
  }
  std::cout << index.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- compare

struct CompareConfig {
  double od = 10.0;
  std::optional<double> p;
  ParamOptions params;
  ShapeOptions shape;
  bool dominance = false;
  OutputOptions output;
};

int cmd_compare(const CompareConfig& c) {
  if (!(std::isfinite(c.od) && c.od >= 0.0))
    throw afc::InvalidParams("--od must be non-negative");
  json out;
  out["od"] = c.od;
  json families;
  for (const auto* name : {"square", "lorentzian", "gaussian"}) {
    const auto w = afc::optimize_width(family_from_string(name), c.od);
    families[name] = {{"p_opt", w.p}, {"eta_opt", w.eta}};
  }
  out["optima"] = families;
  if (c.p) {
    const double p = *c.p;
    const double es = afc::eta_square(p, c.od);
    const double bl = afc::best_family_efficiency(afc::ToothFamily::Lorentzian, c.od);
    const double bg = afc::best_family_efficiency(afc::ToothFamily::Gaussian, c.od);
    out["p"] = p;
    out["eta_square"] = es;
    out["D_L"] = es - bl;
    out["D_G"] = es - bg;
    out["R_L"] = bl > 0.0 ? (es - bl) / bl : 0.0;
    out["R_G"] = bg > 0.0 ? (es - bg) / bg : 0.0;
  }
  if (c.dominance) {
    const auto params = resolve_params(c.params);
    const auto shape = build_shape(c.shape, params);
    const auto r = afc::square_dominance_check(shape, params);
    out["dominance"] = {{"shape", c.shape.family},
                        {"area", r.matched_area},
                        {"shape_fm1", r.shape_fm1_modulus},
                        {"square_fm1", r.square_fm1_modulus},
                        {"margin", r.margin},
                        {"pass", r.pass}};
  }
  emit_record(out, c.output);
  if (c.dominance && !out["dominance"]["pass"].get<bool>())
    return kExitCounterexample;
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyConfig {
  std::uint64_t first_seed = 0;
  std::size_t count = 1000;
  bool symmetric = false;
  bool lemma2 = false;
  bool general = false;
  std::size_t lemma2_widths = 20;
  ParamOptions params;
  std::string out;
  unsigned threads = 0;
};

int cmd_verify(const VerifyConfig& c) {
  if (c.count == 0)
    throw afc::InvalidParams("--count must be positive");
  const auto params = resolve_params(c.params);
  bool all_pass = true;
  std::ostringstream report;

  if (c.symmetric) {
    for (std::size_t i = 0; i < c.count; ++i) {
      for (const bool wide : {false, true}) {
        const auto dc = afc::dominance_case(c.first_seed + i, params, true, wide);
        const auto r = afc::run_dominance_case(dc, params);
        all_pass = all_pass && r.pass;
        report << afc::to_json_line(r) << '\n';
      }
    }
  } else {
    for (const auto& r : afc::verify_dominance_batch(c.first_seed, c.count, params, c.threads)) {
      all_pass = all_pass && r.pass;
      report << afc::to_json_line(r) << '\n';
    }
  }

  if (c.lemma2) {
    const double delta = params.half_period();
    for (std::size_t i = 1; i <= c.lemma2_widths; ++i) {
      const double half_width = delta * static_cast<double>(i) / static_cast<double>(c.lemma2_widths + 1);
      const double best = afc::lemma2_center_scan(half_width, params);
      const bool pass = best == 0.0;
      all_pass = all_pass && pass;
      json line{{"check", "lemma2"}, {"half_width", half_width}, {"argmax_center", best}, {"pass", pass}};
      report << line.dump() << '\n';
    }
  }

  if (c.general) {
    for (const auto& spec : {afc::afc_functional_spec(), afc::linear_kernel_spec(), afc::constant_kernel_spec()}) {
      const auto r = afc::generalized_optimality_check(spec, c.count, c.first_seed);
      all_pass = all_pass && r.pass;
      report << json::parse(afc::to_json(r)).dump() << '\n';
    }
  }

  with_output(c.out, [&](std::ostream& os) { os << report.str(); });
  return all_pass ? kExitOk : kExitCounterexample;
}

// ---------------------------------------------------------------- simulate

struct SimulateConfig {
  ParamOptions params;
  ShapeOptions shape;
  afc::mb::SimGrid grid;
  bool no_check = false;
  bool no_tails = false;
  std::string field;
  std::string summary;
};

int cmd_simulate(SimulateConfig c) {
  const auto params = resolve_params(c.params);
  const auto shape = build_shape(c.shape, params);
  c.grid.check_convergence = !c.no_check;
  c.grid.mean_tails = !c.no_tails;
  const auto record = afc::mb::solve_mb(shape, params, c.grid);
  const auto s = afc::mb::summarize(record, shape, params);
  if (!c.field.empty())
    with_output(c.field, [&](std::ostream& os) { afc::mb::write_field_csv(os, record); });
  json out = json::parse(afc::mb::to_json(s));
  out["input_energy"] = record.input_energy;
  out["output_energy"] = record.output_energy;
  out["grid"] = {{"n_z", c.grid.n_z},
                 {"teeth", c.grid.teeth},
                 {"points_per_period", c.grid.points_per_period},
                 {"samples_per_period", c.grid.samples_per_period},
                 {"window_periods", c.grid.window_periods},
                 {"pulse_tau", c.grid.pulse_tau}};
  with_output(c.summary, [&](std::ostream& os) { os << out.dump(2) << '\n'; });
  return kExitOk;
}

int exit_code_for(const afc::Error& e) {
  if (dynamic_cast<const afc::QuadratureFailure*>(&e) || dynamic_cast<const afc::DegenerateShape*>(&e) ||
      dynamic_cast<const afc::OptimizationFailure*>(&e) || dynamic_cast<const afc::GridTooCoarse*>(&e) ||
      dynamic_cast<const afc::WindowError*>(&e))
    return kExitNumeric;
  return kExitConfig;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"AFC quantum-memory retrieval efficiency"};
  app.require_subcommand(1);

  EvalConfig eval;
  auto* eval_cmd = app.add_subcommand("eval", "efficiency of one tooth shape");
  add_param_options(eval_cmd, eval.params);
  add_shape_options(eval_cmd, eval.shape);
  add_kernel_options(eval_cmd, eval.kernel);
  add_output_options(eval_cmd, eval.output, {"json", "csv"});

  OptimizeConfig opt;
  auto* opt_cmd = app.add_subcommand("optimize", "optimal width of a tooth family at fixed optical depth");
  opt_cmd->add_option("--shape", opt.family, "tooth family")
      ->check(CLI::IsMember({"square", "lorentzian", "gaussian"}));
  opt_cmd->add_option("--od", opt.od, "optical depth")->required();
  opt_cmd->add_option("--od-bg", opt.od_bg, "background optical depth");
  add_kernel_options(opt_cmd, opt.kernel);
  add_output_options(opt_cmd, opt.output, {"json", "csv"});

  MapConfig map;
  auto* map_cmd = app.add_subcommand("map", "efficiency maps over width p and optical depth");
  map_cmd->add_option("--p-min", map.p_min);
  map_cmd->add_option("--p-max", map.p_max);
  map_cmd->add_option("--p-steps", map.p_steps);
  map_cmd->add_option("--od-min", map.od_min);
  map_cmd->add_option("--od-max", map.od_max);
  map_cmd->add_option("--od-steps", map.od_steps);
  map_cmd->add_option("--kind", map.kinds, "map kinds (default: the three Eta maps)")
      ->check(CLI::IsMember({"EtaSquare", "EtaLorentzian", "EtaGaussian", "DiffAbsL", "DiffAbsG", "DiffRelL",
                             "DiffRelG"}));
  map_cmd->add_flag("--differences", map.differences, "also emit DiffAbsL/G and DiffRelL/G");
  map_cmd->add_option("--out-dir", map.out_dir, "directory for <kind>.csv or <kind>.json");
  map_cmd->add_option("--format", map.format)->check(CLI::IsMember({"csv", "json", "png"}));
  map_cmd->add_option("--png", map.png, "directory for <kind>.png heatmaps");
  map_cmd->add_flag("--figure-norm", map.figure_norm, "clip negative values to zero in images");
  map_cmd->add_option("--threads", map.threads, "worker threads (0: all cores)");

  CompareConfig cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "square versus Lorentzian/Gaussian teeth");
  cmp_cmd->add_option("--od", cmp.od, "optical depth for the family comparison");
  cmp_cmd->add_option("--p", cmp.p, "square width p for D and R");
  cmp_cmd->add_flag("--dominance", cmp.dominance, "check a shape against the equal-area square");
  auto* dom_group = cmp_cmd->add_option_group("dominance shape");
  dom_group->add_option("--shape", cmp.shape.family)
      ->check(CLI::IsMember({"square", "lorentzian", "gaussian", "tabulated"}));
  dom_group->add_option("--half-width-pT", cmp.shape.p);
  dom_group->add_option("--width", cmp.shape.width);
  dom_group->add_option("--height", cmp.shape.height);
  dom_group->add_option("--file", cmp.shape.file);
  dom_group->add_option("--T", cmp.params.period_T);
  dom_group->add_option("--L", cmp.params.length_L);
  dom_group->add_option("--alpha-max", cmp.params.alpha_max);
  add_output_options(cmp_cmd, cmp.output, {"json", "csv"});

  VerifyConfig ver;
  auto* ver_cmd = app.add_subcommand("verify", "numerical optimality checks, JSON lines");
  ver_cmd->add_option("--seed,--first-seed", ver.first_seed, "first seed");
  ver_cmd->add_option("--count", ver.count, "number of seeds (and samples for --general)");
  ver_cmd->add_flag("--symmetric", ver.symmetric, "symmetric shapes, both finesse regimes per seed");
  ver_cmd->add_flag("--lemma2", ver.lemma2, "also scan the square centre");
  ver_cmd->add_option("--lemma2-widths", ver.lemma2_widths, "widths in the centre scan");
  ver_cmd->add_flag("--general", ver.general, "also run the general functional checks");
  ver_cmd->add_option("--T", ver.params.period_T);
  ver_cmd->add_option("--alpha-max", ver.params.alpha_max);
  ver_cmd->add_option("--out", ver.out, "report file (default stdout)");
  ver_cmd->add_option("--threads", ver.threads, "worker threads (0: all cores)");

  SimulateConfig sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Maxwell-Bloch echo simulation");
  add_param_options(sim_cmd, sim.params);
  add_shape_options(sim_cmd, sim.shape);
  sim_cmd->add_option("--n-z", sim.grid.n_z);
  sim_cmd->add_option("--teeth", sim.grid.teeth);
  sim_cmd->add_option("--points-per-period", sim.grid.points_per_period);
  sim_cmd->add_option("--samples-per-period", sim.grid.samples_per_period);
  sim_cmd->add_option("--window-periods", sim.grid.window_periods);
  sim_cmd->add_option("--tau", sim.grid.pulse_tau, "pulse duration tau / T");
  sim_cmd->add_flag("--no-convergence-check", sim.no_check);
  sim_cmd->add_flag("--no-mean-tails", sim.no_tails);
  sim_cmd->add_option("--field", sim.field, "field CSV (t_s,re,im)");
  sim_cmd->add_option("--summary", sim.summary, "summary JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*eval_cmd)
      return cmd_eval(eval);
    if (*opt_cmd)
      return cmd_optimize(opt);
    if (*map_cmd)
      return cmd_map(map);
    if (*cmp_cmd)
      return cmd_compare(cmp);
    if (*ver_cmd)
      return cmd_verify(ver);
    return cmd_simulate(sim);
  } catch (const afc::Error& e) {
    std::cerr << "afc: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "afc: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "afc: " << e.what() << '\n';
    return kExitNumeric;
  }
}
