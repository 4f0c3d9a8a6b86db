#include "afc/mbsolver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <ostream>

#include <fftw3.h>
#include <json.hpp>

#include "afc/efficiency.hpp"
#include "afc/errors.hpp"
#include "afc/parallel.hpp"

namespace afc::mb {

namespace {

constexpr double kRegularization = 1e-6; // eps in units of the comb period 2 pi / T
constexpr double kEchoHalfWindow = 4.0;   // in units of tau
constexpr double kWindowLead = 8.0;       // FFT window starts at -8 T
constexpr double kWrapDecay = 20.0;       // exp(-sigma * window) for wrapped echoes

// log(1 + w) without cancellation for small |w|.
cplx log1p_c(cplx w) {
  const double re = 0.5 * std::log1p(2.0 * w.real() + std::norm(w));
  return {re, std::atan2(w.imag(), 1.0 + w.real())};
}

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
    if (!data)
      throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

void run_fft(std::vector<cplx>& v, int sign) {
  const auto n = v.size();
  FftwBuffer buf(n);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_plan_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), buf.data, buf.data, sign, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < n; ++i) {
    buf.data[i][0] = v[i].real();
    buf.data[i][1] = v[i].imag();
  }
  fftw_execute(plan);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = {buf.data[i][0], buf.data[i][1]};
  std::lock_guard lock(fftw_plan_mutex());
  fftw_destroy_plan(plan);
}

} // namespace

void SimGrid::validate() const {
  if (n_z < 1 || teeth < 1 || points_per_period < 1 || samples_per_period < 8 || window_periods < 4)
    throw InvalidParams("simulation grid sizes must be positive (samples_per_period >= 8, window >= 4 T)");
  if (!(pulse_tau > 0.0))
    throw InvalidParams("pulse_tau must be positive");
  // FWHM of the pulse power spectrum exp(-w^2 tau^2), in comb periods.
  const double spectral_periods = 2.0 * std::sqrt(std::log(2.0)) / (pulse_tau * kTwoPi);
  if (spectral_periods < 5.0)
    throw InvalidParams("pulse spectrum must cover at least 5 comb periods (tau <= 0.053 T)");
  if (teeth < 3.0 * spectral_periods)
    throw InvalidParams("detuning grid must span at least 3 pulse bandwidths");
  if (samples_per_period * kPi * pulse_tau < 8.0)
    throw InvalidParams("time step too coarse for the pulse bandwidth");
  if (window_periods * 1.0 < kWindowLead + 2.0 + 2.0 * kEchoHalfWindow * pulse_tau)
    throw InvalidParams("FFT window too short for the echo train");
}

cplx input_pulse(double t, double tau) { return std::exp(-0.5 * (t / tau) * (t / tau)); }

CombPropagator::CombPropagator(const ToothShape& shape, const MemoryParams& params, const SimGrid& grid,
                               double laplace_shift)
    : damping_(params.gamma + kRegularization * params.comb_period() + laplace_shift), length_(params.length_L),
      n_z_(grid.n_z) {
  params.validate();
  grid.validate();
  if (shape.period_T() != params.period_T)
    throw InvalidShape("shape period does not match params");
  const double delta = params.half_period();
  const double period = params.comb_period();

  std::vector<double> xs = shape.breakpoints();
  for (int i = 0; i <= grid.points_per_period; ++i)
    xs.push_back(-delta + 2.0 * delta * i / grid.points_per_period);
  std::sort(xs.begin(), xs.end());
  const double merge_tol = 1e-12 * period;
  std::vector<double> nodes;
  for (double x : xs) {
    if (nodes.empty() || x - nodes.back() > merge_tol)
      nodes.push_back(x);
  }
  nodes.back() = delta;

  std::vector<Segment> local;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i];
    const double b = nodes[i + 1];
    const double nudge = 1e-9 * (b - a);
    const double va = shape(a + nudge);
    const double vb = shape(b - nudge);
    const double slope = (vb - va) / (b - a - 2.0 * nudge);
    local.push_back({a, b, va - slope * nudge, slope});
  }

  const int k_lo = -grid.teeth / 2;
  const int k_hi = k_lo + grid.teeth - 1;
  const double scale = std::max(params.alpha_max, 1e-300);
  for (int k = k_lo; k <= k_hi; ++k) {
    const double c = k * period;
    for (const auto& s : local) {
      Segment seg{s.w0 + c, s.w1 + c, s.v0, s.slope};
      if (!segments_.empty()) {
        auto& prev = segments_.back();
        const double prev_end = prev.v0 + prev.slope * (prev.w1 - prev.w0);
        const double width = seg.w1 - prev.w0;
        if (std::abs(prev_end - seg.v0) <= 1e-12 * scale &&
            std::abs(prev.slope - seg.slope) * width <= 1e-12 * scale) {
          prev.w1 = seg.w1;
          continue;
        }
      }
      segments_.push_back(seg);
    }
  }
  band_lo_ = (k_lo - 0.5) * period;
  band_hi_ = (k_hi + 0.5) * period;
  if (grid.mean_tails)
    tail_level_ = area(shape, params) / period;
  std::erase_if(segments_, [](const Segment& s) { return s.v0 == 0.0 && s.slope == 0.0; });
}

cplx CombPropagator::susceptibility(double omega_tilde) const {
  const cplx i1{0.0, 1.0};
  cplx sum{0.0, 0.0};
  for (const auto& s : segments_) {
    const double dw = s.w1 - s.w0;
    const cplx z0{damping_, omega_tilde + s.w0};
    const cplx log_ratio = log1p_c(i1 * dw / z0);
    sum += -i1 * (s.v0 + i1 * s.slope * z0) * log_ratio - i1 * s.slope * dw;
  }
  if (tail_level_ > 0.0) {
    // Constant level on (-inf, band_lo] and [band_hi, inf).
    const cplx z_lo{damping_, omega_tilde + band_lo_};
    const cplx z_hi{damping_, omega_tilde + band_hi_};
    sum += tail_level_ * (kPi - i1 * (std::log(z_lo) - std::log(z_hi)));
  }
  return sum / kTwoPi;
}

cplx CombPropagator::transfer(double omega_tilde) const {
  const cplx step = std::exp(-susceptibility(omega_tilde) * (length_ / n_z_));
  cplx h{1.0, 0.0};
  for (int j = 0; j < n_z_; ++j)
    h *= step;
  return h;
}

namespace {

EchoRecord solve_once(const ToothShape& shape, const MemoryParams& params, const SimGrid& grid) {
  const double T = params.period_T;
  const double tau = grid.pulse_tau * T;
  const auto n = static_cast<std::size_t>(grid.fft_size());
  const double dt = T / grid.samples_per_period;
  const double t0 = -kWindowLead * T;
  // Damped transform: late echoes that wrap around the window are suppressed.
  const double sigma = kWrapDecay / (grid.window_periods * T);
  const CombPropagator prop(shape, params, grid, sigma);

  std::vector<double> times(n);
  std::vector<cplx> field(n);
  for (std::size_t j = 0; j < n; ++j) {
    times[j] = t0 + static_cast<double>(j) * dt;
    field[j] = input_pulse(times[j], tau);
  }
  double input_energy = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    input_energy += std::norm(field[j]) * dt;
    field[j] *= std::exp(-sigma * (times[j] - t0));
  }

  run_fft(field, FFTW_FORWARD);
  const double dw = kTwoPi / (static_cast<double>(n) * dt);
  constexpr std::size_t kBlock = 256;
  parallel_for((n + kBlock - 1) / kBlock, 0, [&](std::size_t b) {
    const std::size_t end = std::min(n, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k) {
      const double kk = k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
      field[k] *= prop.transfer(kk * dw);
    }
  });
  run_fft(field, FFTW_BACKWARD);
  for (std::size_t j = 0; j < n; ++j)
    field[j] *= std::exp(sigma * (times[j] - t0)) / static_cast<double>(n);

  EchoRecord rec;
  rec.input_energy = input_energy;
  for (std::size_t j = 0; j < n / 2; ++j)
    rec.output_energy += std::norm(field[j]) * dt;
  for (int p = 0; p <= 2; ++p)
    rec.amplitudes.push_back(extract_echo(times, field, tau, T, p));
  rec.efficiency_sim = std::norm(rec.amplitudes[1]);

  const double lo = -kEchoHalfWindow * tau - dt;
  const double hi = 2.0 * T + kEchoHalfWindow * tau + dt;
  for (std::size_t j = 0; j < n; ++j) {
    if (times[j] >= lo && times[j] <= hi) {
      rec.times.push_back(times[j]);
      rec.output_field.push_back(field[j]);
    }
  }
  return rec;
}

} // namespace

EchoRecord solve_mb(const ToothShape& shape, const MemoryParams& params, const SimGrid& grid) {
  auto rec = solve_once(shape, params, grid);
  if (grid.check_convergence) {
    SimGrid fine = grid;
    fine.points_per_period *= 2;
    fine.n_z *= 2;
    fine.check_convergence = false;
    const auto ref = solve_once(shape, params, fine);
    const double change = std::abs(ref.efficiency_sim - rec.efficiency_sim);
    if (change > 0.01 * rec.efficiency_sim + 1e-10)
      throw GridTooCoarse("doubling n_omega and n_z changed |a1|^2 from " + std::to_string(rec.efficiency_sim) +
                          " to " + std::to_string(ref.efficiency_sim));
  }
  return rec;
}

cplx extract_echo(std::span<const double> times, std::span<const cplx> field, double tau, double period_T,
                  int p) {
  if (times.size() != field.size() || times.empty())
    throw InvalidParams("times and field must be non-empty and equally long");
  if (!(tau > 0.0) || p < 0)
    throw InvalidParams("tau must be positive and p non-negative");
  const double centre = p * period_T;
  if (times.front() > centre - kEchoHalfWindow * tau || times.back() < centre + kEchoHalfWindow * tau)
    throw WindowError("echo window around t = " + std::to_string(centre) + " s is clipped");
  cplx num{0.0, 0.0};
  double den = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const cplx ref = input_pulse(times[j] - centre, tau);
    num += std::conj(ref) * field[j];
    den += std::norm(ref);
  }
  return num / den;
}

std::pair<cplx, cplx> analytic_amplitudes(const FourierPair& fourier, double z) {
  if (!(z >= 0.0))
    throw DomainError("z must be non-negative");
  const double decay = std::exp(-0.5 * fourier.f0 * z);
  return {cplx{decay, 0.0}, -fourier.f_minus1 * z * decay};
}

void write_field_csv(std::ostream& out, const EchoRecord& record) {
  out << "t_s,re,im\n";
  char buf[32];
  auto put = [&](double v) {
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, r.ptr - buf);
  };
  for (std::size_t j = 0; j < record.times.size(); ++j) {
    put(record.times[j]);
    out << ',';
    put(record.output_field[j].real());
    out << ',';
    put(record.output_field[j].imag());
    out << '\n';
  }
}

EchoSummary summarize(const EchoRecord& record, const ToothShape& shape, const MemoryParams& params) {
  EchoSummary s;
  s.a0 = record.amplitudes.at(0);
  s.a1 = record.amplitudes.at(1);
  s.efficiency_sim = record.efficiency_sim;
  s.efficiency_analytic = efficiency(shape, params).eta;
  const double diff = std::abs(s.efficiency_sim - s.efficiency_analytic);
  s.rel_error = s.efficiency_analytic > 0.0 ? diff / s.efficiency_analytic : diff;
  return s;
}

std::string to_json(const EchoSummary& summary) {
  nlohmann::json j = {{"a0_re", summary.a0.real()},
                      {"a0_im", summary.a0.imag()},
                      {"a1_re", summary.a1.real()},
                      {"a1_im", summary.a1.imag()},
                      {"efficiency_sim", summary.efficiency_sim},
                      {"efficiency_analytic", summary.efficiency_analytic},
                      {"rel_error", summary.rel_error}};
  return j.dump();
}

} // namespace afc::mb
