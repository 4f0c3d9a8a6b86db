#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "afc/params.hpp"
#include "afc/shape.hpp"
#include "afc/spectral.hpp"

namespace afc::mb {

using cplx = std::complex<double>;

/// Discretization of a Maxwell-Bloch run. Times are in units of T unless noted.
struct SimGrid {
  int n_z = 64;                 ///< z steps over [0, L]
  int teeth = 40;               ///< comb periods M emulating the periodic comb
  int points_per_period = 64;   ///< detuning samples per period (n_omega = teeth * points_per_period)
  int samples_per_period = 64;  ///< time samples per T
  int window_periods = 256;     ///< FFT window length in units of T
  double pulse_tau = 0.05;      ///< Gaussian duration tau / T
  bool check_convergence = true; ///< re-solve with doubled n_omega and n_z
  bool mean_tails = true;       ///< continue the comb beyond the M teeth at its mean absorption

  /// n_omega
  int detuning_points() const { return teeth * points_per_period; }
  /// FFT length
  int fft_size() const { return samples_per_period * window_periods; }
  /// Throws InvalidParams when the pulse does not resolve the comb.
  void validate() const;
};

/// Output of solve_mb. The field is sampled on [-4 tau, 2T + 4 tau].
struct EchoRecord {
  std::vector<double> times;        ///< s
  std::vector<cplx> output_field;   ///< Omega(L, t), input peak normalized to 1
  std::vector<cplx> amplitudes;     ///< a_0, a_1, a_2
  double efficiency_sim = 0.0;      ///< |a_1|^2
  double input_energy = 0.0;        ///< sum |Omega(0, t)|^2 dt
  double output_energy = 0.0;       ///< sum |Omega(L, t)|^2 dt over the first half of the FFT window
};

/// Unit-peak Gaussian input exp(-t^2 / (2 tau^2)).
cplx input_pulse(double t, double tau);

/// Frequency-domain transfer Omega(L, w) / Omega(0, w) of the discretized comb.
/// Exposed for tests; solve_mb evaluates it on the FFT grid.
class CombPropagator {
public:
  /// `laplace_shift` sigma evaluates the transfer at w - i sigma.
  CombPropagator(const ToothShape& shape, const MemoryParams& params, const SimGrid& grid,
                 double laplace_shift = 0.0);
  /// K(w) = (1/2pi) * integral f(w') / (i (w + w') + gamma + eps + sigma) dw'
  cplx susceptibility(double omega_tilde) const;
  /// exp(-K L) composed from n_z exact steps.
  cplx transfer(double omega_tilde) const;
  std::size_t segment_count() const { return segments_.size(); }

private:
  struct Segment {
    double w0, w1, v0, slope;
  };
  std::vector<Segment> segments_;
  double tail_level_ = 0.0;
  double band_lo_ = 0.0;
  double band_hi_ = 0.0;
  double damping_;
  double length_;
  int n_z_;
};

/// Propagates a weak Gaussian pulse through the comb. Throws GridTooCoarse when
/// doubling n_omega or n_z moves |a_1|^2 by more than 1 %.
EchoRecord solve_mb(const ToothShape& shape, const MemoryParams& params, const SimGrid& grid = {});

/// Matched-filter projection <Omega(0, t - pT), Omega(L, t)> / <Omega(0, t), Omega(0, t)>.
/// `tau` in seconds. Throws WindowError when [pT - 4 tau, pT + 4 tau] is not covered.
cplx extract_echo(std::span<const double> times, std::span<const cplx> field, double tau, double period_T,
                  int p);

/// a_0(z) = exp(-F0 z / 2), a_1(z) = -F_{-1} z exp(-F0 z / 2).
std::pair<cplx, cplx> analytic_amplitudes(const FourierPair& fourier, double z);

/// Writes `t_s,re,im`.
void write_field_csv(std::ostream& out, const EchoRecord& record);

struct EchoSummary {
  cplx a0;
  cplx a1;
  double efficiency_sim = 0.0;
  double efficiency_analytic = 0.0;
  double rel_error = 0.0;
};
EchoSummary summarize(const EchoRecord& record, const ToothShape& shape, const MemoryParams& params);
/// {a0_re, a0_im, a1_re, a1_im, efficiency_sim, efficiency_analytic, rel_error}
std::string to_json(const EchoSummary& summary);

} // namespace afc::mb
