#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "afc/params.hpp"
#include "afc/shape.hpp"

namespace afc {

/// Seeded random tabulated tooth with 0 <= f <= alpha_max and a prescribed
/// area (relative error < 1e-8). `n_knots` uniform intervals per period.
/// Throws InfeasibleArea when target_area > alpha_max * 2 pi / T.
ToothShape random_bounded_shape(std::uint64_t seed, double target_area, double alpha_max, int n_knots,
                                bool symmetric, const MemoryParams& params);

/// Comparison of a tooth against the centred square of equal area.
struct DominanceReport {
  double shape_fm1_modulus = 0.0;
  double square_fm1_modulus = 0.0;
  double matched_area = 0.0;
  double margin = 0.0; ///< square - shape
  bool pass = false;   ///< margin >= -1e-9 * square (absolute floor 1e-14 alpha_max)
};

DominanceReport square_dominance_check(const ToothShape& shape, const MemoryParams& params);

/// Closed form of the integral of an off-centre square (half-width Gamma,
/// centre c, height alpha_max) against cos(w T): 2 alpha sin(Gamma T) cos(c T) / T.
double lemma2_integral(double half_width, double center, const MemoryParams& params);
/// The same integral by quadrature of the translated square tooth.
double lemma2_integral_quadrature(double half_width, double center, const MemoryParams& params);
/// Centre maximizing the quadrature integral among n_centers admissible
/// centres spread uniformly over [-(pi/T - Gamma), pi/T - Gamma].
double lemma2_center_scan(double half_width, const MemoryParams& params, int n_centers = 401);

struct VerificationRecord {
  std::uint64_t seed = 0;
  double area = 0.0;
  double shape_fm1 = 0.0;
  double square_fm1 = 0.0;
  double margin = 0.0;
  bool pass = false;
  bool symmetric = false;
};

/// One seeded case of the batch dominance run. Seeds alternate symmetric and
/// asymmetric shapes and, in pairs, the two finesse regimes Gamma T < pi/2
/// and Gamma T > pi/2.
struct DominanceCase {
  std::uint64_t seed = 0;
  bool symmetric = false;
  double target_area = 0.0;
  int n_knots = 0;
};
DominanceCase dominance_case(std::uint64_t seed, const MemoryParams& params);
/// Same draw with the symmetry and the regime (wide: Gamma T > pi/2) fixed.
DominanceCase dominance_case(std::uint64_t seed, const MemoryParams& params, bool symmetric, bool wide);
/// Builds the case's shape and compares it with the matched square.
VerificationRecord run_dominance_case(const DominanceCase& c, const MemoryParams& params);


/// Runs dominance_case / random_bounded_shape / square_dominance_check for
/// seeds first_seed .. first_seed + count - 1. Output is in seed order.
std::vector<VerificationRecord> verify_dominance_batch(std::uint64_t first_seed, std::size_t count,
                                                       const MemoryParams& params, unsigned threads = 0);

/// {seed, area, shape_fm1, square_fm1, margin, pass} on one line.
std::string to_json_line(const VerificationRecord& record);

/// Functional F[f] = G(integral f g) * H(integral f) over [a, b] with
/// 0 <= f <= bound_alpha, g decreasing and G increasing.
struct GeneralFunctionalSpec {
  std::string name;
  std::function<double(double)> g;
  std::function<double(double)> G;
  std::function<double(double)> H;
  double bound_alpha = 1.0;
  double a = 0.0;
  double b = 1.0;

  /// Throws MonotonicityViolation (or DomainError for a bad interval).
  void validate() const;
};

/// AFC efficiency restated: g = cos on [0, pi/2], G(x) = (od x / pi)^2,
/// H(y) = exp(-od y / pi), bound 1. The square optimum sits at arctan(2 pi / od).
GeneralFunctionalSpec afc_functional_spec(double od = kPi);
/// g(x) = -x on [0, 1], G = identity, H = 1.
GeneralFunctionalSpec linear_kernel_spec();
/// g = 1 on [0, 1], G = identity, H(y) = exp(-2 y): F depends only on area.
GeneralFunctionalSpec constant_kernel_spec();

struct GeneralCheckReport {
  std::string name;
  std::size_t n_samples = 0;
  std::size_t n_counterexamples = 0;
  double best_width = 0.0; ///< c - a of the best square
  double best_value = 0.0;
  double worst_margin = 0.0; ///< min over samples of best_value - F[f]
  std::vector<std::size_t> counterexamples;
  bool pass = false;
};

/// Value of the functional for an arbitrary f sampled on the given break points.
double functional_value(const GeneralFunctionalSpec& spec, const std::function<double(double)>& f,
                        const std::vector<double>& breaks);

GeneralCheckReport generalized_optimality_check(const GeneralFunctionalSpec& spec, std::size_t n_samples,
                                                std::uint64_t seed);

std::string to_json(const GeneralCheckReport& report);

} // namespace afc
