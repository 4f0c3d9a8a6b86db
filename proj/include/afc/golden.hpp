#pragma once

#include <cmath>
#include <functional>

namespace afc {

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [a, b], stopping
/// once the bracket is narrower than x_tol. Ties move the bracket to the right.
Maximum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                double x_tol = 1e-8);

/// Uniform scan with n_scan points, then golden-section refinement inside the
/// cell pair around the best sample. Guards against flat starts and
/// multi-modal profiles where a plain golden search would stall.
Maximum scan_then_golden(const std::function<double(double)>& f, double a, double b, int n_scan,
                         double x_tol = 1e-8);

} // namespace afc
