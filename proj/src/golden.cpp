#include "afc/golden.hpp"

#include <cmath>
#include <vector>

#include "afc/errors.hpp"

namespace afc {

Maximum golden_section_maximize(const std::function<double(double)>& f, double a, double b,
                                double x_tol) {
  if (!(a < b) || !(x_tol > 0.0))
    throw OptimizationFailure("golden section needs a < b and a positive tolerance");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int guard = 0;
  while (b - a > x_tol) {
    if (!std::isfinite(fc) || !std::isfinite(fd))
      throw OptimizationFailure("objective is not finite during golden-section search");
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    if (++guard > 500)
      break;
  }
  return fc > fd ? Maximum{c, fc} : Maximum{d, fd};
}

Maximum scan_then_golden(const std::function<double(double)>& f, double a, double b, int n_scan,
                         double x_tol) {
  if (n_scan < 3)
    throw OptimizationFailure("bracket scan needs at least three points");
  if (!(a < b))
    throw OptimizationFailure("bracket scan needs a < b");
  std::vector<double> xs(n_scan);
  std::vector<double> ys(n_scan);
  int best = 0;
  for (int i = 0; i < n_scan; ++i) {
    xs[i] = i + 1 == n_scan ? b : a + (b - a) * i / (n_scan - 1);
    ys[i] = f(xs[i]);
    if (!std::isfinite(ys[i]))
      throw OptimizationFailure("objective is not finite on the bracket scan");
    if (ys[i] > ys[best])
      best = i;
  }
  const double lo = xs[best > 0 ? best - 1 : 0];
  const double hi = xs[best + 1 < n_scan ? best + 1 : n_scan - 1];
  Maximum refined = golden_section_maximize(f, lo, hi, x_tol);
  if (ys[best] > refined.value)
    return {xs[best], ys[best]};
  return refined;
}

} // namespace afc
