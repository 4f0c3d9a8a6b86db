#include "afc/quadrature.hpp"

namespace afc {

double quadrature(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  const std::array<double, 2> breaks{a, b};
  return quadrature(f, breaks, rel_tol);
}

double quadrature(const std::function<double(double)>& f, std::span<const double> breaks,
                  double rel_tol) {
  auto wrapped = [&f](double x) { return quad::Vec<1>{f(x)}; };
  return quad::integrate_n<1>(wrapped, breaks, rel_tol)[0];
}

} // namespace afc
