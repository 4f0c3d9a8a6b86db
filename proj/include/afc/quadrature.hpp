#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "afc/errors.hpp"

namespace afc {

/// Globally adaptive Gauss-Kronrod (7/15) quadrature.
///
/// Integrands may be vector valued (std::array<double, N>) so that several
/// moments of the same function share node evaluations. Convergence is
/// declared when, for every component, the summed error estimate is below
/// rel_tol times the integral of |f| (plus abs_tol).
namespace quad {

template <std::size_t N>
using Vec = std::array<double, N>;

inline constexpr std::size_t kMaxIntervals = 50000;

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Piece {
  double a = 0.0;
  double b = 0.0;
  Vec<N> value{};
  Vec<N> error{};
  Vec<N> l1{};
  double priority = 0.0;
  bool operator<(const Piece& other) const { return priority < other.priority; }
};

template <std::size_t N>
void check_finite(const Vec<N>& v, double x) {
  for (double c : v) {
    if (!std::isfinite(c))
      throw QuadratureFailure("integrand is not finite at x = " + std::to_string(x));
  }
}

/// One 15-point Kronrod panel with QUADPACK-style error rescaling.
template <std::size_t N, class F>
Piece<N> panel(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();

  std::array<Vec<N>, 15> fv;
  fv[7] = f(center);
  check_finite<N>(fv[7], center);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv[j] = f(center - dx);
    check_finite<N>(fv[j], center - dx);
    fv[14 - j] = f(center + dx);
    check_finite<N>(fv[14 - j], center + dx);
  }

  Piece<N> out;
  out.a = a;
  out.b = b;
  for (std::size_t c = 0; c < N; ++c) {
    double kron = kWgk[7] * fv[7][c];
    double gauss = kWg[3] * fv[7][c];
    double absk = kWgk[7] * std::abs(fv[7][c]);
    for (std::size_t j = 0; j < 7; ++j) {
      const double s = fv[j][c] + fv[14 - j][c];
      kron += kWgk[j] * s;
      absk += kWgk[j] * (std::abs(fv[j][c]) + std::abs(fv[14 - j][c]));
      if (j % 2 == 1)
        gauss += kWg[j / 2] * s;
    }
    const double mean = 0.5 * kron;
    double asc = kWgk[7] * std::abs(fv[7][c] - mean);
    for (std::size_t j = 0; j < 7; ++j)
      asc += kWgk[j] * (std::abs(fv[j][c] - mean) + std::abs(fv[14 - j][c] - mean));

    const double result = kron * half;
    const double resabs = absk * std::abs(half);
    const double resasc = asc * std::abs(half);
    double err = std::abs((kron - gauss) * half);
    if (resasc != 0.0 && err != 0.0)
      err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > tiny / (50.0 * eps))
      err = std::max(50.0 * eps * resabs, err);
    out.value[c] = result;
    out.error[c] = err;
    out.l1[c] = resabs;
  }
  return out;
}

} // namespace detail

inline void check_tolerance(double rel_tol) {
  if (!(rel_tol > 1e-14 && rel_tol < 1e-2))
    throw DomainError("quadrature rel_tol must lie in (1e-14, 1e-2)");
}

/// Integrates f over [breaks.front(), breaks.back()], starting from one panel
/// per sub-interval between consecutive break points (kinks, jumps).
template <std::size_t N, class F>
Vec<N> integrate_n(F&& f, std::span<const double> breaks, double rel_tol, double abs_tol = 0.0) {
  check_tolerance(rel_tol);
  if (breaks.size() < 2)
    throw DomainError("quadrature needs at least two break points");
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] >= breaks[i - 1]) || !std::isfinite(breaks[i]))
      throw DomainError("quadrature break points must be finite and non-decreasing");
  }
  if (!(breaks.back() > breaks.front()))
    throw DomainError("quadrature requires a < b");

  using Piece = detail::Piece<N>;
  std::vector<Piece> pieces;
  Vec<N> total_err{};
  Vec<N> total_l1{};
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (breaks[i] == breaks[i - 1])
      continue;
    pieces.push_back(detail::panel<N>(f, breaks[i - 1], breaks[i]));
    for (std::size_t c = 0; c < N; ++c) {
      total_err[c] += pieces.back().error[c];
      total_l1[c] += pieces.back().l1[c];
    }
  }

  const auto priority = [&](const Piece& p) {
    double worst = 0.0;
    for (std::size_t c = 0; c < N; ++c) {
      const double scale = std::max(total_l1[c] * rel_tol, abs_tol);
      if (p.error[c] > 0.0)
        worst = std::max(worst, scale > 0.0 ? p.error[c] / scale : std::numeric_limits<double>::infinity());
    }
    return worst;
  };
  const auto converged = [&] {
    for (std::size_t c = 0; c < N; ++c) {
      if (total_err[c] > std::max(total_l1[c] * rel_tol, abs_tol))
        return false;
    }
    return true;
  };

  std::priority_queue<Piece> heap;
  for (auto& p : pieces) {
    p.priority = priority(p);
    heap.push(p);
  }

  std::size_t count = heap.size();
  while (!converged()) {
    if (count >= kMaxIntervals)
      throw QuadratureFailure("quadrature exceeded the interval budget");
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 1e-15 * std::max(std::abs(worst.a), std::abs(worst.b)))
      throw QuadratureFailure("quadrature reached maximum refinement depth near x = " +
                              std::to_string(mid));
    Piece left = detail::panel<N>(f, worst.a, mid);
    Piece right = detail::panel<N>(f, mid, worst.b);
    for (std::size_t c = 0; c < N; ++c) {
      total_err[c] += left.error[c] + right.error[c] - worst.error[c];
      total_l1[c] += left.l1[c] + right.l1[c] - worst.l1[c];
    }
    left.priority = priority(left);
    right.priority = priority(right);
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++count;
  }

  // Sum from the smallest pieces up for a reproducible total.
  std::vector<Piece> done;
  done.reserve(heap.size());
  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(), [](const Piece& x, const Piece& y) { return x.a < y.a; });
  Vec<N> sum{};
  for (const auto& p : done)
    for (std::size_t c = 0; c < N; ++c)
      sum[c] += p.value[c];
  return sum;
}

} // namespace quad

/// Scalar adaptive quadrature of f over [a, b].
double quadrature(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10);

/// Scalar adaptive quadrature over consecutive break points.
double quadrature(const std::function<double(double)>& f, std::span<const double> breaks,
                  double rel_tol = 1e-10);

} // namespace afc
