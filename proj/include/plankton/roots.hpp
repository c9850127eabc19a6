#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

namespace plankton {

/// Root of f on [lo, hi] given f(lo), f(hi) of strictly opposite sign.
/// Terminates once the bracket is below ~1e-14 relative (well under 1e-12 in u).
template <typename F>
double solve_bracketed(F&& f, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  std::uintmax_t max_iter = 200;
  boost::math::tools::eps_tolerance<double> tol(48);
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
  const double fa = f(a);
  const double fb = f(b);
  return std::abs(fa) <= std::abs(fb) ? a : b;
}

template <typename F>
double solve_bracketed(F&& f, double lo, double hi) {
  return solve_bracketed(f, lo, hi, f(lo), f(hi));
}

/// Real roots of a x^2 + b x + c in ascending order (a != 0).
inline std::optional<std::pair<double, double>> quadratic_roots(double a, double b, double c) {
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double qq = -0.5 * (b + std::copysign(s, b));
  double x1 = qq / a;
  double x2 = qq != 0.0 ? c / qq : -x1;
  if (x1 > x2) std::swap(x1, x2);
  return std::make_pair(x1, x2);
}

}  // namespace plankton
