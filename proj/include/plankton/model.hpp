#pragma once

// Discrete phytoplankton-zooplankton map with Holling type II grazing and
// type III toxin release:
//
//   u' = u(2 - u) - u v / (gamma + u)
//   v' = beta u v / (gamma + u) + (1 - r) v - theta u^2 v / (gamma^2 + u^2)
//
// Everything here is a pure function of its arguments.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace plankton {

/// Positive model constants.
class Params {
public:
  Params(double r, double beta, double theta, double gamma)
      : r_(r), beta_(beta), theta_(theta), gamma_(gamma) {
    check("r", r);
    check("beta", beta);
    check("theta", theta);
    check("gamma", gamma);
  }

  double r() const { return r_; }
  double beta() const { return beta_; }
  double theta() const { return theta_; }
  double gamma() const { return gamma_; }

  Params with_theta(double theta) const { return Params(r_, beta_, theta, gamma_); }

  bool operator==(const Params&) const = default;

private:
  static void check(const char* name, double value) {
    if (!std::isfinite(value) || value <= 0.0)
      throw std::invalid_argument(std::string("parameter ") + name + " must be finite and > 0, got " +
                                  std::to_string(value));
  }

  double r_, beta_, theta_, gamma_;
};

/// A point (u, v). Iterates may leave the nonnegative quadrant; use
/// State::checked where a biologically meaningful point is required.
struct State {
  double u = 0.0;
  double v = 0.0;

  static State checked(double u, double v) {
    if (!std::isfinite(u) || !std::isfinite(v) || u < 0.0 || v < 0.0)
      throw std::invalid_argument("state must be finite and nonnegative");
    return {u, v};
  }

  bool operator==(const State&) const = default;
};

inline double distance(State a, State b) { return std::hypot(a.u - b.u, a.v - b.v); }

using Complex = std::complex<double>;
using EigenPair = std::array<Complex, 2>;

/// Row-major 2x2 real matrix.
struct Matrix2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }

  // Roots of lambda^2 - trace*lambda + det. A complex pair is returned with
  // the negative imaginary part first; a real pair in ascending order.
  EigenPair eigenvalues() const {
    const double t = trace();
    const double d = det();
    const double half = 0.5 * t;
    const double disc = half * half - d;
    if (disc < 0.0) {
      const double im = std::sqrt(-disc);
      return {Complex(half, -im), Complex(half, im)};
    }
    const double s = std::sqrt(disc);
    // Avoid cancellation: compute the larger-magnitude root first.
    const double big = half >= 0.0 ? half + s : half - s;
    const double small = big != 0.0 ? d / big : 0.0;
    const double lo = std::min(big, small);
    const double hi = std::max(big, small);
    return {Complex(lo, 0.0), Complex(hi, 0.0)};
  }
};

/// One iteration of the map. Each component is evaluated as its own
/// coordinate times a growth factor, so u = 0 and v = 0 stay exactly invariant
/// and a sign change needs a negative factor.
inline State map_step(State s, const Params& p) {
  const double u = s.u, v = s.v;
  const double g = p.gamma();
  const double uptake = u / (g + u);
  const double release = p.theta() * u * u / (g * g + u * u);
  return {u * (2.0 - u - v / (g + u)), v * (p.beta() * uptake + (1.0 - p.r()) - release)};
}

/// theta as a function of the u-coordinate of a positive fixed point.
/// Diverges to -infinity at u = 0, which is rejected.
inline double psi(double u, const Params& p) {
  if (!(u > 0.0)) throw std::domain_error("psi is undefined for u <= 0");
  const double r = p.r(), b = p.beta(), g = p.gamma();
  return ((b - r) * u - r * g) * (g * g + u * u) / (u * u * (g + u));
}

/// Cubic whose sign is the sign of psi'(u) on u > 0.
inline double h_poly(double u, const Params& p) {
  const double r = p.r(), b = p.beta(), g = p.gamma();
  return ((b * u + 2.0 * (r - b) * g) * u + (4.0 * r - b) * g * g) * u + 2.0 * r * g * g * g;
}

inline double h_prime(double u, const Params& p) {
  const double r = p.r(), b = p.beta(), g = p.gamma();
  return (3.0 * b * u + 4.0 * (r - b) * g) * u + (4.0 * r - b) * g * g;
}

/// psi'(u) = gamma h(u) / (u^3 (u + gamma)^2).
inline double psi_prime(double u, const Params& p) {
  const double g = p.gamma();
  return g * h_poly(u, p) / (u * u * u * (u + g) * (u + g));
}

/// Zooplankton coordinate of the positive fixed point with first coordinate u.
inline double curve_v(double u, const Params& p) { return (1.0 - u) * (p.gamma() + u); }

/// Jacobian of map_step at an arbitrary state.
inline Matrix2 jacobian_general(State s, const Params& p) {
  const double u = s.u, v = s.v;
  const double r = p.r(), b = p.beta(), th = p.theta(), g = p.gamma();
  const double gu = g + u;
  const double sq = g * g + u * u;
  Matrix2 j;
  j.a11 = 2.0 - 2.0 * u - g * v / (gu * gu);
  j.a12 = -u / gu;
  j.a21 = b * g * v / (gu * gu) - 2.0 * th * g * g * u * v / (sq * sq);
  j.a22 = b * u / gu - th * u * u / sq + 1.0 - r;
  return j;
}

namespace detail {
// gamma (1-u) (gamma+u) (beta/(gamma+u)^2 - 2 theta gamma u/(gamma^2+u^2)^2):
// the lower-left Jacobian entry on the fixed-point curve.
inline double curve_lower_left(double u, const Params& p) {
  const double g = p.gamma();
  const double gu = g + u;
  const double sq = g * g + u * u;
  return g * (1.0 - u) * gu * (p.beta() / (gu * gu) - 2.0 * p.theta() * g * u / (sq * sq));
}
inline double curve_upper_left(double u, const Params& p) {
  const double g = p.gamma();
  return (1.0 - u) * (g + 2.0 * u) / (g + u);
}
}  // namespace detail

/// Jacobian at the positive fixed point (u, (1-u)(gamma+u)); assumes
/// theta = psi(u) so the lower-right entry is exactly 1.
inline Matrix2 jacobian_on_curve(double u, const Params& p) {
  Matrix2 j;
  j.a11 = detail::curve_upper_left(u, p);
  j.a12 = -u / (p.gamma() + u);
  j.a21 = detail::curve_lower_left(u, p);
  j.a22 = 1.0;
  return j;
}

/// Trace p(u) and determinant q(u) of jacobian_on_curve; the characteristic
/// polynomial is lambda^2 - p lambda + q.
inline std::pair<double, double> pq(double u, const Params& p) {
  const double g = p.gamma();
  const double gu = g + u;
  const double sq = g * g + u * u;
  const double a10 = detail::curve_upper_left(u, p);
  const double q = a10 + g * u * (1.0 - u) * (p.beta() / (gu * gu) - 2.0 * p.theta() * g * u / (sq * sq));
  return {1.0 + a10, q};
}

/// F(lambda, u) = lambda^2 - p(u) lambda + q(u).
inline double char_poly(double lambda, double u, const Params& p) {
  const auto [tr, det] = pq(u, p);
  return lambda * lambda - tr * lambda + det;
}

}  // namespace plankton
