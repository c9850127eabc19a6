#pragma once

// Neimark-Sacker bifurcation at a positive fixed point with theta as the
// bifurcation parameter: threshold detection, transversality, the cubic
// Taylor expansion of the shifted map, and the discriminating quantity
// whose sign decides whether the bifurcating closed curve attracts.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plankton/equilibria.hpp"
#include "plankton/errors.hpp"
#include "plankton/model.hpp"
#include "plankton/roots.hpp"

namespace plankton {

/// |L| at or below this is treated as degenerate.
inline constexpr double kDegenerateL = 1e-8;

/// Which closed form to use for the x^2 coefficient of the second component.
/// `published` keeps (gamma^2+u^2)^2 in the toxin term's denominator, the
/// form behind the standard reference values; `exact` is the true second
/// derivative of the map, with (gamma^2+u^2)^3. All other coefficients coincide.
enum class CoefficientForm { published, exact };

inline std::string to_string(CoefficientForm f) { return f == CoefficientForm::published ? "published" : "exact"; }

/// Third-order Taylor coefficients of the map shifted to the fixed point:
/// x' = sum a_ij x^i y^j, y' = sum b_ij x^i y^j.
struct TaylorCoefficients {
  double a10 = 0, a01 = 0, a20 = 0, a11 = 0, a02 = 0, a30 = 0, a21 = 0, a12 = 0, a03 = 0;
  double b10 = 0, b01 = 0, b20 = 0, b11 = 0, b02 = 0, b30 = 0, b21 = 0, b12 = 0, b03 = 0;
};

/// Coefficients of T^{-1} H(T X) in the eigen-coordinates.
struct CdCoefficients {
  double c20 = 0, c11 = 0, c02 = 0, c30 = 0, c21 = 0, c12 = 0, c03 = 0;
  double d20 = 0, d11 = 0, d02 = 0, d30 = 0, d21 = 0, d12 = 0, d03 = 0;
};

struct NormalFormCoefficients {
  CdCoefficients cd;
  Complex L20, L11, L02, L21;
  double L = 0.0;
};

struct NsCritical {
  double theta0 = 0.0;
  double u_bar = 0.0;
  FixedPointKind kind = FixedPointKind::E1;
};

struct NSReport {
  double theta0 = 0.0;
  double u_bar = 0.0;
  double v_bar = 0.0;
  FixedPointKind kind = FixedPointKind::E1;
  CoefficientForm form = CoefficientForm::published;
  EigenPair eigenvalues{};  // (1 + a10 -+ i alpha) / 2
  double alpha = 0.0;
  double m = 0.0;
  double n = 0.0;
  TaylorCoefficients taylor;
  CdCoefficients cd;
  Complex L20, L11, L02, L21;
  double L = 0.0;
  double dmod_dtheta = 0.0;
};

enum class CurveType { Attracting, Repelling, Degenerate };
enum class CurveSide { BelowTheta0, AboveTheta0, None };

struct NsVerdict {
  bool bifurcates = false;
  CurveType curve = CurveType::Degenerate;
  CurveSide side = CurveSide::None;
};

inline std::string to_string(CurveType c) {
  switch (c) {
    case CurveType::Attracting: return "Attracting";
    case CurveType::Repelling: return "Repelling";
    case CurveType::Degenerate: return "Degenerate";
  }
  return "?";
}

inline std::string to_string(CurveSide s) {
  switch (s) {
    case CurveSide::BelowTheta0: return "theta<theta0";
    case CurveSide::AboveTheta0: return "theta>theta0";
    case CurveSide::None: return "none";
  }
  return "?";
}

/// Thrown when the eigenvalues at a point are real (no NS bifurcation there).
class NotNsApplicable : public std::domain_error {
public:
  explicit NotNsApplicable(const std::string& what) : std::domain_error(what) {}
};

/// Complex pair p/2 -+ i sqrt(4q - p^2)/2 of jacobian_on_curve; modulus sqrt(q).
inline EigenPair eigen_at(double u, const Params& p) {
  const auto [tr, det] = pq(u, p);
  const double disc = 4.0 * det - tr * tr;
  if (!(disc > 0.0)) throw NotNsApplicable("eigenvalues are real at u = " + std::to_string(u));
  const double im = 0.5 * std::sqrt(disc);
  return {Complex(0.5 * tr, -im), Complex(0.5 * tr, im)};
}

/// d|lambda|/dtheta at theta0, with the fixed point held at u_bar.
inline double transversality(double u_bar, const Params& p) {
  const double u = u_bar, g = p.gamma();
  const double sq = g * g + u * u;
  return -u * u * (1.0 - u) * (2.0 * u * u * u + g * u * u + 4.0 * g * g * u + 3.0 * g * g * g) /
         (2.0 * (g + u) * sq * sq);
}

/// Solutions of {theta = psi(u), q(u) = 1} with theta0 > 0, ascending in u.
/// `which` filters by fixed-point branch (E1: below the first critical
/// point of psi, E3: above the second).
inline std::vector<NsCritical> ns_critical(const Params& p, std::optional<FixedPointKind> which = std::nullopt) {
  const double r = p.r(), b = p.beta(), g = p.gamma();
  std::vector<NsCritical> out;
  if (b <= r * (1.0 + g)) return out;
  // psi > 0 exactly on (u0, 1).
  const double u0 = r * g / (b - r);
  const auto gap = [&](double u) {
    const Params at = p.with_theta(std::max(psi(u, p), 1e-300));
    return pq(u, at).second - 1.0;
  };
  const auto crit = critical_points_of_h(p);

  constexpr int kGrid = 4000;
  const double lo = u0, hi = 1.0;
  const double step = (hi - lo) / kGrid;
  double ua = lo + 1e-3 * step;
  double fa = gap(ua);
  for (int i = 1; i <= kGrid; ++i) {
    const double ub = i == kGrid ? hi - 1e-3 * step : lo + i * step;
    const double fb = gap(ub);
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) || fb == 0.0) {
      const double u = fb == 0.0 ? ub : solve_bracketed(gap, ua, ub, fa, fb);
      const double th = psi(u, p);
      if (th > 0.0 && h_poly(u, p) > 0.0) {
        FixedPointKind kind = FixedPointKind::E1;
        if (!crit.empty() && u > crit.front()) kind = FixedPointKind::E3;
        if (!which || *which == kind) out.push_back({th, u, kind});
      }
    }
    ua = ub;
    fa = fb;
  }
  return out;
}

/// Closed-form Taylor coefficients at (u_bar, theta0); theta in p is ignored.
inline TaylorCoefficients taylor_coeffs(double u_bar, double theta0, const Params& p,
                                        CoefficientForm form = CoefficientForm::published) {
  const double u = u_bar, g = p.gamma(), b = p.beta(), th = theta0;
  const double gu = g + u;
  const double sq = g * g + u * u;
  TaylorCoefficients t;
  t.a10 = (1.0 - u) * (g + 2.0 * u) / gu;
  t.a01 = -u / gu;
  t.a20 = (g * (1.0 - 3.0 * u) - g * g - u * u) / (gu * gu);
  t.a11 = -g / (gu * gu);
  t.a30 = g * (u - 1.0) / (gu * gu * gu);
  t.a21 = g / (gu * gu * gu);

  t.b10 = g * (1.0 - u) * (b / gu - 2.0 * g * th * u * gu / (sq * sq));
  t.b01 = 1.0;
  const double b20_den = form == CoefficientForm::published ? sq * sq : sq * sq * sq;
  t.b20 = -g * (1.0 - u) * (b / (gu * gu) + g * th * gu * (g * g - 3.0 * u * u) / b20_den);
  t.b11 = g * (b / (gu * gu) - 2.0 * g * th * u / (sq * sq));
  t.b30 = g * (1.0 - u) * (b / (gu * gu * gu) + 4.0 * g * th * u * (g - u) * gu * gu / (sq * sq * sq * sq));
  t.b21 = -g * (b / (gu * gu * gu) + g * th * (g * g - 3.0 * u * u) / (sq * sq * sq));
  return t;
}

/// -Re[(1 - 2 l1) l2^2 / (1 - l1) L11 L20] - |L11|^2 / 2 - |L02|^2 + Re(l2 L21).
inline double discriminating_quantity(Complex l1, Complex l2, Complex L20, Complex L11, Complex L02, Complex L21) {
  const Complex k = (1.0 - 2.0 * l1) * l2 * l2 / (1.0 - l1);
  return -std::real(k * L11 * L20) - 0.5 * std::norm(L11) - std::norm(L02) + std::real(l2 * L21);
}

/// Normal-form reduction of a Taylor table under T = [[m n, -n], [0, 1]],
/// with eigenvalues (1 + a10 -+ i alpha) / 2.
inline NormalFormCoefficients reduce_normal_form(const TaylorCoefficients& t, double m, double n, double alpha) {
  NormalFormCoefficients nf;
  auto& c = nf.cd;
  const double n2 = n * n, n3 = n2 * n, m2 = m * m, m3 = m2 * m;
  c.c20 = t.a20 * m * n + t.b20 * m * n2;
  c.c11 = t.a11 - t.a20 * n + t.b11 * n - t.b20 * n2;
  c.c02 = (t.a20 * n - t.a11 + t.b20 * n2 - t.b11 * n) / m;
  c.c30 = t.a30 * m2 * n2 + t.b30 * m2 * n3;
  c.c21 = t.a21 * m * n - 3.0 * t.a30 * m * n2 + t.b21 * m * n2 - 3.0 * t.b30 * m * n3;
  c.c12 = 3.0 * t.a30 * n2 - 2.0 * t.a21 * n + 3.0 * t.b30 * n3 - 2.0 * t.b21 * n2;
  c.c03 = (t.a21 * n - t.a30 * n2 + t.b21 * n2 - t.b30 * n3) / m;
  c.d20 = t.b20 * m2 * n2;
  c.d11 = t.b11 * m * n - t.b20 * m * n2;
  c.d02 = t.b20 * n2 - t.b11 * n;
  c.d30 = t.b30 * m3 * n3;
  c.d21 = t.b21 * m2 * n2 - 3.0 * t.b30 * m2 * n3;
  c.d12 = 3.0 * t.b30 * m * n3 - 2.0 * t.b21 * m * n2;
  c.d03 = t.b21 * n2 - t.b30 * n3;

  const double Fxx = 2.0 * c.c20, Fxy = c.c11, Fyy = 2.0 * c.c02;
  const double Fxxx = 6.0 * c.c30, Fxxy = 2.0 * c.c21, Fxyy = 2.0 * c.c12, Fyyy = 6.0 * c.c03;
  const double Gxx = 2.0 * c.d20, Gxy = c.d11, Gyy = 2.0 * c.d02;
  const double Gxxx = 6.0 * c.d30, Gxxy = 2.0 * c.d21, Gxyy = 2.0 * c.d12, Gyyy = 6.0 * c.d03;

  nf.L20 = Complex(Fxx - Fyy + 2.0 * Gxy, Gxx - Gyy - 2.0 * Fxy) / 8.0;
  nf.L11 = Complex(Fxx + Fyy, Gxx + Gyy) / 4.0;
  nf.L02 = Complex(Fxx - Fyy - 2.0 * Gxy, Gxx - Gyy + 2.0 * Fxy) / 8.0;
  nf.L21 = Complex(Fxxx + Fxyy + Gxxy + Gyyy, Gxxx + Gxyy - Fxxy - Fyyy) / 16.0;

  const Complex l1((1.0 + t.a10) / 2.0, -alpha / 2.0);
  const Complex l2 = std::conj(l1);
  nf.L = discriminating_quantity(l1, l2, nf.L20, nf.L11, nf.L02, nf.L21);
  return nf;
}

/// Full normal-form report at a critical pair (u_bar, theta0).
inline NSReport normal_form(double u_bar, double theta0, const Params& p,
                            CoefficientForm form = CoefficientForm::published) {
  const double g = p.gamma();
  const double denom = 2.0 * u_bar + g - 1.0;
  if (std::abs(denom) < 1e-10)
    throw NumericalError("singular transformation: 2u + gamma - 1 = 0 at u = " + std::to_string(u_bar));

  NSReport rep;
  rep.theta0 = theta0;
  rep.u_bar = u_bar;
  rep.v_bar = curve_v(u_bar, p);
  rep.form = form;
  rep.taylor = taylor_coeffs(u_bar, theta0, p, form);
  const double a10 = rep.taylor.a10;
  const double alpha_sq = 3.0 - a10 * a10 - 2.0 * a10;
  if (!(alpha_sq > 0.0)) throw NotNsApplicable("1 + a10 outside (-2, 2): no complex pair");
  rep.alpha = std::sqrt(alpha_sq);
  rep.eigenvalues = {Complex((1.0 + a10) / 2.0, -rep.alpha / 2.0), Complex((1.0 + a10) / 2.0, rep.alpha / 2.0)};
  rep.m = rep.alpha * (g + u_bar) / (u_bar * denom);
  rep.n = u_bar / (2.0 * (g + u_bar));

  const auto nf = reduce_normal_form(rep.taylor, rep.m, rep.n, rep.alpha);
  rep.cd = nf.cd;
  rep.L20 = nf.L20;
  rep.L11 = nf.L11;
  rep.L02 = nf.L02;
  rep.L21 = nf.L21;
  rep.L = nf.L;
  rep.dmod_dtheta = transversality(u_bar, p);

  const auto crit = critical_points_of_h(p);
  rep.kind = (!crit.empty() && u_bar > crit.front()) ? FixedPointKind::E3 : FixedPointKind::E1;
  return rep;
}

inline NSReport normal_form(const NsCritical& c, const Params& p, CoefficientForm form = CoefficientForm::published) {
  auto rep = normal_form(c.u_bar, c.theta0, p, form);
  rep.kind = c.kind;
  return rep;
}

inline NsVerdict ns_verdict(const NSReport& report) {
  if (std::abs(report.L) <= kDegenerateL) return {false, CurveType::Degenerate, CurveSide::None};
  if (report.L < 0.0) return {true, CurveType::Attracting, CurveSide::BelowTheta0};
  return {true, CurveType::Repelling, CurveSide::AboveTheta0};
}

/// lambda^k != 1 for k = 1..4, checked as |lambda^k - 1| > tol.
inline bool non_resonant(Complex lambda, double tol = 1e-6) {
  Complex pw = 1.0;
  for (int k = 1; k <= 4; ++k) {
    pw *= lambda;
    if (std::abs(pw - 1.0) <= tol) return false;
  }
  return true;
}

}  // namespace plankton
