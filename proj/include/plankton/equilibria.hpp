#pragma once

// Fixed points of the map: parameter-space regions, counts, locations and
// linear stability types.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "plankton/errors.hpp"
#include "plankton/model.hpp"
#include "plankton/roots.hpp"

namespace plankton {

/// Left end of the open interval (eps, 1) searched for positive fixed points.
inline constexpr double kLeftEdge = 1e-12;
/// theta within this distance of psi at a critical point is a tangent root.
inline constexpr double kTangencyTol = 1e-9;
/// Band on |lambda| (and on q, F(+-1)) treated as modulus one.
inline constexpr double kHyperbolicTol = 1e-9;
/// Relative band around region thresholds reported as a boundary case.
inline constexpr double kRegionBand = 1e-12;

enum class Region { NoPositiveFP, A0, A1, A2, A3, A4, A5, A6, A7, A8, A9, A10, A11, Boundary };

inline std::string to_string(Region r) {
  static constexpr std::array<const char*, 14> names = {"NoPositiveFP", "A0", "A1", "A2", "A3",  "A4",  "A5",
                                                        "A6",           "A7", "A8", "A9", "A10", "A11", "Boundary"};
  return names[static_cast<std::size_t>(r)];
}

struct RegionLabel {
  Region tag = Region::NoPositiveFP;
  std::string description;
  // Set only for Region::Boundary: the regions on either side.
  std::array<Region, 2> adjoining{Region::NoPositiveFP, Region::NoPositiveFP};
};

/// Threshold values delimiting the regions in the (gamma, beta) plane.
struct RegionThresholds {
  double existence;   // r (1 + gamma)
  double cusp;        // (10 + 6 sqrt 2) r / 7
  double quadruple;   // 4 r
  double u2_at_one;   // 4 r gamma (1 + gamma) / (gamma^2 + 4 gamma - 3), +inf when undefined
  double h_one_zero;  // 2 r gamma (1 + gamma)^2 / (gamma^2 + 2 gamma - 1), +inf when undefined

  static RegionThresholds at(double r, double g) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const double du = g * g + 4.0 * g - 3.0;
    const double dh = g * g + 2.0 * g - 1.0;
    return {r * (1.0 + g), (10.0 + 6.0 * std::sqrt(2.0)) * r / 7.0, 4.0 * r,
            du > 0.0 ? 4.0 * r * g * (1.0 + g) / du : inf, dh > 0.0 ? 2.0 * r * g * (1.0 + g) * (1.0 + g) / dh : inf};
  }
};

/// gamma breakpoints: sqrt2-1, sqrt7-2, 1, (3+6 sqrt2)/7, sqrt3.
inline std::array<double, 5> gamma_breakpoints() {
  return {std::sqrt(2.0) - 1.0, std::sqrt(7.0) - 2.0, 1.0, (3.0 + 6.0 * std::sqrt(2.0)) / 7.0, std::sqrt(3.0)};
}

namespace detail {

inline Region region_raw(double r, double g, double b) {
  const auto t = RegionThresholds::at(r, g);
  const auto br = gamma_breakpoints();
  if (b <= t.existence) return Region::NoPositiveFP;
  if (b <= t.cusp) return Region::A0;
  if (g <= 1.0) {
    if (b <= t.quadruple) return Region::A5;
    if (g <= br[0]) return Region::A10;
    if (b < t.h_one_zero) return Region::A11;
    if (g <= br[1]) return Region::A8;
    if (b < t.u2_at_one) return Region::A9;
    return Region::A3;
  }
  if (b > t.h_one_zero) return Region::A4;
  if (g > br[4]) return Region::A2;
  if (b >= t.u2_at_one) return Region::A1;
  if (g <= br[3]) return Region::A6;
  return Region::A7;
}

inline bool near(double a, double b) {
  return std::isfinite(b) && std::abs(a - b) <= kRegionBand * std::max(std::abs(a), std::abs(b));
}

}  // namespace detail

/// Region of (r, gamma, beta); theta plays no role.
inline RegionLabel classify_region(double r, double gamma, double beta) {
  if (!(r > 0.0 && gamma > 0.0 && beta > 0.0)) throw std::invalid_argument("r, gamma, beta must be positive");
  const Region raw = detail::region_raw(r, gamma, beta);
  const auto t = RegionThresholds::at(r, gamma);

  constexpr double kNudge = 1e-9;
  for (double thr : {t.existence, t.cusp, t.quadruple, t.u2_at_one, t.h_one_zero}) {
    if (!detail::near(beta, thr)) continue;
    const Region lo = detail::region_raw(r, gamma, beta * (1.0 - kNudge));
    const Region hi = detail::region_raw(r, gamma, beta * (1.0 + kNudge));
    if (lo != hi)
      return {Region::Boundary, "beta on threshold between " + to_string(lo) + " and " + to_string(hi), {lo, hi}};
  }
  for (double brk : gamma_breakpoints()) {
    if (!detail::near(gamma, brk)) continue;
    const Region lo = detail::region_raw(r, gamma * (1.0 - kNudge), beta);
    const Region hi = detail::region_raw(r, gamma * (1.0 + kNudge), beta);
    if (lo != hi)
      return {Region::Boundary, "gamma on breakpoint between " + to_string(lo) + " and " + to_string(hi), {lo, hi}};
  }
  switch (raw) {
    case Region::NoPositiveFP: return {raw, "beta <= r(1+gamma): no positive fixed point", {}};
    case Region::A3:
    case Region::A4:
    case Region::A8:
    case Region::A9: return {raw, "psi rises to one interior maximum, then falls to psi(1)", {}};
    case Region::A10:
    case Region::A11: return {raw, "psi has an interior maximum followed by an interior minimum", {}};
    default: return {raw, "psi increasing on (u0, 1]", {}};
  }
}

inline RegionLabel classify_region(const Params& p) { return classify_region(p.r(), p.gamma(), p.beta()); }

/// Roots of h in (0, 1), ascending. h(0) = 2 r gamma^3 > 0, so the roots are
/// bracketed by the critical points of h.
inline std::vector<double> critical_points_of_h(const Params& p) {
  std::vector<double> knots{0.0};
  if (auto qr = quadratic_roots(3.0 * p.beta(), 4.0 * (p.r() - p.beta()) * p.gamma(),
                                (4.0 * p.r() - p.beta()) * p.gamma() * p.gamma())) {
    for (double x : {qr->first, qr->second})
      if (x > 0.0 && x < 1.0) knots.push_back(x);
  }
  knots.push_back(1.0);

  const auto h = [&p](double u) { return h_poly(u, p); };
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i], b = knots[i + 1];
    const double fa = h(a), fb = h(b);
    if (fb == 0.0 && b < 1.0) {
      out.push_back(b);  // double root at a critical point of h
      continue;
    }
    if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) out.push_back(solve_bracketed(h, a, b, fa, fb));
  }
  return out;
}

struct PositiveRoot {
  double u = 0.0;
  bool borderline = false;  // tangent (double) root at a critical point of psi
};

/// Solutions of psi(u) = theta in (eps, 1), by bracketing on the monotone
/// pieces between critical points.
inline std::vector<PositiveRoot> positive_roots(const Params& p) {
  const double th = p.theta();
  const auto crit = critical_points_of_h(p);
  const auto f = [&](double u) { return psi(u, p) - th; };

  std::vector<double> knots{kLeftEdge};
  knots.insert(knots.end(), crit.begin(), crit.end());
  knots.push_back(1.0);
  std::vector<double> vals(knots.size());
  std::vector<PositiveRoot> out;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    vals[i] = f(knots[i]);
    const bool interior = i > 0 && i + 1 < knots.size();
    if (interior && std::abs(vals[i]) <= kTangencyTol) {
      vals[i] = 0.0;
      out.push_back({knots[i], true});
    }
  }
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (vals[i] * vals[i + 1] < 0.0)
      out.push_back({solve_bracketed(f, knots[i], knots[i + 1], vals[i], vals[i + 1]), false});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.u < b.u; });
  return out;
}

struct FpCountPrediction {
  int count = 0;
  std::string branch;
};

/// Number of positive fixed points according to the region's case list.
/// Where no listed case applies, the count comes from the monotone-piece
/// root scan and the branch reads "outside-theorem".
inline FpCountPrediction predict_fp_count(const Params& p) {
  const RegionLabel label = classify_region(p);
  const std::string tag = to_string(label.tag);
  if (label.tag == Region::NoPositiveFP) return {0, "nonexistence: beta <= r(1+gamma)"};

  const auto scanned = [&](const std::string& why) {
    return FpCountPrediction{static_cast<int>(positive_roots(p).size()), why};
  };
  if (label.tag == Region::Boundary) return scanned("boundary-case: " + label.description);

  const double th = p.theta();
  const double psi1 = psi(1.0, p);
  const auto crit = critical_points_of_h(p);
  const auto is = [&](double x) { return std::abs(th - x) <= kTangencyTol; };

  switch (label.tag) {
    case Region::A0:
    case Region::A1:
    case Region::A2:
    case Region::A5:
    case Region::A6:
    case Region::A7:
      if (th < psi1) return {1, tag + ": 0 < theta < Psi(1)"};
      return scanned("outside-theorem");
    case Region::A3:
    case Region::A4:
    case Region::A8:
    case Region::A9: {
      if (crit.size() != 1) return scanned("outside-theorem: expected one critical point");
      const double m = psi(crit[0], p);
      if (is(m)) return {1, tag + ": theta = Psi(u1^)"};
      if (th < psi1) return {1, tag + ": 0 < theta < Psi(1)"};
      if (th > psi1 && th < m) return {2, tag + ": Psi(1) < theta < Psi(u1^)"};
      return scanned("outside-theorem");
    }
    case Region::A10:
    case Region::A11: {
      if (crit.size() != 2) return scanned("outside-theorem: expected two critical points");
      const double mx = psi(crit[0], p);
      const double mn = psi(crit[1], p);
      if (is(mn)) return {2, tag + ": theta = Psi(u2^)"};
      if (th < mn) return {1, tag + ": 0 < theta < Psi(u2^)"};
      if (mx < psi1) {
        if (is(mx)) return {2, tag + ": Psi(u1^) < Psi(1), theta = Psi(u1^)"};
        if (th > mx && th < psi1) return {1, tag + ": Psi(u1^) < Psi(1), Psi(u1^) < theta < Psi(1)"};
        if (th > mn && th < mx) return {3, tag + ": Psi(u1^) <= Psi(1), Psi(u2^) < theta < Psi(u1^)"};
      } else {
        if (is(mx)) return {1, tag + ": Psi(u1^) >= Psi(1), theta = Psi(u1^)"};
        if (mx == psi1 && th > mn && th < mx) return {3, tag + ": Psi(u1^) <= Psi(1), Psi(u2^) < theta < Psi(u1^)"};
        if (th > psi1 && th < mx) return {2, tag + ": Psi(u1^) > Psi(1), Psi(1) < theta < Psi(u1^)"};
        if (th > mn && th < psi1) return {3, tag + ": Psi(u1^) > Psi(1), Psi(u2^) < theta < Psi(1)"};
      }
      return scanned("outside-theorem");
    }
    default:
      return scanned("outside-theorem");
  }
}

enum class FixedPointKind { Origin, Boundary, E1, E2, E3 };

inline std::string to_string(FixedPointKind k) {
  switch (k) {
    case FixedPointKind::Origin: return "Origin";
    case FixedPointKind::Boundary: return "Boundary(1,0)";
    case FixedPointKind::E1: return "E1";
    case FixedPointKind::E2: return "E2";
    case FixedPointKind::E3: return "E3";
  }
  return "?";
}

enum class Stability { Attracting, Repelling, Saddle, NonHyperbolic };

inline std::string to_string(Stability s) {
  switch (s) {
    case Stability::Attracting: return "Attracting";
    case Stability::Repelling: return "Repelling";
    case Stability::Saddle: return "Saddle";
    case Stability::NonHyperbolic: return "NonHyperbolic";
  }
  return "?";
}

/// Values of the characteristic polynomial used by the sign tests.
struct Certificates {
  double f_plus_one = 0.0;   // F(1, u)
  double f_minus_one = 0.0;  // F(-1, u)
  double q = 0.0;            // q(u) = F(0, u)
};

struct StabilityClass {
  Stability tag = Stability::NonHyperbolic;
  EigenPair eigenvalues{};
  std::optional<Certificates> certificates;
  bool certificate_agrees = true;  // tag matches the raw eigenvalue moduli
  std::string diagnostic;
};

/// Stability type read directly off eigenvalue moduli.
inline Stability classify_by_moduli(const EigenPair& ev, double tol = kHyperbolicTol) {
  const double m1 = std::abs(ev[0]);
  const double m2 = std::abs(ev[1]);
  if (std::abs(m1 - 1.0) <= tol || std::abs(m2 - 1.0) <= tol) return Stability::NonHyperbolic;
  if (m1 < 1.0 && m2 < 1.0) return Stability::Attracting;
  if (m1 > 1.0 && m2 > 1.0) return Stability::Repelling;
  return Stability::Saddle;
}

struct FixedPoint {
  double u = 0.0;
  double v = 0.0;
  double residual = 0.0;  // max-norm of map_step(fp) - fp
  FixedPointKind kind = FixedPointKind::Origin;
  StabilityClass stability;
  bool borderline = false;

  State state() const { return {u, v}; }
};

/// Stability of (0,0) and (1,0) from the closed-form conditions.
inline std::pair<StabilityClass, StabilityClass> classify_boundary(const Params& p) {
  StabilityClass origin;
  origin.eigenvalues = jacobian_general({0.0, 0.0}, p).eigenvalues();
  const double r = p.r();
  if (std::abs(r - 2.0) <= kHyperbolicTol)
    origin.tag = Stability::NonHyperbolic;
  else
    origin.tag = r < 2.0 ? Stability::Saddle : Stability::Repelling;

  StabilityClass edge;
  edge.eigenvalues = jacobian_general({1.0, 0.0}, p).eigenvalues();
  const double g = p.gamma();
  const double shift = p.theta() / (1.0 + g * g);
  const double lo = (r - 2.0 + shift) * (1.0 + g);
  const double hi = (r + shift) * (1.0 + g);
  // |lambda2 -+ 1| = |beta - bound| / (1 + gamma)
  const double band = kHyperbolicTol * (1.0 + g);
  const double b = p.beta();
  if (std::abs(b - lo) <= band || std::abs(b - hi) <= band)
    edge.tag = Stability::NonHyperbolic;
  else if (lo < b && b < hi)
    edge.tag = Stability::Attracting;
  else
    edge.tag = Stability::Saddle;

  for (auto* sc : {&origin, &edge}) {
    sc->certificate_agrees = classify_by_moduli(sc->eigenvalues) == sc->tag;
    if (!sc->certificate_agrees) sc->diagnostic = "closed-form type disagrees with eigenvalue moduli";
  }
  return {origin, edge};
}

/// Stability of a positive fixed point from F(1,u), F(-1,u), q(u). Points
/// with F(1,u) > 0 (increasing branch of psi, E1/E3) follow the q rule;
/// points with F(1,u) < 0 (E2) follow the F(-1,u) rule.
inline StabilityClass classify_positive(const FixedPoint& fp, const Params& p) {
  if (fp.kind == FixedPointKind::Origin || fp.kind == FixedPointKind::Boundary)
    throw std::invalid_argument("classify_positive expects E1, E2 or E3");
  StabilityClass sc;
  const Matrix2 j = jacobian_on_curve(fp.u, p);
  sc.eigenvalues = j.eigenvalues();
  Certificates c;
  c.f_plus_one = char_poly(1.0, fp.u, p);
  c.f_minus_one = char_poly(-1.0, fp.u, p);
  c.q = pq(fp.u, p).second;
  sc.certificates = c;

  if (std::abs(c.f_plus_one) <= kHyperbolicTol) {
    sc.tag = Stability::NonHyperbolic;
  } else if (c.f_plus_one > 0.0) {
    if (std::abs(c.q - 1.0) <= kHyperbolicTol)
      sc.tag = Stability::NonHyperbolic;
    else
      sc.tag = c.q < 1.0 ? Stability::Attracting : Stability::Repelling;
  } else {
    if (std::abs(c.f_minus_one) <= kHyperbolicTol)
      sc.tag = Stability::NonHyperbolic;
    else
      sc.tag = c.f_minus_one > 0.0 ? Stability::Saddle : Stability::Repelling;
  }
  const Stability raw = classify_by_moduli(sc.eigenvalues);
  sc.certificate_agrees = raw == sc.tag;
  if (!sc.certificate_agrees)
    sc.diagnostic = "certificate gives " + to_string(sc.tag) + " but eigenvalue moduli give " + to_string(raw);
  return sc;
}

/// All fixed points: (0,0), (1,0), then positive ones in increasing u.
/// Throws NumericalError if the located count disagrees with predict_fp_count.
inline std::vector<FixedPoint> find_fixed_points(const Params& p) {
  std::vector<FixedPoint> out;
  const auto [origin, edge] = classify_boundary(p);
  out.push_back({0.0, 0.0, 0.0, FixedPointKind::Origin, origin, false});
  out.push_back({1.0, 0.0, 0.0, FixedPointKind::Boundary, edge, false});

  const auto roots = positive_roots(p);
  const auto predicted = predict_fp_count(p);
  if (static_cast<int>(roots.size()) != predicted.count)
    throw NumericalError("fixed-point count mismatch: predicted " + std::to_string(predicted.count) + " (" +
                         predicted.branch + "), found " + std::to_string(roots.size()));
  if (roots.size() > 3) throw NumericalError("more than three positive fixed points found");

  constexpr std::array<FixedPointKind, 3> kinds{FixedPointKind::E1, FixedPointKind::E2, FixedPointKind::E3};
  for (std::size_t i = 0; i < roots.size(); ++i) {
    FixedPoint fp;
    fp.u = roots[i].u;
    fp.v = curve_v(fp.u, p);
    const State img = map_step(fp.state(), p);
    fp.residual = std::max(std::abs(img.u - fp.u), std::abs(img.v - fp.v));
    fp.kind = kinds[i];
    fp.borderline = roots[i].borderline;
    fp.stability = classify_positive(fp, p);
    out.push_back(fp);
  }
  return out;
}

inline std::vector<FixedPoint> positive_fixed_points(const Params& p) {
  auto all = find_fixed_points(p);
  all.erase(all.begin(), all.begin() + 2);
  return all;
}

}  // namespace plankton
