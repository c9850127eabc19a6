#pragma once

// State-feedback stabilization of a positive fixed point. The control term
// delta = -s1 (u - u*) - s2 (v - v*) is added to the first component only.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "plankton/model.hpp"

namespace plankton {

struct Gains {
  double s1 = 0.0;
  double s2 = 0.0;

  bool operator==(const Gains&) const = default;
};

inline State controlled_step(State s, Gains g, State target, const Params& p) {
  State next = map_step(s, p);
  next.u += -g.s1 * (s.u - target.u) - g.s2 * (s.v - target.v);
  return next;
}

/// Jacobian of the controlled map at a positive fixed point with first coordinate u.
inline Matrix2 controlled_jacobian(double u, Gains g, const Params& p) {
  Matrix2 j = jacobian_on_curve(u, p);
  j.a11 -= g.s1;
  j.a12 -= g.s2;
  return j;
}

/// Trace of controlled_jacobian written out in closed form.
inline double controlled_trace(double u, Gains g, const Params& p) {
  const double gm = p.gamma();
  return -g.s1 + 1.0 + (1.0 - u) * (gm + 2.0 * u) / (gm + u);
}

/// Determinant of controlled_jacobian written out in closed form.
inline double controlled_det(double u, Gains g, const Params& p) {
  const double gm = p.gamma();
  const double gu = gm + u;
  const double sq = gm * gm + u * u;
  const double bracket = p.beta() / (gu * gu) - 2.0 * p.theta() * gm * u / (sq * sq);
  return -g.s1 + gm * (1.0 - u) * gu * bracket * g.s2 + (1.0 - u) * (gm + 2.0 * u) / gu +
         gm * u * (1.0 - u) * bracket;
}

/// a s1 + b s2 + c = 0.
struct GainLine {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double eval(Gains g) const { return a * g.s1 + b * g.s2 + c; }
  double residual(Gains g) const { return std::abs(eval(g)) / std::hypot(a, b); }
};

/// Region of gains where both controlled eigenvalues lie inside the unit
/// circle: bounded by l1 (lambda1 lambda2 = 1), l2 (lambda = 1) and
/// l3 (lambda = -1).
struct StabilityTriangle {
  std::array<GainLine, 3> lines{};
  std::array<Gains, 3> vertices{};  // l1 & l2, l2 & l3, l1 & l3
  std::array<int, 3> stable_sign{};  // sign of lines[i].eval on the stable side
  bool degenerate = false;

  Gains centroid() const {
    return {(vertices[0].s1 + vertices[1].s1 + vertices[2].s1) / 3.0,
            (vertices[0].s2 + vertices[1].s2 + vertices[2].s2) / 3.0};
  }

  /// Strictly inside, at least `band` away (in gain distance) from every line.
  bool contains(Gains g, double band = 0.0) const {
    if (degenerate) return false;
    for (std::size_t i = 0; i < 3; ++i) {
      const double d = lines[i].eval(g) / std::hypot(lines[i].a, lines[i].b);
      if (stable_sign[i] * d <= band) return false;
    }
    return true;
  }

  /// Distance from g to the nearest boundary line.
  double boundary_distance(Gains g) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : lines) best = std::min(best, l.residual(g));
    return best;
  }
};

inline std::optional<Gains> intersect(const GainLine& x, const GainLine& y) {
  const double det = x.a * y.b - x.b * y.a;
  const double scale = std::hypot(x.a, x.b) * std::hypot(y.a, y.b);
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  return Gains{(x.b * y.c - y.b * x.c) / det, (y.a * x.c - x.a * y.c) / det};
}

inline bool is_stabilizing(Gains g, double u, const Params& p) {
  const auto ev = controlled_jacobian(u, g, p).eigenvalues();
  return std::abs(ev[0]) < 1.0 - 1e-12 && std::abs(ev[1]) < 1.0 - 1e-12;
}

inline StabilityTriangle stability_triangle(double u, const Params& p) {
  const double gm = p.gamma();
  const auto [tr0, det0] = pq(u, p);
  // det = q - s1 + k s2, trace = p - s1, with k the lower-left Jacobian entry.
  const double k = jacobian_on_curve(u, p).a21;

  StabilityTriangle tri;
  tri.lines[0] = {1.0, -k, 1.0 - det0};          // det = 1
  tri.lines[1] = {0.0, gm + u, u};               // 1 - trace + det = 0
  tri.lines[2] = {2.0, -k, -(1.0 + tr0 + det0)};  // 1 + trace + det = 0

  const auto v01 = intersect(tri.lines[0], tri.lines[1]);
  const auto v12 = intersect(tri.lines[1], tri.lines[2]);
  const auto v02 = intersect(tri.lines[0], tri.lines[2]);
  if (!v01 || !v12 || !v02) {
    tri.degenerate = true;
    return tri;
  }
  tri.vertices = {*v01, *v12, *v02};
  const auto& v = tri.vertices;
  const double area2 = (v[1].s1 - v[0].s1) * (v[2].s2 - v[0].s2) - (v[2].s1 - v[0].s1) * (v[1].s2 - v[0].s2);
  if (std::abs(area2) <= 1e-14) {
    tri.degenerate = true;
    return tri;
  }
  // Orientation from an interior sample.
  const Gains c = tri.centroid();
  for (std::size_t i = 0; i < 3; ++i) tri.stable_sign[i] = tri.lines[i].eval(c) > 0.0 ? 1 : -1;
  if (!is_stabilizing(c, u, p)) tri.degenerate = true;
  return tri;
}

}  // namespace plankton
