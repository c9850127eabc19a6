#pragma once

// Orbits of the (optionally controlled) map and what can be read off them:
// attractor verdicts, theta sweeps for bifurcation diagrams, sampled checks
// of the invariant regions and of the v-descent property near (1,0).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "plankton/control.hpp"
#include "plankton/equilibria.hpp"
#include "plankton/model.hpp"

namespace plankton {

inline constexpr double kEscapeBox = 1e6;
inline constexpr double kConvergedDistance = 1e-8;
inline constexpr double kCurveMinRadius = 1e-4;
inline constexpr double kCurveMaxRadius = 1.0;
inline constexpr double kCurveMinSweep = 4.0 * std::numbers::pi;
inline constexpr std::size_t kCurveMinLength = 2000;

struct Control {
  Gains gains;
  State target;
};

struct Orbit {
  State initial;
  Params params;
  std::optional<Control> control;
  std::vector<State> points;  // points[0] = initial
  std::optional<std::size_t> escape_step;
};

inline bool escaped(State s) {
  return !std::isfinite(s.u) || !std::isfinite(s.v) || std::abs(s.u) > kEscapeBox || std::abs(s.v) > kEscapeBox ||
         s.u < 0.0 || s.v < 0.0;
}

/// n steps from `initial`; stops early (keeping the offending point) when
/// the orbit leaves the box or the nonnegative quadrant.
inline Orbit iterate(State initial, std::size_t n, const Params& p, std::optional<Control> control = std::nullopt) {
  if (n < 1) throw std::invalid_argument("iterate needs n >= 1");
  Orbit o{initial, p, control, {}, std::nullopt};
  o.points.reserve(n + 1);
  o.points.push_back(initial);
  State s = initial;
  for (std::size_t k = 1; k <= n; ++k) {
    s = control ? controlled_step(s, control->gains, control->target, p) : map_step(s, p);
    o.points.push_back(s);
    if (escaped(s)) {
      o.escape_step = k;
      break;
    }
  }
  return o;
}

enum class Verdict { FixedPoint, InvariantCurve, BoundaryFP, Escaped, Undetermined };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::FixedPoint: return "FixedPoint";
    case Verdict::InvariantCurve: return "InvariantCurve";
    case Verdict::BoundaryFP: return "BoundaryFP";
    case Verdict::Escaped: return "Escaped";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "?";
}

struct TailStats {
  double u_min = 0, u_max = 0, u_mean = 0;
  double v_min = 0, v_max = 0, v_mean = 0;
};

struct AttractorSummary {
  Verdict verdict = Verdict::Undetermined;
  std::optional<FixedPointKind> which;  // for FixedPoint
  TailStats tail;
  std::vector<double> radius_series;  // distance to the reference point over the tail
  double final_distance = 0.0;        // to the matched or reference point
  double angular_sweep = 0.0;         // net rotation about the reference point
  std::string label() const {
    if (verdict == Verdict::FixedPoint && which) return "FixedPoint(" + to_string(*which) + ")";
    if (verdict == Verdict::BoundaryFP) return "BoundaryFP(1,0)";
    return to_string(verdict);
  }
};

inline TailStats tail_stats(const std::vector<State>& pts, std::size_t from) {
  TailStats t{pts[from].u, pts[from].u, 0.0, pts[from].v, pts[from].v, 0.0};
  for (std::size_t i = from; i < pts.size(); ++i) {
    t.u_min = std::min(t.u_min, pts[i].u);
    t.u_max = std::max(t.u_max, pts[i].u);
    t.v_min = std::min(t.v_min, pts[i].v);
    t.v_max = std::max(t.v_max, pts[i].v);
    t.u_mean += pts[i].u;
    t.v_mean += pts[i].v;
  }
  const double cnt = static_cast<double>(pts.size() - from);
  t.u_mean /= cnt;
  t.v_mean /= cnt;
  return t;
}

/// Verdict over the last quarter of the orbit.
///
/// FixedPoint / BoundaryFP: the final point is within 1e-8 of a known fixed
/// point. InvariantCurve: bounded tail whose distance to the nearest positive
/// fixed point stays in [1e-4, 1] while winding at least twice around it.
inline AttractorSummary classify_attractor(const Orbit& o, const std::vector<FixedPoint>& known) {
  AttractorSummary s;
  if (o.escape_step) {
    s.verdict = Verdict::Escaped;
    return s;
  }
  const auto& pts = o.points;
  const std::size_t from = pts.size() - std::max<std::size_t>(1, pts.size() / 4);
  s.tail = tail_stats(pts, from);
  const State last = pts.back();

  if (distance(last, {1.0, 0.0}) < kConvergedDistance) {
    s.verdict = Verdict::BoundaryFP;
    s.which = FixedPointKind::Boundary;
    s.final_distance = distance(last, {1.0, 0.0});
    return s;
  }
  for (const auto& fp : known) {
    const double d = distance(last, fp.state());
    if (d < kConvergedDistance) {
      s.verdict = fp.kind == FixedPointKind::Boundary ? Verdict::BoundaryFP : Verdict::FixedPoint;
      s.which = fp.kind;
      s.final_distance = d;
      return s;
    }
  }

  // Reference centre: the positive fixed point nearest the tail mean.
  State centre{s.tail.u_mean, s.tail.v_mean};
  double best = std::numeric_limits<double>::infinity();
  for (const auto& fp : known) {
    if (fp.kind == FixedPointKind::Origin || fp.kind == FixedPointKind::Boundary) continue;
    const double d = distance(fp.state(), {s.tail.u_mean, s.tail.v_mean});
    if (d < best) {
      best = d;
      centre = fp.state();
    }
  }

  s.radius_series.reserve(pts.size() - from);
  double sweep = 0.0;
  double prev = std::atan2(pts[from].v - centre.v, pts[from].u - centre.u);
  for (std::size_t i = from; i < pts.size(); ++i) {
    s.radius_series.push_back(distance(pts[i], centre));
    const double ang = std::atan2(pts[i].v - centre.v, pts[i].u - centre.u);
    double d = ang - prev;
    if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    if (i > from) sweep += d;
    prev = ang;
  }
  s.angular_sweep = std::abs(sweep);
  s.final_distance = s.radius_series.back();

  const auto [rmin, rmax] = std::minmax_element(s.radius_series.begin(), s.radius_series.end());
  const bool long_enough = pts.size() >= kCurveMinLength;
  if (long_enough && *rmin >= kCurveMinRadius && *rmax <= kCurveMaxRadius && s.angular_sweep >= kCurveMinSweep)
    s.verdict = Verdict::InvariantCurve;
  else
    s.verdict = Verdict::Undetermined;
  return s;
}

struct SweepRow {
  double theta = 0.0;
  std::vector<double> u_tail;
  AttractorSummary summary;
};

struct SweepOptions {
  double burn_in = 0.5;           // fraction of n discarded before recording u
  std::size_t max_samples = 200;  // recorded u values per theta (evenly thinned)
};

/// Fixed points for the classifier; a count mismatch falls back to (0,0), (1,0).
inline std::vector<FixedPoint> known_fixed_points(const Params& p) {
  try {
    return find_fixed_points(p);
  } catch (const NumericalError&) {
    const auto [o, e] = classify_boundary(p);
    return {{0.0, 0.0, 0.0, FixedPointKind::Origin, o, false}, {1.0, 0.0, 0.0, FixedPointKind::Boundary, e, false}};
  }
}

inline SweepRow sweep_point(const Params& p, State initial, std::size_t n, const SweepOptions& opt) {
  SweepRow row;
  row.theta = p.theta();
  const Orbit o = iterate(initial, n, p);
  row.summary = classify_attractor(o, known_fixed_points(p));
  row.summary.radius_series.clear();
  row.summary.radius_series.shrink_to_fit();
  if (o.escape_step) return row;

  const std::size_t first = std::min(o.points.size() - 1, static_cast<std::size_t>(opt.burn_in * static_cast<double>(n)));
  const std::size_t avail = o.points.size() - first;
  const std::size_t take = std::min(avail, std::max<std::size_t>(1, opt.max_samples));
  row.u_tail.reserve(take);
  for (std::size_t k = 0; k < take; ++k) {
    // Evenly spaced over the recorded window, always ending at the last point.
    const std::size_t idx = o.points.size() - 1 - (take - 1 - k) * (avail - 1) / std::max<std::size_t>(1, take - 1);
    row.u_tail.push_back(o.points[idx].u);
  }
  return row;
}

/// One orbit per theta on a uniform grid over [lo, hi].
inline std::vector<SweepRow> sweep_theta(const Params& p, double lo, double hi, std::size_t steps, State initial,
                                         std::size_t n, const SweepOptions& opt = {}) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("sweep needs 0 < lo <= hi");
  if (steps < 2) throw std::invalid_argument("sweep needs at least two grid points");
  std::vector<SweepRow> rows;
  rows.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double th = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
    rows.push_back(sweep_point(p.with_theta(th), initial, n, opt));
  }
  return rows;
}

/// First adjacent pair of rows whose verdict goes from `from` to `to`.
inline std::optional<std::pair<double, double>> find_transition(const std::vector<SweepRow>& rows, Verdict from,
                                                                Verdict to) {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i)
    if (rows[i].summary.verdict == from && rows[i + 1].summary.verdict == to)
      return std::make_pair(rows[i].theta, rows[i + 1].theta);
  return std::nullopt;
}

enum class InvariantSet { M1, M2 };

inline std::string to_string(InvariantSet s) { return s == InvariantSet::M1 ? "M1" : "M2"; }

/// Upper boundary (2 - u)(gamma + u) of the invariant regions.
inline double invariant_roof(double u, double gamma) { return (2.0 - u) * (gamma + u); }

inline bool in_invariant_set(InvariantSet which, State s, double gamma, double tol = 1e-12) {
  if (!(s.u >= -tol && s.u <= 1.0 + tol && s.v >= -tol)) return false;
  if (which == InvariantSet::M2 && s.u <= 2.0 - gamma) return s.v <= 2.0 * gamma + tol;
  return s.v <= invariant_roof(s.u, gamma) + tol;
}

/// Throws std::invalid_argument unless theta < beta <= r(1+gamma), 0 < r <= 1
/// and gamma lies in the range belonging to `which`.
inline void require_invariance_hypotheses(const Params& p, InvariantSet which) {
  const double r = p.r(), b = p.beta(), g = p.gamma();
  if (!(p.theta() < b && b <= r * (1.0 + g))) throw std::invalid_argument("needs theta < beta <= r(1+gamma)");
  if (!(r <= 1.0)) throw std::invalid_argument("needs 0 < r <= 1");
  if (which == InvariantSet::M1 && !(g >= 2.0)) throw std::invalid_argument("M1 needs gamma >= 2");
  if (which == InvariantSet::M2 && !(g >= 1.0 && g < 2.0)) throw std::invalid_argument("M2 needs 1 <= gamma < 2");
}

struct InvarianceViolation {
  State point;
  State image;
};

struct InvarianceReport {
  InvariantSet which = InvariantSet::M1;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<InvarianceViolation> violations;
};

/// Uniform samples from the set (rejection from [0,1] x [0, 2 gamma]); each
/// image is tested for membership.
inline InvarianceReport invariant_set_check(const Params& p, InvariantSet which, std::size_t samples,
                                            std::uint64_t seed = 20240601) {
  require_invariance_hypotheses(p, which);
  const double g = p.gamma();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> du(0.0, 1.0);
  std::uniform_real_distribution<double> dv(0.0, 2.0 * g);
  InvarianceReport rep{which, samples, seed, {}};
  std::size_t drawn = 0;
  while (drawn < samples) {
    const State s{du(rng), dv(rng)};
    if (!in_invariant_set(which, s, g, 0.0)) continue;
    ++drawn;
    const State img = map_step(s, p);
    if (!in_invariant_set(which, img, g)) rep.violations.push_back({s, img});
  }
  return rep;
}

/// Hypotheses for v to be a Lyapunov function driving orbits to (1,0).
inline void require_descent_hypotheses(const Params& p, State initial) {
  const double r = p.r(), b = p.beta(), g = p.gamma();
  if (!(p.theta() <= b && b <= r * (1.0 + g))) throw std::invalid_argument("needs theta <= beta <= r(1+gamma)");
  if (!(r <= 1.0)) throw std::invalid_argument("needs 0 < r <= 1");
  if (!(g >= 1.0)) throw std::invalid_argument("needs gamma >= 1");
  if (!(initial.u > 0.0)) throw std::invalid_argument("needs u0 > 0");
  const InvariantSet which = g >= 2.0 ? InvariantSet::M1 : InvariantSet::M2;
  if (!in_invariant_set(which, initial, g, 0.0))
    throw std::invalid_argument("initial point must lie in " + to_string(which));
}

/// True iff v never increases (beyond 1e-12) and the orbit ends within 1e-6 of (1,0).
inline bool lyapunov_descent(const Orbit& o) {
  require_descent_hypotheses(o.params, o.initial);
  if (o.control) throw std::invalid_argument("descent check applies to the uncontrolled map");
  if (o.escape_step) return false;
  for (std::size_t k = 0; k + 1 < o.points.size(); ++k)
    if (o.points[k + 1].v > o.points[k].v + 1e-12) return false;
  return distance(o.points.back(), {1.0, 0.0}) <= 1e-6;
}

}  // namespace plankton
