#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's derivative, root-finding or region code.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "plankton/equilibria.hpp"
#include "plankton/model.hpp"

namespace oracle {

using Ld = long double;

struct Point {
  Ld u, v;
};

/// The map itself, written out again in extended precision.
inline Point step(Point s, Ld r, Ld beta, Ld theta, Ld gamma) {
  const Ld graze = s.u * s.v / (gamma + s.u);
  const Ld toxin = theta * s.u * s.u * s.v / (gamma * gamma + s.u * s.u);
  return {s.u * (2 - s.u) - graze, beta * graze + (1 - r) * s.v - toxin};
}

inline Point step(Point s, const plankton::Params& p) { return step(s, p.r(), p.beta(), p.theta(), p.gamma()); }

/// Central-difference Jacobian, step h.
inline plankton::Matrix2 fd_jacobian(plankton::State s, const plankton::Params& p, Ld h = 1e-6L) {
  const auto f = [&](Ld du, Ld dv) { return step({s.u + du, s.v + dv}, p); };
  const Point up = f(h, 0), um = f(-h, 0), vp = f(0, h), vm = f(0, -h);
  return {static_cast<double>((up.u - um.u) / (2 * h)), static_cast<double>((vp.u - vm.u) / (2 * h)),
          static_cast<double>((up.v - um.v) / (2 * h)), static_cast<double>((vp.v - vm.v) / (2 * h))};
}

inline Ld rel_err(const plankton::Matrix2& a, const plankton::Matrix2& b) {
  const Ld d = std::max({std::abs(Ld(a.a11) - b.a11), std::abs(Ld(a.a12) - b.a12), std::abs(Ld(a.a21) - b.a21),
                         std::abs(Ld(a.a22) - b.a22)});
  const Ld scale = std::max({Ld(1), std::abs(Ld(b.a11)), std::abs(Ld(b.a12)), std::abs(Ld(b.a21)), std::abs(Ld(b.a22))});
  return d / scale;
}

namespace detail {

// O(h^2) central stencils for derivative orders 0..3: (offset, weight) with weight / h^k.
inline const std::vector<std::pair<int, Ld>>& stencil(int k) {
  static const std::array<std::vector<std::pair<int, Ld>>, 4> s = {{
      {{0, 1}},
      {{-1, -0.5L}, {1, 0.5L}},
      {{-1, 1}, {0, -2}, {1, 1}},
      {{-2, -0.5L}, {-1, 1}, {1, -1}, {2, 0.5L}},
  }};
  return s[static_cast<std::size_t>(k)];
}

inline Ld mixed(const std::function<Ld(Ld, Ld)>& f, int i, int j, Ld h) {
  Ld acc = 0;
  for (const auto& [ox, wx] : stencil(i))
    for (const auto& [oy, wy] : stencil(j)) acc += wx * wy * f(ox * h, oy * h);
  return acc / std::pow(h, i + j);
}

}  // namespace detail

/// d^{i+j} f / dx^i dy^j at 0, central differences Richardson-extrapolated once.
inline Ld partial(const std::function<Ld(Ld, Ld)>& f, int i, int j, Ld h = 1e-4L) {
  return (4 * detail::mixed(f, i, j, h / 2) - detail::mixed(f, i, j, h)) / 3;
}

/// Taylor coefficients (partial / (i! j!)) of the map shifted to (u, v).
struct Taylor {
  std::map<std::pair<int, int>, Ld> a, b;
};

inline Taylor taylor(Point fp, Ld r, Ld beta, Ld theta, Ld gamma, Ld h = 1e-4L) {
  const auto fu = [&](Ld x, Ld y) { return step({fp.u + x, fp.v + y}, r, beta, theta, gamma).u; };
  const auto fv = [&](Ld x, Ld y) { return step({fp.u + x, fp.v + y}, r, beta, theta, gamma).v; };
  static constexpr std::array<Ld, 4> fact = {1, 1, 2, 6};
  Taylor t;
  for (int i = 0; i <= 3; ++i)
    for (int j = 0; i + j <= 3; ++j) {
      if (i + j == 0) continue;
      t.a[{i, j}] = partial(fu, i, j, h) / (fact[i] * fact[j]);
      t.b[{i, j}] = partial(fv, i, j, h) / (fact[i] * fact[j]);
    }
  return t;
}

/// Sign changes of psi(u) - theta on the grid u_k = k / n, k = 1..n.
inline int grid_root_count(const plankton::Params& p, int n = 100000) {
  const Ld r = p.r(), b = p.beta(), g = p.gamma(), th = p.theta();
  const auto f = [&](Ld u) { return ((b - r) * u - r * g) * (g * g + u * u) / (u * u * (g + u)) - th; };
  int count = 0;
  Ld prev = f(Ld(1) / n);
  for (int k = 2; k <= n; ++k) {
    const Ld cur = f(Ld(k) / n);
    if ((prev < 0) != (cur < 0)) ++count;
    prev = cur;
  }
  return count;
}

/// Roots of h(u) = beta u^3 + 2(r - beta) gamma u^2 + (4r - beta) gamma^2 u + 2 r gamma^3
/// in (0, 1), located by a fine grid plus bisection.
inline std::vector<double> h_roots(const plankton::Params& p, int n = 20000) {
  const Ld r = p.r(), b = p.beta(), g = p.gamma();
  const auto h = [&](Ld u) { return b * u * u * u + 2 * (r - b) * g * u * u + (4 * r - b) * g * g * u + 2 * r * g * g * g; };
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    Ld lo = Ld(k) / n, hi = Ld(k + 1) / n;
    if ((h(lo) < 0) == (h(hi) < 0)) continue;
    for (int it = 0; it < 200; ++it) {
      const Ld mid = (lo + hi) / 2;
      if ((h(mid) < 0) == (h(lo) < 0)) lo = mid;
      else hi = mid;
    }
    out.push_back(static_cast<double>((lo + hi) / 2));
  }
  return out;
}

inline Ld psi(Ld u, const plankton::Params& p) {
  const Ld r = p.r(), b = p.beta(), g = p.gamma();
  return ((b - r) * u - r * g) * (g * g + u * u) / (u * u * (g + u));
}

struct Sample {
  plankton::Params params;
  plankton::Region region;
  bool borderline;
};

/// Random (r, beta, gamma, theta) with roughly equal counts per region label
/// (twelve regions plus the nonexistence zone). Borderline: theta within 1e-6
/// of a critical value of psi, or (gamma, beta) within 1e-6 (relative) of a
/// region boundary.
inline std::vector<Sample> region_sample(std::size_t per_region, std::uint64_t seed) {
  using plankton::Region;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::map<Region, std::size_t> have;
  std::vector<Sample> out;
  const std::size_t want_total = per_region * 13;
  for (std::size_t tries = 0; out.size() < want_total && tries < 50'000'000; ++tries) {
    const double r = 0.1 + 1.9 * unit(rng);
    const double g = std::exp(std::log(0.02) + (std::log(4.0) - std::log(0.02)) * unit(rng));
    const double ratio = std::exp(std::log(0.5) + (std::log(60.0) - std::log(0.5)) * unit(rng));
    const double b = r * ratio;
    const Region reg = plankton::classify_region(r, g, b).tag;
    if (reg == Region::Boundary || have[reg] >= per_region) continue;

    const plankton::Params probe(r, b, 1.0, g);
    double top = 0.0;
    std::vector<double> crit_vals;
    if (reg != Region::NoPositiveFP) {
      top = static_cast<double>(psi(1.0L, probe));
      for (double u : h_roots(probe)) {
        crit_vals.push_back(static_cast<double>(psi(u, probe)));
        top = std::max(top, crit_vals.back());
      }
    }
    if (!(top > 0.0)) top = 1.0;
    const double th = 1e-3 + 1.25 * top * unit(rng);
    const plankton::Params p(r, b, th, g);

    bool borderline = false;
    for (double c : crit_vals)
      if (std::abs(th - c) <= 1e-6) borderline = true;
    for (double s : {-1e-6, 1e-6}) {
      if (plankton::classify_region(r, g, b * (1.0 + s)).tag != reg) borderline = true;
      if (plankton::classify_region(r, g * (1.0 + s), b).tag != reg) borderline = true;
    }
    ++have[reg];
    out.push_back({p, reg, borderline});
  }
  return out;
}

}  // namespace oracle
