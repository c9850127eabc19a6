#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "plankton/dynamics.hpp"
#include "plankton/nsbif.hpp"

using namespace plankton;

namespace {

const Params kEx1(0.5, 2.0, 1.0, 1.0);
const Params kEx2(0.5, 4.0, 5.0, 1.0);

NsCritical only_point(const Params& p) {
  const auto crit = ns_critical(p);
  EXPECT_EQ(crit.size(), 1u);
  return crit.at(0);
}

void expect_complex(Complex got, double re, double im, double tol) {
  EXPECT_NEAR(got.real(), re, tol);
  EXPECT_NEAR(got.imag(), im, tol);
}

}  // namespace

TEST(NsCritical, FirstExample) {
  const auto c = only_point(kEx1);
  EXPECT_NEAR(c.theta0, 0.347233, 1e-4);
  EXPECT_NEAR(c.u_bar, 0.371926, 1e-4);
  EXPECT_EQ(c.kind, FixedPointKind::E1);
  const auto ev = eigen_at(c.u_bar, kEx1.with_theta(c.theta0));
  EXPECT_NEAR(std::abs(ev[0]), 1.0, 1e-10);
  EXPECT_NEAR(ev[0].real(), 0.8991, 5e-4);
  EXPECT_LT(ev[0].imag(), 0.0);
}

TEST(NsCritical, SecondExample) {
  const auto c = only_point(kEx2);
  EXPECT_NEAR(c.theta0, 5.0, 1e-6);
  EXPECT_NEAR(c.u_bar, 0.2360, 5e-4);
}

TEST(NsCritical, NoneWithoutPositiveFixedPoints) {
  EXPECT_TRUE(ns_critical(Params(0.5, 0.9, 1.0, 1.0)).empty());
}

TEST(NsCritical, PointsSatisfyBothConditions) {
  for (const auto& s : oracle::region_sample(8, 31)) {
    for (const auto& c : ns_critical(s.params)) {
      const Params at = s.params.with_theta(c.theta0);
      EXPECT_GT(c.theta0, 0.0);
      EXPECT_NEAR(psi(c.u_bar, s.params), c.theta0, 1e-9 * std::max(1.0, c.theta0));
      EXPECT_NEAR(pq(c.u_bar, at).second, 1.0, 1e-9);
      const double tr = pq(c.u_bar, at).first;
      EXPECT_GT(tr, -2.0);
      EXPECT_LT(tr, 2.0);
    }
  }
}

TEST(NormalForm, FirstExamplePublishedValues) {
  const auto r = normal_form(only_point(kEx1), kEx1);
  expect_complex(r.L20, 0.011155, 0.040816, 2e-3);
  expect_complex(r.L11, -0.192358, -0.204738, 2e-3);
  expect_complex(r.L02, -0.274762, -0.113795, 2e-3);
  expect_complex(r.L21, -0.087924, 0.048583, 2e-3);
  EXPECT_NEAR(r.L, -0.248898, 2e-3);
  EXPECT_NEAR(r.dmod_dtheta, -0.1156, 5e-4);
}

TEST(NormalForm, SecondExample) {
  const auto r = normal_form(only_point(kEx2), kEx2);
  EXPECT_NEAR(r.L, -1.544896, 2e-3);
  EXPECT_EQ(ns_verdict(r).curve, CurveType::Attracting);
  EXPECT_EQ(ns_verdict(r).side, CurveSide::BelowTheta0);
}

TEST(NormalForm, ExactFormKeepsTheSign) {
  for (const Params& p : {kEx1, kEx2}) {
    const auto c = only_point(p);
    const auto pub = normal_form(c, p, CoefficientForm::published);
    const auto ex = normal_form(c, p, CoefficientForm::exact);
    EXPECT_LT(ex.L, 0.0);
    EXPECT_EQ(ns_verdict(pub).curve, ns_verdict(ex).curve);
  }
  EXPECT_NEAR(normal_form(only_point(kEx1), kEx1, CoefficientForm::exact).L, -0.247906, 1e-5);
}

TEST(Taylor, ExactFormMatchesFiniteDifferences) {
  for (const Params& p : {kEx1, kEx2, Params(0.7, 3.0, 1.0, 0.6)}) {
    for (const auto& c : ns_critical(p)) {
      const auto t = taylor_coeffs(c.u_bar, c.theta0, p, CoefficientForm::exact);
      const auto fd = oracle::taylor({c.u_bar, curve_v(c.u_bar, p)}, p.r(), p.beta(), c.theta0, p.gamma());
      const auto check = [&](double got, oracle::Ld want, const char* name) {
        const double w = static_cast<double>(want);
        EXPECT_NEAR(got, w, 1e-5 * std::max(1.0, std::abs(w))) << name << " at u=" << c.u_bar;
      };
      check(t.a10, fd.a.at({1, 0}), "a10");
      check(t.a01, fd.a.at({0, 1}), "a01");
      check(t.a20, fd.a.at({2, 0}), "a20");
      check(t.a11, fd.a.at({1, 1}), "a11");
      check(t.a02, fd.a.at({0, 2}), "a02");
      check(t.a30, fd.a.at({3, 0}), "a30");
      check(t.a21, fd.a.at({2, 1}), "a21");
      check(t.a12, fd.a.at({1, 2}), "a12");
      check(t.a03, fd.a.at({0, 3}), "a03");
      check(t.b10, fd.b.at({1, 0}), "b10");
      check(t.b01, fd.b.at({0, 1}), "b01");
      check(t.b20, fd.b.at({2, 0}), "b20");
      check(t.b11, fd.b.at({1, 1}), "b11");
      check(t.b02, fd.b.at({0, 2}), "b02");
      check(t.b30, fd.b.at({3, 0}), "b30");
      check(t.b21, fd.b.at({2, 1}), "b21");
      check(t.b12, fd.b.at({1, 2}), "b12");
      check(t.b03, fd.b.at({0, 3}), "b03");
    }
  }
}

TEST(Taylor, PublishedFormDiffersOnlyInB20) {
  const auto c = only_point(kEx1);
  const auto pub = taylor_coeffs(c.u_bar, c.theta0, kEx1, CoefficientForm::published);
  const auto ex = taylor_coeffs(c.u_bar, c.theta0, kEx1, CoefficientForm::exact);
  EXPECT_EQ(pub.a20, ex.a20);
  EXPECT_EQ(pub.b11, ex.b11);
  EXPECT_EQ(pub.b21, ex.b21);
  EXPECT_EQ(pub.b30, ex.b30);
  EXPECT_GT(std::abs(pub.b20 - ex.b20), 1e-3);
}

TEST(Transversality, MatchesPerturbedJacobianModulus) {
  // theta0 + t enters the lower-left entry; -t u^2 / (gamma^2 + u^2) shifts the lower-right one.
  for (const Params& p : {kEx1, kEx2}) {
    const auto c = only_point(p);
    const double u = c.u_bar, g = p.gamma(), b = p.beta();
    const auto modulus = [&](double t) {
      const double sq = g * g + u * u;
      const Matrix2 j{(1 - u) * (g + 2 * u) / (g + u), -u / (g + u),
                      g * (1 - u) * (g + u) * (b / ((g + u) * (g + u)) - 2 * (c.theta0 + t) * g * u / (sq * sq)),
                      1 - t * u * u / sq};
      return std::sqrt(j.det());
    };
    const double h = 1e-6;
    const double fd = (modulus(h) - modulus(-h)) / (2 * h);
    EXPECT_NEAR(transversality(u, p), fd, 1e-6 * std::abs(fd));
    EXPECT_LT(transversality(u, p), 0.0);
  }
}

TEST(NonResonance, ExamplesAndStrongResonances) {
  for (const Params& p : {kEx1, kEx2}) {
    const auto r = normal_form(only_point(p), p);
    EXPECT_TRUE(non_resonant(r.eigenvalues[0]));
    EXPECT_TRUE(non_resonant(r.eigenvalues[1]));
    // 1 < trace < 2 at the threshold on the increasing branch.
    const double tr = 1.0 + r.taylor.a10;
    EXPECT_GT(tr, 1.0);
    EXPECT_LT(tr, 2.0);
  }
  EXPECT_FALSE(non_resonant(Complex(0.0, 1.0)));
  EXPECT_FALSE(non_resonant(Complex(-0.5, std::sqrt(3.0) / 2.0)));
  EXPECT_FALSE(non_resonant(Complex(-1.0, 0.0)));
}

TEST(Convention, SwappedLabelsChangeTheQuantity) {
  const auto r = normal_form(only_point(kEx1), kEx1);
  const Complex l1 = r.eigenvalues[0], l2 = r.eigenvalues[1];
  ASSERT_LT(l1.imag(), 0.0);
  EXPECT_NEAR(discriminating_quantity(l1, l2, r.L20, r.L11, r.L02, r.L21), r.L, 1e-14);
  EXPECT_NEAR(discriminating_quantity(l2, l1, r.L20, r.L11, r.L02, r.L21), -0.155311, 2e-3);
}

TEST(Verdict, SignOfL) {
  NSReport r;
  r.L = -0.3;
  EXPECT_EQ(ns_verdict(r).curve, CurveType::Attracting);
  r.L = 0.3;
  EXPECT_EQ(ns_verdict(r).curve, CurveType::Repelling);
  EXPECT_EQ(ns_verdict(r).side, CurveSide::AboveTheta0);
  r.L = 1e-9;
  EXPECT_FALSE(ns_verdict(r).bifurcates);
  EXPECT_EQ(ns_verdict(r).curve, CurveType::Degenerate);
}

TEST(NormalForm, RealEigenvaluesAreNotApplicable) {
  // 1 + a10 > 2 at u = 0.2, gamma = 0.1.
  EXPECT_THROW(normal_form(0.2, 1.0, Params(0.5, 3.0, 1.0, 0.1)), NotNsApplicable);
  EXPECT_THROW(eigen_at(0.1, Params(0.5, 3.0, 2.0, 0.1)), NotNsApplicable);
}

TEST(NormalForm, SingularTransformation) {
  EXPECT_THROW(normal_form(0.25, 1.0, Params(0.5, 3.0, 1.0, 0.5)), NumericalError);
}

TEST(Dynamics, CurveBelowThresholdFixedPointAbove) {
  for (const Params& p : {kEx1, kEx2}) {
    const auto c = only_point(p);
    for (const double factor : {0.97, 1.03}) {
      const Params at = p.with_theta(c.theta0 * factor);
      const auto fps = find_fixed_points(at);
      const FixedPoint* e1 = nullptr;
      for (const auto& fp : fps)
        if (fp.kind == FixedPointKind::E1) e1 = &fp;
      ASSERT_NE(e1, nullptr);
      const Orbit o = iterate({e1->u + 0.01, e1->v}, 100000, at);
      const auto s = classify_attractor(o, fps);
      if (factor < 1.0) {
        EXPECT_EQ(s.verdict, Verdict::InvariantCurve) << s.label();
      } else {
        EXPECT_EQ(s.verdict, Verdict::FixedPoint) << s.label();
        EXPECT_EQ(s.which, FixedPointKind::E1);
      }
    }
  }
}
