#include <gtest/gtest.h>

#include <sbk/lame.hpp>

using namespace sbk;
using namespace sbk::lame;

TEST(Lame, SolveAOnBothSegments) {
  auto P = solve_a(3, 1, 0, 0.5);
  EXPECT_LT(P.residual, 1e-10);
  EXPECT_DOUBLE_EQ(P.a.real(), P.omega());
  EXPECT_GT(P.a.imag(), 0);
  EXPECT_LT(P.a.imag(), 0.5);
  auto Q = solve_a(3, 1, 2, 0.5);
  EXPECT_EQ(Q.a.real(), 0);
  EXPECT_GT(Q.a.imag(), 0);
  EXPECT_LT(std::abs(f_value(Q.a, Q.lattice) - Q.target()), 1e-10);
}

TEST(Lame, LambdaIncreasesWithM) {
  double prev = -INFINITY;
  for (int m = 0; m < 5; ++m) {
    double l = solve_a(5, 1, m, 0.3).lambda();
    EXPECT_GT(l, prev) << m;
    prev = l;
  }
}

TEST(Lame, DegenerateLimitUsesRealHalfPeriod) {
  // omega' -> infinity: Im(a - omega) / omega solves tanh(pi b / 2) = 1/k
  for (int k : {3, 5}) {
    auto P = solve_a(k, 1, 0, 40 * pi / (2.0 * k));
    EXPECT_NEAR(P.a.imag() / P.omega(), 2 / pi * std::atanh(1.0 / k), 1e-8) << k;
  }
}

TEST(Lame, RejectsBadIndices) {
  EXPECT_THROW(solve_a(4, 2, 0, 1), ParameterError);
  EXPECT_THROW(solve_a(6, 3, 0, 1), ParameterError);
  EXPECT_THROW(solve_a(3, 3, 0, 1), ParameterError);
  EXPECT_THROW(solve_a(1, 1, 0, 1), ParameterError);
  EXPECT_THROW(solve_a(3, 1, -1, 1), ParameterError);
  EXPECT_THROW(solve_a(3, 1, 0, -1), DomainError);
}

TEST(Lame, CurveInvariants) {
  struct Case {
    int k, n, m;
    double w;
    int winding;
  };
  for (auto c : {Case{3, 1, 0, 0.5, 1}, Case{5, 3, 0, 0.3, 3}, Case{3, 1, 1, 0.5, 7}, Case{5, 1, 2, 0.4, 21}}) {
    auto P = solve_a(c.k, c.n, c.m, c.w);
    auto C = build_curve(P, 1024);
    EXPECT_EQ(C.winding, c.winding);
    EXPECT_GT(C.b0, 0);
    EXPECT_LT(C.quasi_residual, 1e-8);
    EXPECT_LT(C.closure_residual, 1e-8);
    EXPECT_LT(C.potential_residual, 1e-7);
    EXPECT_LT(curve_ops::wronskian_residual(C.curve), 1e-8);
    EXPECT_NEAR(std::abs(C.curve.samples[0].as_complex()) * std::sqrt(C.wronskian_scale), 1, 1e-12);
  }
}

TEST(Lame, ZerosOfImaginaryPartPerPeriod) {
  // 2m sign changes of Im X on (0, 2 omega); agrees with the ceiling formula only for m < 2
  for (int m : {0, 1, 2, 3}) {
    auto P = solve_a(3, 1, m, 0.5);
    Eigenfunction X(P);
    int zeros = 0;
    const int M = 20000;
    double prev = X(2 * P.omega() * 0.5 / M).imag();
    for (int i = 1; i < M; ++i) {
      double cur = X(2 * P.omega() * (i + 0.5) / M).imag();
      zeros += (prev < 0) != (cur < 0);
      prev = cur;
    }
    EXPECT_EQ(zeros, 2 * m) << m;
    EXPECT_EQ(P.expected_winding() == P.ceiling_formula_winding(), m < 2);
  }
}

TEST(Lame, EmbeddedCurveIsStarShaped) {
  // winding one and a monotone argument: the curve is simple
  auto C = build_curve(solve_a(3, 1, 0, 0.5), 512);
  for (std::size_t j = 0; j + 1 < C.curve.size(); ++j)
    EXPECT_GT(det(C.curve.samples[j], C.curve.samples[j + 1]), 0);
}

TEST(Lame, AnglesK3) {
  auto rep = self_backlund_angles(solve_a(3, 1, 0, 0.5));
  ASSERT_EQ(rep.angles.size(), 1u);
  EXPECT_NEAR(rep.angles[0].alpha, pi / 2, 1e-9);
  EXPECT_LT(rep.angles[0].residual, 1e-7);
  EXPECT_TRUE(rep.counts_agree());
}

TEST(Lame, AnglesK5) {
  auto rep = self_backlund_angles(solve_a(5, 1, 0, 0.3));
  ASSERT_EQ(rep.angles.size(), 3u);
  EXPECT_NEAR(rep.angles[1].alpha, pi / 2, 1e-9);
  // symmetric about pi/2
  EXPECT_NEAR(rep.angles[0].alpha + rep.angles[2].alpha, pi, 1e-9);
  for (auto& A : rep.angles) EXPECT_NE(A.slope, 0);
}

TEST(Lame, AnglesK4AvoidRightAngle) {
  auto rep = self_backlund_angles(solve_a(4, 1, 0, 0.4));
  ASSERT_EQ(rep.angles.size(), 2u);
  for (auto& A : rep.angles) EXPECT_GT(std::abs(A.alpha - pi / 2), 0.1);
}

TEST(Lame, AngleCountFollowsLevelsForLargerN) {
  // the level count k-n-1 differs from k-2 once n > 1
  auto rep = self_backlund_angles(solve_a(7, 3, 0, 0.2));
  EXPECT_EQ(int(rep.angles.size()), rep.count_k_minus_n_1);
  EXPECT_EQ(rep.count_k_minus_n_1, 3);
  EXPECT_EQ(rep.count_k_minus_2, 5);
  EXPECT_FALSE(rep.counts_agree());
}

TEST(Lame, ReducedEquationMatchesSigmaEquation) {
  // Im of log sigma(a+x) - log sigma(a-x) - 2 x zeta(a), unwrapped along x
  auto P = solve_a(5, 1, 0, 0.3);
  ReducedEquation R(P);
  const auto& L = P.lattice;
  cplx za = elliptic::zeta(P.a, L);
  auto phi = [&](double x) {
    return (elliptic::log_sigma(P.a + x, L) - elliptic::log_sigma(P.a - x, L) - 2.0 * x * za).imag();
  };
  double acc = 0, prev = phi(0);
  const int M = 4000;
  for (int i = 1; i <= M; ++i) {
    double x = pi * i / M, cur = phi(x);
    acc += std::remainder(cur - prev, 2 * pi);
    prev = cur;
    if (i % 500 == 0) EXPECT_NEAR(acc, 2 * R.G(x), 1e-9) << x;
  }
}

TEST(Lame, NonConicCurveHasNoSmallAngleCertificates) {
  auto C = build_curve(solve_a(5, 1, 0, 0.3), 512);
  EXPECT_GT(curves::verify_self_backlund(C.curve, pi / 3).residual, 1e-3);
  EXPECT_GT(curves::verify_self_backlund(C.curve, pi / 4).residual, 1e-3);
}

TEST(Lame, DeformationK3) {
  auto F = deformation_family(3, {1, 0.6, 0.4, 0.25});
  for (auto& st : F.steps) {
    ASSERT_EQ(st.angles.size(), 1u);
    EXPECT_NEAR(st.angles[0].alpha, pi / 2, 1e-9);
  }
  // small s: the curve approaches the circle
  const auto& last = F.steps.back().curve.curve;
  for (std::size_t j = 0; j < last.size(); j += 16) {
    cplx z = last.samples[j].as_complex();
    EXPECT_NEAR(std::abs(z - std::polar(1.0, last.t(j))), 0, 1e-4);
  }
}

TEST(Lame, DeformationK4ReachesCircleAngles) {
  auto F = deformation_family(4, {1, 0.7, 0.5, 0.35, 0.25});
  ASSERT_EQ(F.limits.size(), 2u);
  auto ref = curves::infinitesimal_angles(4);
  ASSERT_EQ(ref.size(), 2u);
  EXPECT_NEAR(F.limits[0], ref[0], 1e-4);
  EXPECT_NEAR(F.limits[1], ref[1], 1e-4);
  // branches move monotonically toward the limit
  EXPECT_GT(F.steps[0].angles[0].alpha, F.steps.back().angles[0].alpha);
}

TEST(Lame, DeformationErrors) {
  EXPECT_THROW(deformation_family(2, {1, 0.5}), ParameterError);
  EXPECT_THROW(deformation_family(4, {0.5, 1}), DomainError);
  EXPECT_THROW(deformation_family(4, {1}), DomainError);
}
