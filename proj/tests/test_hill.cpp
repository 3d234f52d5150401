#include <gtest/gtest.h>

#include <sbk/hill.hpp>

#include "oracles.hpp"

using namespace sbk;
using namespace sbk::hill;

namespace {

double p_cos(double t) { return -1 + 0.3 * std::cos(2 * t); }
double p_mixed(double t) { return -1.2 + 0.3 * std::cos(2 * t) + 0.1 * std::sin(4 * t); }

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

}  // namespace

TEST(Hill, CircleFloquet) {
  auto p = sample_potential([](double) { return -1.0; }, 64);
  // y'' = (-1 - lambda) y: trace 2 cos(pi sqrt(1 + lambda))
  for (double l : {-1.0, 0.0, 3.0, 1.25}) {
    auto F = floquet(p, l);
    EXPECT_NEAR(F.trace, 2 * std::cos(pi * std::sqrt(1 + l)), 1e-11) << l;
    EXPECT_NEAR(F.monodromy.determinant(), 1, 1e-11);
  }
  EXPECT_NEAR(lambda0(p), -1, 1e-9);
  EXPECT_NEAR(c_max(p), 1, 1e-9);
}

TEST(Hill, Lambda0AgainstGalerkin) {
  for (auto fn : {p_cos, p_mixed}) {
    auto p = sample_potential(fn, 64);
    double l0 = lambda0(p);
    EXPECT_NEAR(l0, oracle::galerkin_lambda0(fn), 1e-9);
    EXPECT_LE(l0, -p.P());  // Borg
  }
  EXPECT_NEAR(lambda0(sample_potential(p_cos, 64)), -1.011222456899, 1e-9);
}

TEST(Hill, RiccatiCircle) {
  auto p = sample_potential([](double) { return -1.0; }, 64);
  auto f = riccati_periodic(p, 0.5);
  ASSERT_TRUE(f);
  for (double v : *f) EXPECT_NEAR(v, std::sqrt(0.75), 1e-12);
  EXPECT_FALSE(riccati_periodic(p, 5.0 / 3));
  EXPECT_THROW(riccati_periodic(p, 0), DomainError);
}

TEST(Hill, RiccatiAgainstPeriodMap) {
  auto p = sample_potential(p_mixed, 128);
  for (double c : {0.3, 0.7, -0.5}) {
    auto f = riccati_periodic(p, c);
    ASSERT_TRUE(f) << c;
    EXPECT_LT(riccati_residual(p, *f, c), 1e-9);
    EXPECT_NEAR((*f)[0], oracle::riccati_fixed_point(p_mixed, c, (*f)[0] + 0.01), 1e-9) << c;
  }
}

TEST(Hill, ExistenceFlipsAtCmax) {
  auto p = sample_potential(p_cos, 64);
  double cm = c_max(p);
  EXPECT_TRUE(riccati_periodic(p, cm * (1 - 1e-6)));
  EXPECT_TRUE(riccati_periodic(p, -cm * (1 - 1e-6)));
  EXPECT_FALSE(riccati_periodic(p, cm * (1 + 1e-6)));
  EXPECT_FALSE(riccati_periodic(p, -cm * (1 + 1e-6)));
}

TEST(Hill, PositiveLambda0Rejected) {
  auto p = sample_potential([](double t) { return 0.5 + 0.1 * std::cos(2 * t); }, 32);
  EXPECT_THROW(c_max(p), DomainError);
  EXPECT_THROW(make_potential(std::vector<double>(48, 0.0)), DomainError);
}

TEST(Hill, MiuraRecursionBeatsPrintedFifthCoefficient) {
  auto p = sample_potential(p_mixed, 128);
  auto series = miura_series(p, 6);
  auto d1 = spectral::derivative(p.samples, pi, 1), d2 = spectral::derivative(p.samples, pi, 2),
       d3 = spectral::derivative(p.samples, pi, 3), d4 = spectral::derivative(p.samples, pi, 4);
  const std::size_t M = p.grid_size();
  auto truncation = [&](double c, bool printed) {
    auto f = *riccati_periodic(p, c);
    double err = 0;
    for (std::size_t j = 0; j < M; ++j) {
      double P = p.samples[j], s;
      if (printed) {
        s = 1 + c * c / 2 * P + std::pow(c, 3) / 4 * d1[j] + std::pow(c, 4) / 8 * (d2[j] - P * P) +
            std::pow(c, 5) / 16 * (d3[j] - 8 * P * d1[j]) +
            std::pow(c, 6) / 32 * (d4[j] - 10 * P * d2[j] - 9 * d1[j] * d1[j] + 2 * P * P * P);
      } else {
        s = 1;
        for (int k = 2; k <= 6; ++k) s += std::pow(c, k) * series[k - 2][j];
      }
      err = std::max(err, std::abs(f[j] - s));
    }
    return err;
  };
  double r_rec = truncation(0.05, false) / truncation(0.1, false);
  double r_pr = truncation(0.05, true) / truncation(0.1, true);
  EXPECT_NEAR(std::log2(r_rec), -7, 0.3);
  EXPECT_NEAR(std::log2(r_pr), -5, 0.3);
  // closed forms of the low coefficients
  for (std::size_t j = 0; j < M; ++j) {
    double P = p.samples[j];
    EXPECT_NEAR(series[3][j], (d3[j] - 4 * P * d1[j]) / 16, 1e-10);
    EXPECT_NEAR(series[4][j], (d4[j] - 6 * P * d2[j] - 5 * d1[j] * d1[j] + 2 * P * P * P) / 32, 1e-9);
  }
  EXPECT_THROW(miura_series(p, 7), ParameterError);
}

TEST(Hill, MiuraIntegrals) {
  auto p = sample_potential(p_mixed, 128);
  auto s = miura_series(p, 6);
  auto I = kdv_integrals(p);
  auto integral = [&](const std::vector<double>& v) { return spectral::mean(v) * pi; };
  EXPECT_NEAR(integral(s[1]), 0, 1e-10);
  EXPECT_NEAR(integral(s[3]), 0, 1e-10);
  EXPECT_NEAR(integral(s[0]), I[0] / 2, 1e-12);
  EXPECT_NEAR(integral(s[2]), -I[1] / 8, 1e-12);
  EXPECT_NEAR(integral(s[4]), I[2] / 16, 1e-10);
}

TEST(Hill, KdvConservation) {
  auto p = sample_potential(p_mixed, 128);
  auto I0 = kdv_integrals(p);
  auto q = p;
  for (int i = 0; i < 1000; ++i) q = kdv_step(q, 1e-3);
  auto I1 = kdv_integrals(q);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(I1[k], I0[k], 1e-8) << k;
  EXPECT_GT(max_abs_diff(p.samples, q.samples), 1e-3);  // it did move
}

TEST(Hill, KdvStepIsFourthOrder) {
  auto p = curvature_of(oracle::star_curve(0.1, 256));
  auto run = [&](double dt) {
    auto q = p;
    for (int i = 0; i < int(std::lround(0.1 / dt)); ++i) q = kdv_step(q, dt);
    return kdv_integrals(q)[2] - kdv_integrals(p)[2];
  };
  double e1 = std::abs(run(2e-3)), e2 = std::abs(run(1e-3));
  EXPECT_NEAR(std::log2(e1 / e2), 4, 0.5);
}

TEST(Hill, MkdvConservesMean) {
  auto p = sample_potential(p_mixed, 128);
  const double c = 0.5;
  auto f = *riccati_periodic(p, c);
  auto g = f;
  for (int i = 0; i < 200; ++i) g = mkdv_step(g, c, 1e-3);
  EXPECT_NEAR(spectral::mean(g), spectral::mean(f), 1e-10);
}

TEST(Hill, EvolvedPairStaysRelated) {
  auto gamma = oracle::star_curve(0.05, 256);
  const double c = 0.4;
  auto p = curvature_of(gamma);
  auto f = *riccati_periodic(p, c);
  auto delta = c_related(gamma, f, c);
  const double dt = 1e-3;
  auto G = evolve_curve(gamma, dt, 100), D = evolve_curve(delta, dt, 100);
  double drift = 0, wr = std::max(curve_ops::wronskian_residual(G.curve), curve_ops::wronskian_residual(D.curve));
  for (std::size_t j = 0; j < gamma.size(); ++j)
    drift = std::max(drift, std::abs(det(G.curve.samples[j], D.curve.samples[j]) - c));
  EXPECT_LT(drift, 1e-4);
  EXPECT_LT(wr, 1e-7);
  auto I0 = kdv_integrals(p), I1 = kdv_integrals(G.p);
  EXPECT_NEAR(I1[0], I0[0], 1e-6);
  EXPECT_NEAR(I1[1], I0[1], 1e-6);

  // the relating function moves by mKdV
  auto dG = curve_ops::derivative(G.curve);
  std::vector<double> f_pair(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) f_pair[j] = det(D.curve.samples[j], dG[j]);
  auto fm = f;
  for (int i = 0; i < 100; ++i) fm = mkdv_step(fm, c, dt);
  EXPECT_LT(max_abs_diff(f_pair, fm), 1e-5);
}

TEST(Hill, MiddleCurveAlignment) {
  auto gamma = oracle::star_curve(0.2, 256);
  auto f = *riccati_periodic(curvature_of(gamma), 0.6);
  auto delta = c_related(gamma, f, 0.6);
  auto M = middle_curve(gamma, delta);
  EXPECT_LT(M.alignment_residual, 1e-8);
}
