// Dual curves in the hyperbolic plane: osculating unit ellipses of a
// centroaffine curve as points of the pseudo-sphere ac - b^2 = 1, a + c > 0.
#pragma once

#include <array>

#include "hill.hpp"

namespace sbk::hyp {

// quadratic form a x^2 + 2 b xy + c y^2 as (a, b, c)
using Form = std::array<double, 3>;

// bilinear form of the metric b^2 - ac
inline double minkowski(const Form& X, const Form& Y) { return X[1] * Y[1] - 0.5 * (X[0] * Y[2] + X[2] * Y[0]); }

inline double evaluate(const Form& F, Vec2 p) { return F[0] * p.x * p.x + 2 * F[1] * p.x * p.y + F[2] * p.y * p.y; }

// unit central ellipse through P tangent to Q, [P, Q] = 1
inline Form osculating_ellipse(Vec2 P, Vec2 Q) {
  return {P.y * P.y + Q.y * Q.y, -(P.x * P.y + Q.x * Q.y), P.x * P.x + Q.x * Q.x};
}

// unit central hyperbola cosh(s) P + sinh(s) Q, [P, Q] = 1
inline Form tangent_hyperbola(Vec2 P, Vec2 Q) {
  return {Q.y * Q.y - P.y * P.y, P.x * P.y - Q.x * Q.y, Q.x * Q.x - P.x * P.x};
}

// Lorentz cross product for the metric b^2 - ac: <X x Y, X> = <X x Y, Y> = 0
inline Form cross(const Form& X, const Form& Y) {
  // in (u, v, w) with a = u + v, b = w, c = u - v the metric is v^2 + w^2 - u^2
  auto uvw = [](const Form& F) { return std::array<double, 3>{(F[0] + F[2]) / 2, (F[0] - F[2]) / 2, F[1]}; };
  auto [u1, v1, w1] = uvw(X);
  auto [u2, v2, w2] = uvw(Y);
  // signature (-, +, +): raise the first index
  double u = v1 * w2 - w1 * v2, v = -(w1 * u2 - u1 * w2), w = -(u1 * v2 - v1 * u2);
  return {u + v, w, u - v};
}

struct DualCurve {
  std::vector<Form> samples;
  std::vector<double> t, p;
  std::vector<double> kappa;  // NaN where |1 + p| < cusp_mask
  bool closed = true;
  double sphere_residual = 0;    // |ac - b^2 - 1|
  double speed_residual = 0;     // ||gamma*'| - |1 + p||, relative once |1 + p| > 1
  double relation_residual = 0;  // |(1 + p)(1 + kappa) - 2| / max(1, |1 + p|) on unmasked samples
};

inline constexpr double cusp_mask = 1e-4;

inline DualCurve dual_curve(const CentroaffineCurve& g) {
  curve_ops::require_centroaffine(g, 1e-6, "dual_curve");
  const std::size_t N = g.size();
  auto d1 = curve_ops::derivative(g, 1), d2 = curve_ops::derivative(g, 2);
  DualCurve D;
  D.closed = g.closed;
  std::vector<std::array<cplx, 3>> T(N);
  for (std::size_t j = 0; j < N; ++j) {
    auto [x, y] = g.samples[j];
    auto [dx, dy] = d1[j];
    Form F = osculating_ellipse(g.samples[j], d1[j]);
    if (!(F[0] + F[2] > 0)) throw ConsistencyError("dual_curve: left the upper sheet");
    D.sphere_residual = std::max(D.sphere_residual, std::abs(F[0] * F[2] - F[1] * F[1] - 1));
    D.samples.push_back(F);
    D.t.push_back(g.t(j));
    D.p.push_back(det(d2[j], d1[j]));
    // unit tangent for the signed arc length dtau = (1 + p) dt
    T[j] = {2 * y * dy, -(dx * y + x * dy), 2 * x * dx};
  }
  if (D.sphere_residual > 1e-9)
    throw ConsistencyError("dual_curve: pseudo-sphere residual " + std::to_string(D.sphere_residual));
  auto deriv = [&](const std::vector<cplx>& f) {
    return g.closed ? spectral::derivative(f, 2 * pi) : fd::derivative(f, g.dt, 1);
  };
  std::array<std::vector<cplx>, 3> comp, Tc;
  for (int k = 0; k < 3; ++k)
    for (std::size_t j = 0; j < N; ++j) {
      comp[std::size_t(k)].push_back(D.samples[j][std::size_t(k)]);
      Tc[std::size_t(k)].push_back(T[j][std::size_t(k)]);
    }
  std::array<std::vector<cplx>, 3> dG, dT;
  for (std::size_t k = 0; k < 3; ++k) {
    dG[k] = deriv(comp[k]);
    dT[k] = deriv(Tc[k]);
  }
  D.kappa.assign(N, std::nan(""));
  for (std::size_t j = 0; j < N; ++j) {
    Form G1{dG[0][j].real(), dG[1][j].real(), dG[2][j].real()};
    double s = std::sqrt(std::max(0.0, minkowski(G1, G1)));
    D.speed_residual = std::max(D.speed_residual, std::abs(s - std::abs(1 + D.p[j])) / std::max(1.0, std::abs(1 + D.p[j])));
    if (std::abs(1 + D.p[j]) < cusp_mask) continue;
    const Form& X = D.samples[j];
    Form Tj{T[j][0].real(), T[j][1].real(), T[j][2].real()};
    Form acc;
    for (std::size_t k = 0; k < 3; ++k) acc[k] = dT[k][j].real() / (1 + D.p[j]) - X[k];
    // signed against the normal T x X
    Form Nrm = cross(Tj, X);
    D.kappa[j] = minkowski(acc, Nrm);
    D.relation_residual =
        std::max(D.relation_residual, std::abs((1 + D.p[j]) * (1 + D.kappa[j]) - 2) / std::max(1.0, std::abs(1 + D.p[j])));
  }
  if (D.speed_residual > 1e-7)
    throw ConsistencyError("dual_curve: speed differs from |1 + p| by " + std::to_string(D.speed_residual));
  return D;
}

// sign changes of 1 + p over one period (cyclic for closed curves)
inline int cusp_count(const DualCurve& D) {
  const std::size_t M = D.closed ? D.p.size() / 2 : D.p.size();
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t j = 0; j < M; ++j) {
    lo = std::min(lo, D.p[j]);
    hi = std::max(hi, D.p[j]);
  }
  if (hi - lo < 1e-8) throw DomainError("cusp_count: constant potential, the source is a conic");
  int n = 0;
  for (std::size_t j = 0; j + 1 < M + (D.closed ? 1 : 0); ++j) {
    double u = 1 + D.p[j], v = 1 + D.p[(j + 1) % M];
    n += (u < 0) != (v < 0);
  }
  return n;
}

}  // namespace sbk::hyp
