// Hill operator on pi-periodic potentials: Floquet data, lowest periodic
// eigenvalue, periodic Riccati solutions, and KdV / mKdV time stepping.
#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "curve.hpp"

namespace sbk::hill {

struct PeriodicPotential {
  std::vector<double> samples;  // uniform grid over [0, pi)

  std::size_t grid_size() const { return samples.size(); }
  double dt() const { return pi / double(samples.size()); }
  // P = -(1/pi) * integral of p over a period
  double P() const { return -spectral::mean(samples); }
};

inline PeriodicPotential make_potential(std::vector<double> s) {
  if (!is_pow2(s.size())) throw DomainError("potential grid size must be a power of two");
  for (double v : s)
    if (!std::isfinite(v)) throw DomainError("potential has non-finite samples");
  return {std::move(s)};
}

template <class Fn>
PeriodicPotential sample_potential(Fn&& fn, std::size_t M) {
  std::vector<double> s(M);
  for (std::size_t j = 0; j < M; ++j) s[j] = fn(pi * double(j) / double(M));
  return make_potential(std::move(s));
}

struct FloquetData {
  double lambda = 0;
  double trace = 0;
  Eigen::Matrix2d monodromy;
};

inline constexpr double ode_tol = 1e-13;

namespace detail {

using State4 = std::array<double, 4>;
using State2 = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;

inline auto stepper4() {
  return odeint::make_controlled(ode_tol, ode_tol, odeint::runge_kutta_fehlberg78<State4>());
}
inline auto stepper2() {
  return odeint::make_controlled(ode_tol, ode_tol, odeint::runge_kutta_fehlberg78<State2>());
}

inline void guard(const State4& x) {
  for (double v : x)
    if (!std::isfinite(v)) throw NumericError("Hill integration produced non-finite values");
}

}  // namespace detail

inline FloquetData floquet(const PeriodicPotential& p, double lambda) {
  spectral::TrigInterpolant P(p.samples, pi);
  auto rhs = [&](const detail::State4& x, detail::State4& dx, double t) {
    double q = P(t) - lambda;
    dx[0] = x[1];
    dx[1] = q * x[0];
    dx[2] = x[3];
    dx[3] = q * x[2];
  };
  detail::State4 x{1, 0, 0, 1};
  boost::numeric::odeint::integrate_adaptive(detail::stepper4(), rhs, x, 0.0, pi, 0.01);
  detail::guard(x);
  FloquetData F;
  F.lambda = lambda;
  F.monodromy << x[0], x[2], x[1], x[3];
  F.trace = x[0] + x[3];
  return F;
}

inline double discriminant(const PeriodicPotential& p, double lambda) { return floquet(p, lambda).trace; }

inline double lambda0(const PeriodicPotential& p) {
  const double P = p.P();
  auto D = [&](double l) { return discriminant(p, l) - 2; };
  // the discriminant exceeds 2 below the spectrum
  double width = 1;
  double lo = -P - width;
  int expand = 0;
  while (D(lo) <= 0) {
    width *= 2;
    lo = -P - width;
    if (++expand > 60) throw SpectralError("lambda0: no lower bracket found");
  }
  // march up to the first crossing of 2; lambda0 <= -P
  const double hi_limit = -P + 1e-6 * (1 + std::abs(P)) + 1e-9;
  const double h = 0.05;
  double a = lo;
  for (;;) {
    double b = std::min(a + h, hi_limit);
    if (D(b) <= 0) return bisect(D, a, b, 1e-11);
    if (b >= hi_limit) throw SpectralError("lambda0: no crossing below -P");
    a = b;
  }
}

inline double c_max(const PeriodicPotential& p) {
  double l0 = lambda0(p);
  if (!(l0 < 0)) throw DomainError("c_max: lambda0 >= 0, not the curvature of a closed curve");
  return 1 / std::sqrt(-l0);
}

inline double riccati_residual(const PeriodicPotential& p, const std::vector<double>& f, double c) {
  auto df = spectral::derivative(f, pi);
  double r = 0;
  for (std::size_t j = 0; j < f.size(); ++j)
    r = std::max(r, std::abs(c * df[j] - f[j] * f[j] + c * c * p.samples[j] + 1));
  return r;
}

// Periodic solution of c f' - f^2 + c^2 p + 1 = 0 close to +1 for small c,
// or none when |c| exceeds c_max.
inline std::optional<std::vector<double>> riccati_periodic(const PeriodicPotential& p, double c) {
  if (c == 0 || !std::isfinite(c)) throw DomainError("riccati_periodic: c must be nonzero");
  const double lambda = -1 / (c * c);
  auto F = floquet(p, lambda);
  const double D = F.trace;
  if (D < 2) return std::nullopt;
  const double s = std::sqrt(std::max(0.0, D * D - 4));
  const double mu_big = (D + s) / 2;
  const double a = F.monodromy(0, 0), b = F.monodromy(0, 1), cc = F.monodromy(1, 0),
               d = F.monodromy(1, 1);

  // c>0 wants the solution that decays over a period, integrated backwards from pi;
  // c<0 the growing one, integrated forwards. Both directions are stable.
  Eigen::Vector2d v1, v2;
  if (c > 0) {
    v1 << b, d - mu_big;
    v2 << a - mu_big, cc;
  } else {
    v1 << b, mu_big - a;
    v2 << mu_big - d, cc;
  }
  Eigen::Vector2d v = v1.norm() >= v2.norm() ? v1 : v2;
  if (v.norm() == 0) v << 1, 0;  // monodromy is a multiple of the identity
  v.normalize();

  const std::size_t M = p.grid_size();
  spectral::TrigInterpolant P(p.samples, pi);
  auto rhs = [&](const detail::State2& x, detail::State2& dx, double t) {
    dx[0] = x[1];
    dx[1] = (P(t) - lambda) * x[0];
  };
  std::vector<double> times(M + 1);
  std::vector<detail::State2> out(M + 1);
  if (c > 0) {
    for (std::size_t j = 0; j <= M; ++j) times[j] = pi * double(M - j) / double(M);
  } else {
    for (std::size_t j = 0; j <= M; ++j) times[j] = pi * double(j) / double(M);
  }
  detail::State2 x{v(0), v(1)};
  std::size_t idx = 0;
  auto obs = [&](const detail::State2& s, double) { out[idx++] = s; };
  boost::numeric::odeint::integrate_times(detail::stepper2(), rhs, x, times.begin(), times.end(),
                                          c > 0 ? -0.01 : 0.01, obs);
  std::vector<double> y(M), dy(M);
  for (std::size_t j = 0; j < M; ++j) {
    std::size_t k = c > 0 ? M - j : j;  // index of time pi*j/M
    y[j] = out[k][0];
    dy[j] = out[k][1];
  }
  const double sign = y[0] < 0 ? -1 : 1;
  std::vector<double> f(M);
  for (std::size_t j = 0; j < M; ++j) {
    if (!(sign * y[j] > 0)) return std::nullopt;
    f[j] = -c * dy[j] / y[j];
  }
  return f;
}

inline PeriodicPotential curvature_of(const CentroaffineCurve& g) {
  if (!g.closed) throw DomainError("curvature_of: closed curve required");
  curve_ops::require_centroaffine(g, 1e-6, "curvature_of");
  auto d1 = curve_ops::derivative(g, 1), d2 = curve_ops::derivative(g, 2);
  std::vector<double> p(g.size() / 2);
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = det(d2[j], d1[j]);
  return make_potential(std::move(p));
}

inline std::vector<double> periodic_extend(const std::vector<double>& f, std::size_t N) {
  std::vector<double> out(N);
  for (std::size_t j = 0; j < N; ++j) out[j] = f[j % f.size()];
  return out;
}

inline CentroaffineCurve c_related(const CentroaffineCurve& gamma, const std::vector<double>& f, double c,
                                   double tol = 1e-8) {
  if (!gamma.closed) throw DomainError("c_related: closed curve required");
  const std::size_t N = gamma.size();
  if (f.size() * 2 != N) throw DomainError("c_related: f must live on the half grid of the curve");
  auto d = curve_ops::derivative(gamma);
  CentroaffineCurve delta = gamma;
  for (std::size_t j = 0; j < N / 2; ++j) {
    delta.samples[j] = f[j] * gamma.samples[j] + c * d[j];
    delta.samples[j + N / 2] = -delta.samples[j];
  }
  double w = curve_ops::wronskian_residual(delta), r = 0;
  for (std::size_t j = 0; j < N; ++j) r = std::max(r, std::abs(det(gamma.samples[j], delta.samples[j]) - c));
  if (w > tol || r > tol)
    throw ConsistencyError("c_related: residuals " + std::to_string(w) + ", " + std::to_string(r));
  return delta;
}

struct MiddleCurve {
  std::vector<Vec2> samples;
  double alignment_residual = 0;   // max |[G', delta - gamma]|
  std::vector<std::size_t> cusps;  // samples where G' (nearly) vanishes
};

inline MiddleCurve middle_curve(const CentroaffineCurve& gamma, const CentroaffineCurve& delta) {
  if (gamma.size() != delta.size() || !gamma.closed || !delta.closed)
    throw DomainError("middle_curve: closed curves on the same grid required");
  MiddleCurve M;
  const std::size_t N = gamma.size();
  M.samples.resize(N);
  for (std::size_t j = 0; j < N; ++j) M.samples[j] = 0.5 * (gamma.samples[j] + delta.samples[j]);
  auto dG = curve_ops::to_vec(spectral::derivative(curve_ops::to_complex(M.samples), 2 * pi));
  double vmax = 0;
  for (auto v : dG) vmax = std::max(vmax, norm(v));
  for (std::size_t j = 0; j < N; ++j) {
    M.alignment_residual =
        std::max(M.alignment_residual, std::abs(det(dG[j], delta.samples[j] - gamma.samples[j])));
    if (norm(dG[j]) < 1e-6 * vmax) M.cusps.push_back(j);
  }
  return M;
}

// ---- KdV and mKdV ----

namespace detail {

inline std::vector<double> kappa(std::size_t M) {
  std::vector<double> k(M);
  for (std::size_t j = 0; j < M; ++j) k[j] = 2.0 * double(spectral::wavenumber(j, M));
  return k;
}

inline void dealias(std::vector<cplx>& X) {
  const std::size_t M = X.size();
  for (std::size_t j = 0; j < M; ++j)
    if (3 * std::abs(spectral::wavenumber(j, M)) > long(M)) X[j] = 0;
}

inline std::vector<double> real_part(const std::vector<cplx>& z) {
  std::vector<double> r(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) r[i] = z[i].real();
  return r;
}

// Lawson RK4 for u_t = L u + N(u) in Fourier space, with extra ODE state E
// (L = 0 on E). N returns {N(u), dE/dt}.
struct Lawson {
  double dt = 0;
  std::vector<cplx> E1, E2;

  Lawson(const std::vector<cplx>& Lk, double h) : dt(h), E1(Lk.size()), E2(Lk.size()) {
    for (std::size_t j = 0; j < Lk.size(); ++j) {
      E1[j] = std::exp(Lk[j] * (h / 2));
      E2[j] = std::exp(Lk[j] * h);
    }
  }

  template <class Extra, class NL>
  void step(std::vector<cplx>& u, Extra& e, NL&& nl) const {
    const std::size_t M = u.size();
    auto axpy = [](const Extra& a, double s, const Extra& b) {
      Extra r = a;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * b[i];
      return r;
    };
    auto [k1, f1] = nl(u, e);
    std::vector<cplx> u2(M), u3(M), u4(M);
    for (std::size_t j = 0; j < M; ++j) u2[j] = E1[j] * (u[j] + dt / 2 * k1[j]);
    auto [k2, f2] = nl(u2, axpy(e, dt / 2, f1));
    for (std::size_t j = 0; j < M; ++j) u3[j] = E1[j] * u[j] + dt / 2 * k2[j];
    auto [k3, f3] = nl(u3, axpy(e, dt / 2, f2));
    for (std::size_t j = 0; j < M; ++j) u4[j] = E2[j] * u[j] + dt * E1[j] * k3[j];
    auto [k4, f4] = nl(u4, axpy(e, dt, f3));
    for (std::size_t j = 0; j < M; ++j)
      u[j] = E2[j] * u[j] + dt / 6 * (E2[j] * k1[j] + 2.0 * E1[j] * (k2[j] + k3[j]) + k4[j]);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += dt / 6 * (f1[i] + 2 * f2[i] + 2 * f3[i] + f4[i]);
  }
};

inline void check_blowup(const std::vector<double>& v, const char* who) {
  for (double x : v)
    if (!std::isfinite(x) || std::abs(x) > 1e12) throw NumericError(std::string(who) + ": blow-up");
}

// nonlinear term s * d/dt g(u) in Fourier space, dealiased
template <class G>
std::vector<cplx> flux_derivative(const std::vector<cplx>& U, const std::vector<double>& kap, double s, G&& g) {
  auto u = spectral::inv(U);
  std::vector<cplx> w(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) w[j] = g(u[j].real());
  auto W = spectral::fwd(w);
  for (std::size_t j = 0; j < W.size(); ++j) W[j] *= cplx(0, s * kap[j]);
  dealias(W);
  return W;
}

}  // namespace detail

// p_t = -p'''/2 + 3 p p'
inline PeriodicPotential kdv_step(const PeriodicPotential& p, double dt) {
  const std::size_t M = p.grid_size();
  auto kap = detail::kappa(M);
  std::vector<cplx> Lk(M);
  for (std::size_t j = 0; j < M; ++j) Lk[j] = cplx(0, 0.5 * kap[j] * kap[j] * kap[j]);
  std::vector<cplx> U = spectral::fwd(std::vector<cplx>(p.samples.begin(), p.samples.end()));
  std::array<double, 0> none{};
  detail::Lawson(Lk, dt).step(U, none, [&](const std::vector<cplx>& V, const std::array<double, 0>&) {
    return std::pair{detail::flux_derivative(V, kap, 1.5, [](double x) { return x * x; }),
                     std::array<double, 0>{}};
  });
  auto out = detail::real_part(spectral::inv(U));
  detail::check_blowup(out, "kdv_step");
  return {out};
}

// f_t = -f'''/2 + (3/c^2)(f^2 - 1) f'
inline std::vector<double> mkdv_step(const std::vector<double>& f, double c, double dt) {
  if (c == 0) throw DomainError("mkdv_step: c must be nonzero");
  const std::size_t M = f.size();
  auto kap = detail::kappa(M);
  std::vector<cplx> Lk(M);
  for (std::size_t j = 0; j < M; ++j)
    Lk[j] = cplx(0, 0.5 * kap[j] * kap[j] * kap[j] - 3 * kap[j] / (c * c));
  std::vector<cplx> U = spectral::fwd(std::vector<cplx>(f.begin(), f.end()));
  std::array<double, 0> none{};
  detail::Lawson(Lk, dt).step(U, none, [&](const std::vector<cplx>& V, const std::array<double, 0>&) {
    return std::pair{detail::flux_derivative(V, kap, 1 / (c * c), [](double x) { return x * x * x; }),
                     std::array<double, 0>{}};
  });
  auto out = detail::real_part(spectral::inv(U));
  detail::check_blowup(out, "mkdv_step");
  return out;
}

// Coefficients f_2..f_order of the expansion f = 1 + sum c^j f_j of the periodic
// Riccati solution, from the recursion 2 f_j = f_{j-1}' - sum_{i=2}^{j-2} f_i f_{j-i}.
inline std::vector<std::vector<double>> miura_series(const PeriodicPotential& p, int order) {
  if (order > 6) throw ParameterError("miura_series: order above 6 is unsupported");
  std::vector<std::vector<double>> f;  // f[j-2] = f_j
  const std::size_t M = p.grid_size();
  for (int j = 2; j <= order; ++j) {
    std::vector<double> fj(M);
    if (j == 2) {
      for (std::size_t t = 0; t < M; ++t) fj[t] = p.samples[t] / 2;
    } else {
      auto d = spectral::derivative(f[j - 3], pi);
      for (std::size_t t = 0; t < M; ++t) {
        double s = d[t];
        for (int i = 2; i <= j - 2; ++i) s -= f[i - 2][t] * f[j - i - 2][t];
        fj[t] = s / 2;
      }
    }
    f.push_back(std::move(fj));
  }
  return f;
}

// Conserved quantities under KdV: mean of p, p^2 and p^3 + p'^2/2 over a period
inline std::array<double, 3> kdv_integrals(const PeriodicPotential& p) {
  auto d = spectral::derivative(p.samples, pi);
  std::array<double, 3> I{0, 0, 0};
  for (std::size_t j = 0; j < p.grid_size(); ++j) {
    double v = p.samples[j];
    I[0] += v;
    I[1] += v * v;
    I[2] += v * v * v + 0.5 * d[j] * d[j];
  }
  for (auto& x : I) x *= p.dt();
  return I;
}

// ---- joint evolution of a c-related pair ----
//
// Each curve moves by gamma_t = -p'/2 gamma + p gamma'. Its curvature follows KdV and
// the frame (gamma(0), gamma'(0)) follows a linear ODE driven by p, p', p'' at t = 0.

namespace detail {

inline std::array<double, 3> jet_at_zero(const std::vector<cplx>& U, const std::vector<double>& kap) {
  const double M = double(U.size());
  std::array<double, 3> r{0, 0, 0};
  for (std::size_t j = 0; j < U.size(); ++j) {
    bool nyq = j == U.size() / 2;
    r[0] += U[j].real();
    if (!nyq) r[1] += (cplx(0, kap[j]) * U[j]).real();
    r[2] += (-kap[j] * kap[j] * U[j]).real();
  }
  for (auto& x : r) x /= M;
  return r;
}

inline CentroaffineCurve reconstruct(const PeriodicPotential& p, const std::array<double, 4>& frame,
                                     std::size_t N) {
  spectral::TrigInterpolant P(p.samples, pi);
  auto rhs = [&](const State4& x, State4& dx, double t) {
    double q = P(t);
    dx[0] = x[2];
    dx[1] = x[3];
    dx[2] = q * x[0];
    dx[3] = q * x[1];
  };
  std::vector<double> times(N / 2);
  for (std::size_t j = 0; j < N / 2; ++j) times[j] = 2 * pi * double(j) / double(N);
  std::vector<Vec2> half;
  half.reserve(N / 2);
  State4 x{frame[0], frame[1], frame[2], frame[3]};
  boost::numeric::odeint::integrate_times(stepper4(), rhs, x, times.begin(), times.end(), 0.01,
                                          [&](const State4& s, double) { half.emplace_back(s[0], s[1]); });
  CentroaffineCurve g;
  g.closed = true;
  g.dt = 2 * pi / double(N);
  g.samples.resize(N);
  for (std::size_t j = 0; j < N / 2; ++j) {
    g.samples[j] = half[j];
    g.samples[j + N / 2] = -half[j];
  }
  return g;
}

}  // namespace detail

struct EvolvedCurve {
  PeriodicPotential p;
  std::array<double, 4> frame;  // gamma(0), gamma'(0)
  CentroaffineCurve curve;
};

inline EvolvedCurve evolve_curve(const CentroaffineCurve& g, double dt, int steps) {
  auto p = curvature_of(g);
  auto d = curve_ops::derivative(g);
  const std::size_t M = p.grid_size();
  auto kap = detail::kappa(M);
  std::vector<cplx> Lk(M);
  for (std::size_t j = 0; j < M; ++j) Lk[j] = cplx(0, 0.5 * kap[j] * kap[j] * kap[j]);
  std::vector<cplx> U = spectral::fwd(std::vector<cplx>(p.samples.begin(), p.samples.end()));
  std::array<double, 4> F{g.samples[0].x, g.samples[0].y, d[0].x, d[0].y};
  auto nl = [&](const std::vector<cplx>& V, const std::array<double, 4>& e) {
    auto N = detail::flux_derivative(V, kap, 1.5, [](double x) { return x * x; });
    auto [p0, p1, p2] = detail::jet_at_zero(V, kap);
    std::array<double, 4> de;
    double a = -0.5 * p1, b = p0, cc = -0.5 * p2 + p0 * p0, dd = 0.5 * p1;
    for (int i = 0; i < 2; ++i) {
      de[i] = a * e[i] + b * e[2 + i];
      de[2 + i] = cc * e[i] + dd * e[2 + i];
    }
    return std::pair{N, de};
  };
  detail::Lawson rk(Lk, dt);
  for (int s = 0; s < steps; ++s) rk.step(U, F, nl);
  EvolvedCurve out;
  out.p = make_potential(detail::real_part(spectral::inv(U)));
  detail::check_blowup(out.p.samples, "evolve_curve");
  out.frame = F;
  out.curve = detail::reconstruct(out.p, F, g.size());
  return out;
}

}  // namespace sbk::hill
