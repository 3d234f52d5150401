// Self-Backlund certificates, conic-related families, rotation equations,
// Wegner curves, period-two families and the fourth curve of a butterfly.
#pragma once

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "hill.hpp"

namespace sbk::curves {

struct SelfBacklundCertificate {
  double alpha = 0;
  double c = 0;
  double residual = 0;
  bool accepted() const { return residual < 1e-6 * (1 + std::abs(c)); }
};

inline SelfBacklundCertificate verify_self_backlund(const CentroaffineCurve& g, double alpha) {
  if (!g.closed) throw DomainError("verify_self_backlund: closed curve required");
  if (!(alpha > 0 && alpha < pi)) throw DomainError("verify_self_backlund: alpha must lie in (0, pi)");
  auto s = curve_ops::shifted(g, alpha);
  std::vector<double> d(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) d[j] = det(g.samples[j], s[j]);
  SelfBacklundCertificate cert;
  cert.alpha = alpha;
  cert.c = spectral::mean(d);
  for (double v : d) cert.residual = std::max(cert.residual, std::abs(v - cert.c));
  return cert;
}

// ---- curves c-related to the unit circle or to the line (t, -1) ----

enum class Branch { tan, tanh, coth, one_over_t, line };

struct ConicFamily {
  Branch branch = Branch::tan;
  double c = 1, a = 0;

  double f(double t) const {
    switch (branch) {
      case Branch::tan: return a * std::tan(a * t / c);
      case Branch::tanh: return -a * std::tanh(a * t / c);
      case Branch::coth: return -a / std::tanh(a * t / c);
      case Branch::one_over_t: return -1 / t;
      case Branch::line: return -std::tanh(t / c);
    }
    return 0;
  }

  Vec2 gamma(double t) const {
    return branch == Branch::line ? Vec2{t, -1} : Vec2{std::cos(t), std::sin(t)};
  }
  Vec2 dgamma(double t) const {
    return branch == Branch::line ? Vec2{1, 0} : Vec2{-std::sin(t), std::cos(t)};
  }
  Vec2 operator()(double t) const { return f(t) * gamma(t) + c * dgamma(t); }

  // poles of f inside [lo, hi]
  std::vector<double> poles(double lo, double hi) const {
    std::vector<double> out;
    if (branch == Branch::tan) {
      double step = pi * c / a, first = (pi / 2) * c / a;
      long m0 = long(std::ceil((lo - first) / step));
      for (long m = m0; first + double(m) * step <= hi; ++m) out.push_back(first + double(m) * step);
    } else if (branch == Branch::coth || branch == Branch::one_over_t) {
      if (lo <= 0 && hi >= 0) out.push_back(0);
    }
    return out;
  }
};

inline ConicFamily conic_family(double c, Branch br) {
  ConicFamily F;
  F.branch = br;
  F.c = c;
  switch (br) {
    case Branch::tan:
      if (!(c > 1)) throw DomainError("tan branch needs c > 1");
      F.a = std::sqrt(c * c - 1);
      break;
    case Branch::tanh:
    case Branch::coth:
      if (!(c > 0 && c < 1)) throw DomainError("tanh/coth branches need 0 < c < 1");
      F.a = std::sqrt(1 - c * c);
      break;
    case Branch::one_over_t:
      if (c != 1) throw DomainError("one_over_t branch needs c = 1");
      break;
    case Branch::line:
      if (!(c != 0)) throw DomainError("line branch needs c != 0");
      break;
  }
  return F;
}

inline constexpr double pole_clearance = 1e-2;

inline CentroaffineCurve conic_related(double c, Branch br, double ta, double tb, std::size_t N = 2048) {
  auto F = conic_family(c, br);
  if (!F.poles(ta - pole_clearance, tb + pole_clearance).empty())
    throw DomainError("conic_related: t range meets a pole of f");
  auto g = curve_ops::sample_open(F, ta, tb, N);
  curve_ops::require_centroaffine(g, 1e-8, "conic_related");
  return g;
}

// ---- rotation equations ----

enum class RotationKind { tan_tan, tanh_tan, coth_tan };

struct RotationRoot {
  double alpha = 0;
  double c = 0;         // c-relation constant of the conic-related curve
  double residual = 0;  // max |[delta(t), delta(t+alpha)] - sin(alpha)| on sample points
};

inline double rotation_function(RotationKind kind, double u, double x) {
  switch (kind) {
    case RotationKind::tan_tan: return std::sin(u * x) * std::cos(x) - u * std::cos(u * x) * std::sin(x);
    case RotationKind::tanh_tan: return std::tanh(u * x) * std::cos(x) - u * std::sin(x);
    case RotationKind::coth_tan: return std::cos(x) - u * std::tanh(u * x) * std::sin(x);
  }
  return 0;
}

// The conic-related family whose shifts the equation is meant to describe.
// Note: the coth-branch curve is self-Backlund at the roots of the tanh equation;
// roots of the coth equation leave a large residual, which is reported as is.
inline ConicFamily rotation_family(RotationKind kind, double u) {
  if (kind == RotationKind::tan_tan) return conic_family(1 / std::sqrt(1 - u * u), Branch::tan);
  double c = 1 / std::sqrt(1 + u * u);
  return conic_family(c, kind == RotationKind::tanh_tan ? Branch::tanh : Branch::coth);
}

inline double shift_residual(const ConicFamily& F, double alpha, double target, int samples = 400) {
  double r = 0;
  const double span = F.branch == Branch::tan ? 2 * pi * F.c / F.a : 6.0;
  for (int i = 0; i < samples; ++i) {
    double t = -span / 2 + span * (i + 0.5) / samples;
    bool near = false;
    for (double s : {t, t + alpha})
      for (double p : F.poles(s - 0.05, s + 0.05)) near = near || std::abs(p - s) < 0.05;
    if (near) continue;
    r = std::max(r, std::abs(det(F(t), F(t + alpha)) - target));
  }
  return r;
}

inline std::vector<RotationRoot> rotation_equation_roots(RotationKind kind, double u, double lo, double hi) {
  if (!(u > 0 && u < 1)) throw DomainError("rotation_equation_roots: u must lie in (0,1)");
  if (!(std::isfinite(lo) && std::isfinite(hi) && hi > lo)) throw DomainError("bounded interval required");
  auto fn = [&](double x) { return rotation_function(kind, u, x); };
  auto valid = [&](double x) {
    // near k pi the scan only meets trivial roots of high multiplicity, located to ~1e-5
    if (std::abs(std::sin(x)) < 1e-3) return false;
    if (kind == RotationKind::tan_tan && std::abs(std::cos(x)) < 1e-9) return false;
    return true;
  };
  std::size_t nodes = std::size_t(std::ceil((hi - lo) / pi * 1e4));
  auto F = rotation_family(kind, u);
  std::vector<RotationRoot> out;
  for (double a : scan_roots(fn, lo, hi, nodes, valid)) {
    RotationRoot r;
    r.alpha = a;
    r.c = F.c;
    r.residual = shift_residual(F, a, std::sin(a));
    out.push_back(r);
  }
  return out;
}

inline std::vector<double> infinitesimal_angles(int k) {
  if (k < 2) throw DomainError("infinitesimal_angles: k >= 2");
  auto fn = [k](double x) { return std::sin(k * x) * std::cos(x) - k * std::cos(k * x) * std::sin(x); };
  const double eps = 1e-9;
  return scan_roots(fn, eps, pi - eps, 10000, [](double) { return true; });
}

// ---- Wegner ansatz ----

struct WegnerCurve {
  CentroaffineCurve curve;
  std::vector<double> R, dR;
  double a = 0, b = 0, c = 0;
  double curvature_residual = 0;  // |p - (aR/2 + b/4)|
  double euclid_residual = 0;     // Euclidean curvature against its closed form
};

inline double wegner_cubic(double a, double b, double c, double R) { return ((a * R + b) * R + c) * R - 4; }

inline WegnerCurve wegner_curve(double a, double b, double c, double R0, double T, std::size_t N = 4097) {
  double cub = wegner_cubic(a, b, c, R0);
  if (!(R0 > 0) || cub < -1e-12) throw DomainError("wegner_curve: cubic must be nonnegative at R0 > 0");
  namespace odeint = boost::numeric::odeint;
  using S = std::array<double, 3>;  // R, R', angle
  auto rhs = [&](const S& x, S& dx, double) {
    dx[0] = x[1];
    dx[1] = 1.5 * a * x[0] * x[0] + b * x[0] + c / 2;
    dx[2] = 1 / x[0];
  };
  S x{R0, std::sqrt(std::max(0.0, cub)), 0};
  std::vector<double> times(N);
  for (std::size_t j = 0; j < N; ++j) times[j] = T * double(j) / double(N - 1);
  WegnerCurve W;
  W.a = a;
  W.b = b;
  W.c = c;
  W.curve.closed = false;
  W.curve.t0 = 0;
  W.curve.dt = T / double(N - 1);
  odeint::integrate_times(odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_fehlberg78<S>()), rhs, x,
                          times.begin(), times.end(), 1e-3, [&](const S& s, double) {
                            if (!(s[0] > 0)) throw NumericError("wegner_curve: R left the positive axis");
                            W.R.push_back(s[0]);
                            W.dR.push_back(s[1]);
                            double r = std::sqrt(s[0]);
                            W.curve.samples.emplace_back(r * std::cos(s[2]), r * std::sin(s[2]));
                          });
  // derivatives from the ODE state: G' = r' u + v / r, G'' = (r'' - r^-3) u
  for (std::size_t j = 0; j < N; ++j) {
    double R = W.R[j], dR = W.dR[j], ddR = 1.5 * a * R * R + b * R + c / 2;
    double r = std::sqrt(R), dr = dR / (2 * r), ddr = ddR / (2 * r) - dR * dR / (4 * r * r * r);
    double g2 = ddr - 1 / (r * r * r);
    double p = g2 / r;
    W.curvature_residual = std::max(W.curvature_residual, std::abs(p - (a * R / 2 + b / 4)));
    double speed = std::hypot(dr, 1 / r);
    double k = -g2 / r / (speed * speed * speed);
    double kf = -(4 * a * R + 2 * b) / std::pow(a * R * R + b * R + c, 1.5);
    W.euclid_residual = std::max(W.euclid_residual, std::abs(k - kf));
  }
  if (W.curvature_residual > 1e-8 || W.euclid_residual > 1e-6)
    throw ConsistencyError("wegner_curve: curvature identities fail");
  return W;
}

// ---- period-two families ----
//
// P1' = f P1 + P2/c, P2' = -P1/c - f P2 with f(P2, -P1) = -f(P1, P2).
// Unknowns: a scale s on f and the quarter time T at which P1(T) = P2(0),
// P2(T) = -P1(0). The closed curve is then reparametrized to anti-period pi,
// which turns the bracket [P1, P2] = c into c * pi / (2T).

using PairFunction = std::function<double(Vec2, Vec2)>;

struct PeriodTwoResult {
  double scale = 0, quarter_time = 0;
  double residual = 0;         // boundary residual
  double bracket_drift = 0;    // max |[P1,P2] - c| along the orbit
  double c_curve = 0;          // self-Backlund constant of the returned curve
  std::optional<CentroaffineCurve> curve;
};

namespace detail {

using S4 = std::array<double, 4>;

inline S4 flow_pair(const PairFunction& f, double s, double c, double T, std::vector<double>* times = nullptr,
                    std::vector<S4>* out = nullptr) {
  namespace odeint = boost::numeric::odeint;
  auto rhs = [&](const S4& x, S4& dx, double) {
    Vec2 P1{x[0], x[1]}, P2{x[2], x[3]};
    double v = s * f(P1, P2);
    Vec2 V1 = v * P1 + P2 / c, V2 = -(P1 / c) - v * P2;
    dx = {V1.x, V1.y, V2.x, V2.y};
  };
  S4 x{1, 0, 0, c};
  auto st = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_fehlberg78<S4>());
  if (times) {
    odeint::integrate_times(st, rhs, x, times->begin(), times->end(), 1e-3,
                            [&](const S4& y, double) { out->push_back(y); });
  } else {
    odeint::integrate_adaptive(st, rhs, x, 0.0, T, 1e-3);
  }
  return x;
}

inline Eigen::Vector4d boundary(const PairFunction& f, double s, double c, double T) {
  S4 x;
  try {
    x = flow_pair(f, s, c, T);
  } catch (const std::exception&) {
    return Eigen::Vector4d::Constant(1e6);
  }
  // P1(T) = P2(0) = (0, c), P2(T) = -P1(0) = (-1, 0)
  Eigen::Vector4d r{x[0], x[1] - c, x[2] + 1, x[3]};
  return r.allFinite() ? r : Eigen::Vector4d::Constant(1e6);
}

}  // namespace detail

inline PeriodTwoResult period_two_family(const PairFunction& f, double c, double scale0 = 1,
                                         double quarter0 = -1, std::size_t N = 1024) {
  if (c == 0) throw DomainError("period_two_family: c must be nonzero");
  // oddness spot check
  for (int i = 0; i < 8; ++i) {
    Vec2 A{std::cos(0.7 * i + 0.1), 0.5 + 0.1 * i}, B{-0.3 + 0.2 * i, std::sin(1.3 * i)};
    double s1 = f(A, B), s2 = f(B, -A);
    if (std::abs(s1 + s2) > 1e-9 * (1 + std::abs(s1))) throw DomainError("period_two_family: f is not odd");
  }
  double s = scale0, T = quarter0 > 0 ? quarter0 : std::abs(c) * pi / 2;
  Eigen::Vector4d r = detail::boundary(f, s, c, T);
  double mu = 1e-3;
  for (int it = 0; it < 100 && r.norm() > 1e-13; ++it) {
    Eigen::Matrix<double, 4, 2> J;
    const double h = 1e-7;
    J.col(0) = (detail::boundary(f, s + h, c, T) - detail::boundary(f, s - h, c, T)) / (2 * h);
    J.col(1) = (detail::boundary(f, s, c, T + h) - detail::boundary(f, s, c, T - h)) / (2 * h);
    Eigen::Matrix2d A = J.transpose() * J;
    Eigen::Vector2d g = J.transpose() * r;
    bool improved = false;
    for (int k = 0; k < 30; ++k) {
      Eigen::Matrix2d Ad = A;
      Ad.diagonal() *= (1 + mu);
      Eigen::Vector2d dx = -Ad.ldlt().solve(g);
      if (!(T + dx(1) > 0)) {
        mu *= 10;
        continue;
      }
      Eigen::Vector4d rn = detail::boundary(f, s + dx(0), c, T + dx(1));
      if (rn.norm() < r.norm()) {
        s += dx(0);
        T += dx(1);
        r = rn;
        mu = std::max(mu / 10, 1e-12);
        improved = true;
        break;
      }
      mu *= 10;
    }
    if (!improved) break;
  }
  PeriodTwoResult res;
  res.scale = s;
  res.quarter_time = T;
  res.residual = r.norm();
  if (!(res.residual <= 1e-6)) return res;

  // trace P1 over [0, 2T) on the grid of the reparametrized curve
  curve_ops::check_closed_shape(N);
  const double kappa = 2 * T / pi;  // t = kappa * s
  std::vector<double> times(N / 2);
  for (std::size_t j = 0; j < N / 2; ++j) times[j] = kappa * 2 * pi * double(j) / double(N);
  std::vector<detail::S4> traj;
  detail::flow_pair(f, s, c, 0, &times, &traj);
  CentroaffineCurve g;
  g.closed = true;
  g.dt = 2 * pi / double(N);
  g.samples.resize(N);
  for (std::size_t j = 0; j < N / 2; ++j) {
    const auto& x = traj[j];
    res.bracket_drift = std::max(res.bracket_drift, std::abs(det({x[0], x[1]}, {x[2], x[3]}) - c));
    g.samples[j] = Vec2{x[0], x[1]} / std::sqrt(kappa);
    g.samples[j + N / 2] = -g.samples[j];
  }
  res.c_curve = c / kappa;
  res.curve = g;
  return res;
}

// ---- fourth curve of a butterfly ----

struct BianchiResult {
  CentroaffineCurve Delta;
  double wronskian_residual = 0, b_residual = 0, c_residual = 0;
};

inline BianchiResult bianchi_fourth(const CentroaffineCurve& gamma, const CentroaffineCurve& delta,
                                    const CentroaffineCurve& Gamma, double b, double c, double tol = 1e-7) {
  const std::size_t N = gamma.size();
  if (delta.size() != N || Gamma.size() != N || !gamma.closed || !delta.closed || !Gamma.closed)
    throw DomainError("bianchi_fourth: closed curves on a common grid required");
  for (std::size_t j = 0; j < N; ++j) {
    if (std::abs(det(gamma.samples[j], delta.samples[j]) - c) > tol ||
        std::abs(det(gamma.samples[j], Gamma.samples[j]) - b) > tol)
      throw ConsistencyError("bianchi_fourth: input brackets are not the given constants");
  }
  BianchiResult R;
  R.Delta = gamma;
  for (std::size_t j = 0; j < N / 2; ++j) {
    double w = det(Gamma.samples[j], delta.samples[j]);
    if (std::abs(w) < 1e-12) throw DegeneracyError("bianchi_fourth: [Gamma, delta] vanishes");
    R.Delta.samples[j] = (c * delta.samples[j] - b * Gamma.samples[j]) / w;
    R.Delta.samples[j + N / 2] = -R.Delta.samples[j];
  }
  R.wronskian_residual = curve_ops::wronskian_residual(R.Delta);
  for (std::size_t j = 0; j < N; ++j) {
    R.b_residual = std::max(R.b_residual, std::abs(det(delta.samples[j], R.Delta.samples[j]) - b));
    R.c_residual = std::max(R.c_residual, std::abs(det(Gamma.samples[j], R.Delta.samples[j]) - c));
  }
  if (R.wronskian_residual > tol || R.b_residual > tol || R.c_residual > tol)
    throw ConsistencyError("bianchi_fourth: output residuals above tolerance");
  return R;
}

}  // namespace sbk::curves
