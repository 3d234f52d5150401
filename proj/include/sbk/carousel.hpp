// The xi field on centroaffine 2n-gons, its integrals, the presymplectic form,
// the n = 5 frieze Hamiltonian and the monodromy of 10-periodic carousels.
#pragma once

#include <boost/numeric/odeint.hpp>
#include <optional>

#include "curves.hpp"
#include "polygons.hpp"

namespace sbk::carousel {

using poly::CentroaffinePolygon;

// a tangent vector: one Vec2 per vertex P_0 .. P_{n-1}; the other half is antisymmetric
using Tangent = std::vector<Vec2>;

namespace detail {

inline Vec2 at(const std::vector<Vec2>& half, long i) {
  const long n = long(half.size());
  long j = poly::wrap(i, 2 * n);
  return j < n ? half[std::size_t(j)] : -half[std::size_t(j - n)];
}

inline std::vector<Vec2> half_of(const CentroaffinePolygon& P) {
  return {P.vertices.begin(), P.vertices.begin() + P.n};
}

// v_i + v_{i+1} = b_i. Odd n: unique. Even n: needs sum (-1)^i b_i = 0; gauge sum (-1)^i v_i = 0.
inline std::vector<double> alternating_solve(const std::vector<double>& b) {
  const std::size_t n = b.size();
  std::vector<double> v(n);
  if (n % 2) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += (j % 2 ? -1 : 1) * b[(i + j) % n];
      v[i] = s / 2;
    }
    return v;
  }
  double alt = 0, scale = 0;
  for (std::size_t i = 0; i < n; ++i) {
    alt += (i % 2 ? -1 : 1) * b[i];
    scale += std::abs(b[i]);
  }
  if (std::abs(alt) > 1e-10 * (1 + scale))
    throw ConsistencyError("xi: even n needs a vanishing alternating sum of a_i, got " + std::to_string(alt));
  v[0] = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) v[i + 1] = b[i] - v[i];
  double g = 0;
  for (std::size_t i = 0; i < n; ++i) g += (i % 2 ? -1 : 1) * v[i];
  g /= double(n);
  for (std::size_t i = 0; i < n; ++i) v[i] -= (i % 2 ? -1 : 1) * g;
  return v;
}

}  // namespace detail

inline std::vector<double> hill_of(const std::vector<Vec2>& half) {
  const long n = long(half.size());
  std::vector<double> a(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) a[std::size_t(i)] = det(detail::at(half, i - 1), detail::at(half, i + 1));
  return a;
}

// V_i = v_i P_i - P_{i-1} with v_i + v_{i+1} = a_i
inline Tangent xi_half(const std::vector<Vec2>& half) {
  auto v = detail::alternating_solve(hill_of(half));
  Tangent V(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) V[i] = v[i] * half[i] - detail::at(half, long(i) - 1);
  return V;
}

struct XiField {
  std::vector<Vec2> V;  // 2n vectors, V_{i+n} = -V_i
  double residual = 0;  // defining equations
};

inline XiField xi(const CentroaffinePolygon& P) {
  auto h = xi_half(detail::half_of(P));
  XiField F;
  F.V = poly::symmetric_from_half(h);
  for (long i = 0; i < 2 * P.n; ++i) {
    Vec2 Vi = poly::vertex(F.V, i), Vn = poly::vertex(F.V, i + 1);
    F.residual = std::max({F.residual, std::abs(det(P.P(i), Vi) - 1),
                           std::abs(det(Vi, P.P(i + 1)) + det(P.P(i), Vn))});
  }
  if (F.residual > 1e-10) throw ConsistencyError("xi: defining equations fail by " + std::to_string(F.residual));
  return F;
}

// ---- integrals and the sl2 action ----

struct Integrals {
  double I = 0, J = 0, K = 0;
  double invariant() const { return J * J - 4 * I * K; }
};

inline Integrals integrals(const std::vector<Vec2>& half) {
  Integrals r;
  for (long i = 0; i < long(half.size()); ++i) {
    Vec2 p = detail::at(half, i), q = detail::at(half, i + 1);
    r.I += p.x * q.x;
    r.J += p.x * q.y + q.x * p.y;
    r.K += p.y * q.y;
  }
  return r;
}

inline Integrals d_integrals(const std::vector<Vec2>& half, const Tangent& w) {
  Integrals r;
  for (long i = 0; i < long(half.size()); ++i) {
    Vec2 p = detail::at(half, i), q = detail::at(half, i + 1);
    Vec2 dp = detail::at(w, i), dq = detail::at(w, i + 1);
    r.I += dp.x * q.x + p.x * dq.x;
    r.J += dp.x * q.y + p.x * dq.y + dq.x * p.y + q.x * dp.y;
    r.K += dp.y * q.y + p.y * dq.y;
  }
  return r;
}

inline Tangent gen_e(const std::vector<Vec2>& half) {
  Tangent t;
  for (auto p : half) t.push_back({0, p.x});
  return t;
}
inline Tangent gen_h(const std::vector<Vec2>& half) {
  Tangent t;
  for (auto p : half) t.push_back({p.x, -p.y});
  return t;
}
inline Tangent gen_f(const std::vector<Vec2>& half) {
  Tangent t;
  for (auto p : half) t.push_back({p.y, 0});
  return t;
}

// nu = 2K e + J h - 2I f, vertical for the projection to the moduli space
inline Tangent nu(const std::vector<Vec2>& half) {
  auto [I, J, K] = integrals(half);
  auto e = gen_e(half), h = gen_h(half), f = gen_f(half);
  Tangent t(half.size());
  for (std::size_t i = 0; i < half.size(); ++i) t[i] = 2 * K * e[i] + J * h[i] - 2 * I * f[i];
  return t;
}

// ---- presymplectic form ----

// largest change of a side determinant along w
inline double constraint_defect(const std::vector<Vec2>& half, const Tangent& w) {
  double r = 0, s = 0;
  for (long i = 0; i < long(half.size()); ++i) {
    r = std::max(r, std::abs(det(detail::at(w, i), detail::at(half, i + 1)) +
                             det(detail::at(half, i), detail::at(w, i + 1))));
    s = std::max(s, norm(w[std::size_t(i)]));
  }
  return r / (1 + s);
}

inline double omega_raw(const std::vector<Vec2>& half, const Tangent& u, const Tangent& w) {
  double r = 0;
  for (long i = 0; i < long(half.size()); ++i) {
    Vec2 ui = detail::at(u, i), un = detail::at(u, i + 1), wi = detail::at(w, i), wn = detail::at(w, i + 1);
    r += un.x * wi.y - wn.x * ui.y + ui.x * wn.y - wi.x * un.y;
  }
  return r;
}

inline double presymplectic(const CentroaffinePolygon& P, const Tangent& u, const Tangent& w) {
  auto half = detail::half_of(P);
  if (u.size() != half.size() || w.size() != half.size()) throw DomainError("presymplectic: size mismatch");
  if (constraint_defect(half, u) > 1e-9 || constraint_defect(half, w) > 1e-9)
    throw ConsistencyError("presymplectic: vectors not tangent to the unit-determinant constraints");
  return omega_raw(half, u, w);
}

// random vector in the kernel of the constraint differential
inline Tangent random_tangent(const std::vector<Vec2>& half, std::mt19937& rng) {
  const int n = int(half.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    // d[P_i, P_{i+1}] = [dP_i, P_{i+1}] + [P_i, dP_{i+1}]
    Vec2 q = detail::at(half, i + 1), p = detail::at(half, i);
    D(i, 2 * i) += q.y;
    D(i, 2 * i + 1) -= q.x;
    double sgn = i + 1 < n ? 1 : -1;
    int j = (i + 1) % n;
    D(i, 2 * j) -= sgn * p.y;
    D(i, 2 * j + 1) += sgn * p.x;
  }
  Eigen::MatrixXd Z = Eigen::FullPivLU<Eigen::MatrixXd>(D).kernel();
  std::normal_distribution<double> N01;
  Eigen::VectorXd c(Z.cols());
  for (auto& x : c) x = N01(rng);
  Eigen::VectorXd w = Z * c;
  Tangent t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[std::size_t(i)] = {w(2 * i), w(2 * i + 1)};
  return t;
}

// ---- the field on Hill coefficients ----

// sum_i a_i (a_{i+1} - a_{i+2} + ... - a_{i+n-1}) d/da_i
inline std::vector<double> reduced_field(const std::vector<double>& a) {
  const std::size_t n = a.size();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 1; j < n; ++j) s += (j % 2 ? 1 : -1) * a[(i + j) % n];
    r[i] = a[i] * s;
  }
  return r;
}

// da_i(w) with a_i = [P_{i-1}, P_{i+1}]
inline std::vector<double> pushforward(const std::vector<Vec2>& half, const Tangent& w) {
  const long n = long(half.size());
  std::vector<double> r(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    r[std::size_t(i)] = det(detail::at(w, i - 1), detail::at(half, i + 1)) + det(detail::at(half, i - 1), detail::at(w, i + 1));
  return r;
}

// ---- n = 5 ----

inline double frieze5_hamiltonian(double x, double y) {
  if (!(x > 0 && y > 0)) throw DomainError("frieze5_hamiltonian: x, y must be positive");
  return x + y + (x + 1) / y + (y + 1) / x + (x + y + 1) / (x * y);
}

inline std::vector<double> frieze5_row(double x, double y) {
  return {(x + y + 1) / (x * y), x, (y + 1) / x, (x + 1) / y, y};
}

inline CentroaffinePolygon decagon(double x, double y) {
  if (!(x > 0 && y > 0)) throw DomainError("decagon: x, y must be positive");
  auto H = poly::from_hill(frieze5_row(x, y));
  if (!H.polygon) throw ConsistencyError("decagon: frieze does not close");
  return *H.polygon;
}

// (x, y) = (a_1, a_4)
inline std::pair<double, double> frieze5_coords(const std::vector<double>& a) { return {a[1], a[4]}; }

// the reduced field in (x, y)
inline std::pair<double, double> frieze5_field(double x, double y) {
  auto r = reduced_field(frieze5_row(x, y));
  return {r[1], r[4]};
}

// ---- trajectories ----

struct CarouselState {
  CentroaffinePolygon polygon;
  double t = 0;
  double I = 0, J = 0, K = 0;
};

inline CarouselState make_state(const CentroaffinePolygon& P, double t = 0) {
  if (P.n % 2 == 0) throw DomainError("carousel: n must be odd");
  auto q = integrals(detail::half_of(P));
  return {P, t, q.I, q.J, q.K};
}

inline void check_state(const CarouselState& s) {
  auto q = integrals(detail::half_of(s.polygon));
  double d = std::max({std::abs(q.I - s.I), std::abs(q.J - s.J), std::abs(q.K - s.K)});
  if (d > 1e-9) throw ConsistencyError("CarouselState: cached integrals are stale by " + std::to_string(d));
}

namespace detail {

using Flat = std::vector<double>;

inline std::vector<Vec2> unflat(const Flat& s) {
  std::vector<Vec2> h(s.size() / 2);
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = {s[2 * i], s[2 * i + 1]};
  return h;
}

inline Flat flat(const std::vector<Vec2>& h) {
  Flat s;
  for (auto p : h) {
    s.push_back(p.x);
    s.push_back(p.y);
  }
  return s;
}

// scales P_i by s_i so that every side determinant is one; returns max |s_i - 1|
inline double project(std::vector<Vec2>& half) {
  const long n = long(half.size());
  std::vector<double> b(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    double d = det(at(half, i), at(half, i + 1));
    if (!(d > 0)) throw NumericError("carousel: side determinant left the positive axis");
    b[std::size_t(i)] = -std::log(d);
  }
  auto l = alternating_solve(b);
  double m = 0;
  for (long i = 0; i < n; ++i) {
    double s = std::exp(l[std::size_t(i)]);
    half[std::size_t(i)] *= s;
    m = std::max(m, std::abs(s - 1));
  }
  return m;
}

}  // namespace detail

inline constexpr double projection_budget = 1e-9;

// Integrates xi from s over [s.t, s.t + T]; returns the states at `samples` + 1 uniform times.
inline std::vector<CarouselState> flow(const CarouselState& s, double T, double tol = 1e-12, int samples = 100) {
  namespace odeint = boost::numeric::odeint;
  if (s.polygon.n % 2 == 0) throw DomainError("flow: n must be odd");
  if (!(T > 0) || samples < 1) throw DomainError("flow: need T > 0 and at least one sample");
  using detail::Flat;
  auto rhs = [](const Flat& x, Flat& dx, double) { dx = detail::flat(xi_half(detail::unflat(x))); };
  // local error well below the drift budget
  const double loc = std::max(tol * 1e-2, 1e-15);
  auto stepper = odeint::make_controlled(loc, loc, odeint::runge_kutta_fehlberg78<Flat>());
  Flat x = detail::flat(detail::half_of(s.polygon));
  double t = s.t, dt = std::min(1e-2, T / samples);
  const double scale = 1 + std::max({std::abs(s.I), std::abs(s.J), std::abs(s.K)});
  std::vector<CarouselState> out{s};
  for (int k = 1; k <= samples; ++k) {
    const double target = s.t + T * k / samples;
    int guard = 0;
    while (t < target - 1e-15 * (1 + std::abs(target))) {
      if (++guard > 1000000) throw NumericError("flow: step size collapsed");
      double h = std::min(dt, target - t);
      double h_try = h;
      if (stepper.try_step(rhs, x, t, h_try) == odeint::success) {
        dt = std::max(h_try, dt);
        if (h == target - t) t = target;  // land exactly
        auto half = detail::unflat(x);
        if (detail::project(half) > projection_budget)
          throw NumericError("flow: constraint projection exceeds budget");
        x = detail::flat(half);
        auto q = integrals(half);
        double drift = std::max({std::abs(q.I - s.I), std::abs(q.J - s.J), std::abs(q.K - s.K)});
        if (drift > 10 * tol * scale) { char b[64]; std::snprintf(b, sizeof b, "%.3e", drift); throw NumericError(std::string("flow: integrals drift by ") + b); }
      } else {
        dt = h_try;
      }
    }
    auto half = detail::unflat(x);
    auto P = poly::make_polygon(poly::symmetric_from_half(half), 1e-9);
    out.push_back(make_state(P, t));
  }
  return out;
}

inline CentroaffinePolygon flow_to(const CentroaffinePolygon& P, double T, double tol = 1e-12) {
  if (T == 0) return P;
  return flow(make_state(P), T, tol, 1).back().polygon;
}

// ---- monodromy of the 10-periodic carousel ----

struct Monodromy {
  Eigen::Matrix2d A;
  Eigen::Matrix2d B = Eigen::Matrix2d::Identity();  // phi_tau(P) = B P
  double trace = 0, angle = 0;  // rotation angle in (-pi, pi], sign from A(1,0)
  double period_angle = 0;      // same for B
  double period = 0;            // tau: return time of (x, y)
  double t0 = 0;                // shift time, T(phi_t P) ~ phi_{t + t0}(P)
  int shift_index = 0;          // t0 = shift_index * tau / 5
  double fit_residual = 0;
  double level = 0;             // H(x, y)
  bool fixed_point = false;     // regular decagon
  std::string section = "y = y0, crossed in the starting direction; Hermite interpolation";
};

namespace detail {

// least-squares A with A P_{i+shift} = Q_i, projected to SL2
inline std::pair<Eigen::Matrix2d, double> sl2_fit(const CentroaffinePolygon& P, const CentroaffinePolygon& Q,
                                                  int shift = 1) {
  Eigen::Matrix2d S = Eigen::Matrix2d::Zero(), G = Eigen::Matrix2d::Zero();
  for (long i = 0; i < 2 * P.n; ++i) {
    Eigen::Vector2d p(P.P(i + shift).x, P.P(i + shift).y), q(Q.P(i).x, Q.P(i).y);
    S += q * p.transpose();
    G += p * p.transpose();
  }
  Eigen::Matrix2d A = S * G.inverse();
  double d = A.determinant();
  if (!(d > 0)) throw NumericError("monodromy: fitted map reverses orientation");
  A /= std::sqrt(d);
  double r = 0;
  for (long i = 0; i < 2 * P.n; ++i) {
    Eigen::Vector2d p(P.P(i + shift).x, P.P(i + shift).y), q(Q.P(i).x, Q.P(i).y);
    r = std::max(r, (A * p - q).norm());
  }
  return {A, r};
}

inline double rotation_angle(const Eigen::Matrix2d& A) {
  double c = std::clamp(A.trace() / 2, -1.0, 1.0);
  double s = std::sqrt(1 - c * c);
  return std::atan2(A(1, 0) >= 0 ? s : -s, c);
}

inline double shift_mismatch(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(b[i] - a[(i + 1) % a.size()]));
  return m;
}

}  // namespace detail

inline Monodromy monodromy(const CentroaffinePolygon& P0, double tol = 1e-12) {
  if (P0.n != 5) throw DomainError("monodromy: decagons only");
  Monodromy M;
  auto [x0, y0] = frieze5_coords(P0.hill_coeffs);
  M.level = frieze5_hamiltonian(x0, y0);
  auto [fx, fy] = frieze5_field(x0, y0);
  if (std::hypot(fx, fy) < 1e-9) {
    // regular decagon: no reduced motion, t0 = 0
    M.fixed_point = true;
    std::tie(M.A, M.fit_residual) = detail::sl2_fit(P0, P0);
  } else {
    if (std::abs(fy) < 1e-6 * std::hypot(fx, fy))
      throw NumericError("monodromy: start point is tangent to the section");
    // reduced flow in (x, y) to find the return time
    using S2 = std::array<double, 2>;
    namespace odeint = boost::numeric::odeint;
    auto rhs = [](const S2& z, S2& dz, double) {
      auto [u, v] = frieze5_field(z[0], z[1]);
      dz = {u, v};
    };
    auto st = odeint::make_controlled(1e-14, 1e-14, odeint::runge_kutta_fehlberg78<S2>());
    S2 z{x0, y0};
    double t = 0, dt = 1e-3;
    const double dir = fy > 0 ? 1 : -1;
    bool left = false;
    std::optional<double> tau;
    for (int guard = 0; guard < 200000 && !tau; ++guard) {
      S2 prev = z;
      double tp = t, h = dt;
      if (st.try_step(rhs, z, t, h) != odeint::success) {
        dt = h;
        continue;
      }
      dt = h;
      double g0 = dir * (prev[1] - y0), g1 = dir * (z[1] - y0);
      if (g1 > 1e-3 * std::abs(fy)) left = true;
      if (left && g0 < 0 && g1 >= 0) {
        // cubic Hermite for y on [tp, t]
        S2 d0, d1;
        rhs(prev, d0, 0);
        rhs(z, d1, 0);
        double H = t - tp;
        auto y_at = [&](double s) {
          double u = (s - tp) / H, h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u),
                 h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
          return h00 * prev[1] + h10 * H * d0[1] + h01 * z[1] + h11 * H * d1[1] - y0;
        };
        double s = bisect(y_at, tp, t, 1e-15);
        // Newton polish on the integrated flow
        for (int it = 0; it < 4; ++it) {
          S2 w = prev;
          odeint::integrate_adaptive(odeint::make_controlled(1e-15, 1e-15, odeint::runge_kutta_fehlberg78<S2>()),
                                     rhs, w, tp, s, (s - tp) / 4);
          S2 dw;
          rhs(w, dw, 0);
          s -= (w[1] - y0) / dw[1];
        }
        tau = s;
      }
    }
    if (!tau) throw NumericError("monodromy: no return to the section");
    M.period = *tau;
    double best = INFINITY;
    CentroaffinePolygon Q = P0, Qbest = P0;
    for (int j = 1; j <= 4; ++j) {
      Q = flow_to(Q, M.period / 5, tol);
      double m = detail::shift_mismatch(P0.hill_coeffs, Q.hill_coeffs);
      if (m < best) {
        best = m;
        M.shift_index = j;
        Qbest = Q;
      }
    }
    if (best > 1e-6) throw NumericError("monodromy: no flow time matches the cyclic shift");
    M.t0 = M.shift_index * M.period / 5;
    std::tie(M.A, M.fit_residual) = detail::sl2_fit(P0, Qbest);
    double rB;
    std::tie(M.B, rB) = detail::sl2_fit(P0, flow_to(Q, M.period / 5, tol), 0);
    M.fit_residual = std::max(M.fit_residual, rB);
  }
  if (M.fit_residual > 1e-7) throw NumericError("monodromy: SL2 fit residual " + std::to_string(M.fit_residual));
  M.trace = M.A.trace();
  M.angle = detail::rotation_angle(M.A);
  M.period_angle = detail::rotation_angle(M.B);
  return M;
}

// point on the diagonal x = y > golden ratio with H = level
inline CentroaffinePolygon decagon_at_level(double level) {
  const double g = (1 + std::sqrt(5.0)) / 2, hmin = 5 * g;
  if (!(level > hmin)) throw DomainError("decagon_at_level: level must exceed the minimum 5(1+sqrt5)/2");
  auto h = [&](double x) { return frieze5_hamiltonian(x, x) - level; };
  double hi = 2 * g;
  while (h(hi) < 0) hi *= 2;
  double x = bisect(h, g, hi, 1e-15);
  return decagon(x, x);
}

struct ClosedCarousel {
  double level = 0;
  int periods = 0;          // m: shift time t0 + m tau
  double shift_time = 0;    // t0 + m tau
  Monodromy monodromy;
  CentroaffinePolygon polygon;
  CentroaffineCurve curve;  // P_0(t) rescaled to anti-period pi and unit Wronskian
  curves::SelfBacklundCertificate certificate;
};

inline Eigen::Matrix2d closing_matrix(const Monodromy& M, int m) {
  Eigen::Matrix2d C = M.A;
  for (int i = 0; i < m; ++i) C = C * M.B;
  return C;
}

// angle of A B^m: the monodromy for the shift time t0 + m tau
inline double closing_angle(const Monodromy& M, int m) { return detail::rotation_angle(closing_matrix(M, m)); }

// P_0 along one anti-period 5 s, as a closed centroaffine curve
inline CentroaffineCurve carousel_curve(const CentroaffinePolygon& P, double s, std::size_t N = 4096,
                                        double tol = 1e-12) {
  curve_ops::check_closed_shape(N);
  if (!(s > 0)) throw DomainError("carousel_curve: shift time must be positive");
  auto traj = flow(make_state(P), 5 * s, tol, int(N / 2));
  const double lam = std::sqrt(pi / (5 * s));
  CentroaffineCurve c;
  c.closed = true;
  c.dt = 2 * pi / double(N);
  c.samples.resize(N);
  for (std::size_t j = 0; j < N / 2; ++j) {
    c.samples[j] = lam * traj[j].polygon.P(0);
    c.samples[j + N / 2] = -c.samples[j];
  }
  return c;
}

// Levels in [lo, hi] where the angle of A B^m crosses zero.
inline std::vector<ClosedCarousel> close_carousels(double lo, double hi, int m, int scan = 24,
                                                   std::size_t N = 4096) {
  if (!(hi > lo) || scan < 1) throw DomainError("close_carousels: empty level range");
  if (m < 0) throw DomainError("close_carousels: m >= 0");
  auto angle = [m](double c) { return closing_angle(monodromy(decagon_at_level(c)), m); };
  // C(1,0) - C(0,1) is a positive multiple of sin(angle); linear at the root, unlike the trace
  auto skew = [m](double c) {
    Eigen::Matrix2d C = closing_matrix(monodromy(decagon_at_level(c)), m);
    return C(1, 0) - C(0, 1);
  };
  std::vector<ClosedCarousel> out;
  double c0 = lo, f0 = angle(lo);
  for (int i = 1; i <= scan; ++i) {
    double c1 = lo + (hi - lo) * i / scan, f1 = angle(c1);
    // a jump across +-pi is a wrap, not a root
    if ((f0 < 0) != (f1 < 0) && std::abs(f1 - f0) < pi) {
      ClosedCarousel C;
      C.level = bisect(skew, c0, c1, 1e-15 * c1, 80);
      C.periods = m;
      C.polygon = decagon_at_level(C.level);
      C.monodromy = monodromy(C.polygon);
      C.shift_time = C.monodromy.t0 + m * C.monodromy.period;
      C.curve = carousel_curve(C.polygon, C.shift_time, N);
      C.certificate = curves::verify_self_backlund(C.curve, pi / 5);
      out.push_back(std::move(C));
    }
    c0 = c1;
    f0 = f1;
  }
  return out;
}

// ---- the minor inequality sum a_i >= 2n cos(pi/n) ----

struct MinorInequality {
  double lhs = 0, rhs = 0;
  bool equality = false;
};

inline MinorInequality minor_inequality_check(const CentroaffinePolygon& P) {
  MinorInequality r;
  for (double a : P.hill_coeffs) r.lhs += a;
  r.rhs = 2 * P.n * std::cos(pi / P.n);
  if (r.lhs < r.rhs - 1e-10) throw ConsistencyError("minor_inequality_check: inequality violated");
  r.equality = poly::hill_spread(P) < 1e-9;
  return r;
}

// radii bound from the proof of compactness: r_i in [C^-3/2, C^3/2], C = max r_i r_{i+1}
struct RadiusBound {
  double C = 0, rmin = INFINITY, rmax = 0;
  bool holds() const { return rmax <= std::pow(C, 1.5) && rmin >= std::pow(C, -1.5); }
};

inline RadiusBound radius_bound(const std::vector<CarouselState>& traj) {
  RadiusBound b;
  for (auto& s : traj)
    for (long i = 0; i < 2 * s.polygon.n; ++i) {
      double r = norm(s.polygon.P(i));
      b.C = std::max(b.C, r * norm(s.polygon.P(i + 1)));
      b.rmin = std::min(b.rmin, r);
      b.rmax = std::max(b.rmax, r);
    }
  return b;
}

}  // namespace sbk::carousel
