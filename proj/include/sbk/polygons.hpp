// Centroaffine 2n-gons: Hill coefficients, friezes, butterflies, discrete
// Backlund transforms, recutting, self-Backlund (n,k)-gons and their rigidity.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "core.hpp"

namespace sbk::poly {

inline long wrap(long i, long m) { return ((i % m) + m) % m; }

// vertex i of an origin-symmetric polygon given by all 2n vertices
inline Vec2 vertex(const std::vector<Vec2>& v, long i) { return v[std::size_t(wrap(i, long(v.size())))]; }

struct CentroaffinePolygon {
  int n = 0;
  std::vector<Vec2> vertices;      // P_0 .. P_{2n-1}
  std::vector<double> hill_coeffs;  // a_i = [P_{i-1}, P_{i+1}], i = 0 .. n-1

  Vec2 P(long i) const { return vertex(vertices, i); }
  double bracket(long i, long j) const { return det(P(i), P(j)); }
};

inline constexpr double polygon_tol = 1e-10;

inline std::vector<Vec2> symmetric_from_half(const std::vector<Vec2>& half) {
  std::vector<Vec2> v(half);
  for (auto p : half) v.push_back(-p);
  return v;
}

// validates unit sides, antisymmetry and the discrete Hill recurrence
inline CentroaffinePolygon make_polygon(std::vector<Vec2> vertices, double tol = polygon_tol) {
  if (vertices.size() < 6 || vertices.size() % 2) throw DomainError("make_polygon: need 2n vertices, n >= 3");
  CentroaffinePolygon P;
  P.n = int(vertices.size() / 2);
  P.vertices = std::move(vertices);
  for (int i = 0; i < P.n; ++i)
    if (!(P.vertices[std::size_t(i + P.n)] == -P.vertices[std::size_t(i)]))
      throw ConsistencyError("make_polygon: not origin-symmetric");
  P.hill_coeffs.resize(std::size_t(P.n));
  for (int i = 0; i < 2 * P.n; ++i) {
    if (std::abs(P.bracket(i, i + 1) - 1) > tol)
      throw ConsistencyError("make_polygon: [P_i, P_i+1] = " + std::to_string(P.bracket(i, i + 1)));
    double a = P.bracket(i - 1, i + 1);
    if (i < P.n) P.hill_coeffs[std::size_t(i)] = a;
    if (norm(P.P(i + 1) - (a * P.P(i) - P.P(i - 1))) > tol * (1 + norm(P.P(i + 1))))
      throw ConsistencyError("make_polygon: Hill recurrence violated");
  }
  return P;
}

// the SL2 image with P_0 = (1,0), P_1 = (0,1)
inline CentroaffinePolygon normalized(const CentroaffinePolygon& P) {
  Eigen::Matrix2d B;
  B << P.P(0).x, P.P(1).x, P.P(0).y, P.P(1).y;
  Eigen::Matrix2d A = B.inverse();
  std::vector<Vec2> v(P.vertices.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    Eigen::Vector2d w = A * Eigen::Vector2d(P.vertices[j].x, P.vertices[j].y);
    v[j] = {w.x(), w.y()};
  }
  for (int i = 0; i < P.n; ++i) v[std::size_t(i + P.n)] = -v[std::size_t(i)];
  return make_polygon(std::move(v), 1e-9);
}

struct HillPolygon {
  std::optional<CentroaffinePolygon> polygon;
  Eigen::Matrix2d monodromy;  // columns P_n, P_{n+1} from the seed (1,0), (0,1)
  double closure_residual = 0;
};

inline HillPolygon from_hill(const std::vector<double>& a) {
  const int n = int(a.size());
  if (n < 3) throw DomainError("from_hill: n >= 3");
  std::vector<Vec2> v{{1, 0}, {0, 1}};
  for (int j = 1; j <= n; ++j) v.push_back(a[std::size_t(j % n)] * v[std::size_t(j)] - v[std::size_t(j - 1)]);
  HillPolygon out;
  out.monodromy << v[std::size_t(n)].x, v[std::size_t(n + 1)].x, v[std::size_t(n)].y, v[std::size_t(n + 1)].y;
  out.closure_residual = (out.monodromy + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff();
  if (out.closure_residual < 1e-9) {
    v.resize(std::size_t(n));
    out.polygon = make_polygon(symmetric_from_half(v), 1e-9);
  }
  return out;
}

inline CentroaffinePolygon regular_polygon(int n) {
  return *from_hill(std::vector<double>(std::size_t(n), 2 * std::cos(pi / n))).polygon;
}

// rows[d][i] = [P_i, P_{i+d}], d = 0..n
struct Frieze {
  std::vector<std::vector<double>> rows;
  bool positive = false;
};

inline Frieze frieze(const CentroaffinePolygon& P) {
  Frieze F;
  F.positive = true;
  for (int d = 0; d <= P.n; ++d) {
    std::vector<double> row(std::size_t(P.n));
    for (int i = 0; i < P.n; ++i) {
      row[std::size_t(i)] = P.bracket(i, i + d);
      if (d > 0 && d < P.n && !(row[std::size_t(i)] > 0)) F.positive = false;
    }
    F.rows.push_back(std::move(row));
  }
  return F;
}

// ---- butterflies ----

// the linear involution exchanging A and B
inline Vec2 involution(Vec2 A, Vec2 B, Vec2 X) {
  double ab = det(A, B);
  if (std::abs(ab) < 1e-14 * (1 + norm(A) * norm(B))) throw DegeneracyError("involution: [A,B] = 0");
  return (det(A, X) * A + det(X, B) * B) / ab;
}

inline bool is_butterfly(Vec2 P1, Vec2 P2, Vec2 P3, Vec2 P4, double tol = 1e-12) {
  double s = 1 + norm(P1) * norm(P2) + norm(P2) * norm(P3) + norm(P3) * norm(P4) + norm(P4) * norm(P1);
  return std::abs(det(P1, P2) - det(P4, P3)) < tol * s && std::abs(det(P2, P3) - det(P1, P4)) < tol * s;
}

inline Vec2 butterfly_fourth(Vec2 P1, Vec2 P2, Vec2 P3) {
  if (std::abs(det(P1, P3)) < 1e-14 * (1 + norm(P1) * norm(P3)))
    throw DegeneracyError("butterfly_fourth: [P1,P3] = 0");
  Vec2 P4 = involution(P1, P3, P2);
  double s = 1 + (norm(P1) + norm(P3)) * (norm(P2) + norm(P4));
  // parallel diagonals, midpoints on a line through the origin
  if (!is_butterfly(P1, P2, P3, P4) || std::abs(det(P1 - P3, P2 - P4)) > 1e-12 * s ||
      std::abs(det(P1 + P3, P2 + P4)) > 1e-12 * s)
    throw ConsistencyError("butterfly_fourth: butterfly identities fail");
  return P4;
}

struct BacklundResult {
  std::vector<Vec2> Q;  // Q_1 .. Q_{L+1}
  double rail = 0;      // [P_i, Q_i]
  double closure_gap = 0;
  bool closed = false;
};

// P is a closed vertex cycle P_1..P_L (indices from zero here)
inline BacklundResult backlund_transform(const std::vector<Vec2>& P, Vec2 Q1) {
  const long L = long(P.size());
  if (L < 3) throw DomainError("backlund_transform: need at least three vertices");
  BacklundResult r;
  r.Q.push_back(Q1);
  r.rail = det(P[0], Q1);
  if (std::abs(r.rail) < 1e-14) throw DegeneracyError("backlund_transform: [P_1, Q_1] = 0");
  double scale = 1;
  for (long i = 0; i < L; ++i) {
    Vec2 Qi = r.Q.back(), Pi = vertex(P, i), Pn = vertex(P, i + 1);
    Vec2 Qn;
    try {
      Qn = involution(Qi, Pn, Pi);
    } catch (const DegeneracyError&) {
      throw DegeneracyError("backlund_transform: degenerate involution at step " + std::to_string(i + 1));
    }
    scale = std::max({scale, norm(Qn) * norm(Pn), norm(Qn) * norm(Qi)});
    if (std::abs(det(Qi, Qn) - det(Pi, Pn)) > 1e-10 * scale || std::abs(det(Pn, Qn) - r.rail) > 1e-10 * scale)
      throw ConsistencyError("backlund_transform: determinants drift at step " + std::to_string(i + 1));
    r.Q.push_back(Qn);
  }
  r.closure_gap = norm(r.Q.back() - Q1);
  r.closed = r.closure_gap < 1e-9;
  return r;
}

inline BacklundResult backlund_transform(const CentroaffinePolygon& P, Vec2 Q1) {
  return backlund_transform(P.vertices, Q1);
}

// ---- recutting ----
// On unit-sided polygons T_i is the identity, so it acts on any origin-symmetric
// polygon; T_i exchanges the side determinants at vertex i.

inline std::vector<Vec2> recut(std::vector<Vec2> v, long i) {
  const long m = long(v.size());
  if (m < 6 || m % 2) throw DomainError("recut: need an origin-symmetric 2n-gon");
  const long n = m / 2;
  Vec2 prev = vertex(v, i - 1), cur = vertex(v, i), next = vertex(v, i + 1);
  if (std::abs(det(prev, next)) < 1e-14 * (1 + norm(prev) * norm(next)))
    throw DegeneracyError("recut: [P_i-1, P_i+1] = 0");
  Vec2 p = involution(prev, next, cur);
  v[std::size_t(wrap(i, m))] = p;
  v[std::size_t(wrap(i + n, m))] = -p;
  return v;
}

// T_n ... T_1
inline std::vector<Vec2> recut_all(std::vector<Vec2> v) {
  const long n = long(v.size() / 2);
  for (long i = 1; i <= n; ++i) v = recut(std::move(v), i);
  return v;
}

inline CentroaffinePolygon recut(const CentroaffinePolygon& P, long i) { return make_polygon(recut(P.vertices, i)); }

// ---- self-Backlund (n,k)-gons ----

inline std::optional<double> is_self_backlund(const CentroaffinePolygon& P, int k, double tol = 1e-9) {
  if (k < 2 || k > P.n - 2) throw DomainError("is_self_backlund: 2 <= k <= n-2");
  double c = P.bracket(0, k);
  for (int i = 1; i < P.n; ++i)
    if (std::abs(P.bracket(i, i + k) - c) > tol) return std::nullopt;
  return c;
}

// total turning of P_0 .. P_{2n} in full turns
inline double winding(const CentroaffinePolygon& P) {
  double turn = 0;
  for (int i = 0; i < 2 * P.n; ++i) turn += std::atan2(P.bracket(i, i + 1), dot(P.P(i), P.P(i + 1)));
  return turn / (2 * pi);
}

inline double hill_spread(const CentroaffinePolygon& P) {
  auto [lo, hi] = std::minmax_element(P.hill_coeffs.begin(), P.hill_coeffs.end());
  return *hi - *lo;
}

inline double hill_variance(const CentroaffinePolygon& P) {
  double m = 0, v = 0;
  for (double a : P.hill_coeffs) m += a;
  m /= double(P.n);
  for (double a : P.hill_coeffs) v += (a - m) * (a - m);
  return v / double(P.n);
}

// scale an origin-symmetric polygon with constant side determinant to unit sides
inline CentroaffinePolygon unit_sides(std::vector<Vec2> v) {
  double s = det(v[0], v[1]);
  if (!(s > 0)) throw DegeneracyError("unit_sides: nonpositive side");
  for (auto& p : v) p /= std::sqrt(s);
  const std::size_t n = v.size() / 2;
  for (std::size_t i = 0; i < n; ++i) v[i + n] = -v[i];
  return make_polygon(std::move(v));
}

// regular n-gon (n even) interleaved with its side midpoints dilated by r
inline CentroaffinePolygon midpoint_polygon(int n, double r) {
  if (n < 4 || n % 2) throw DomainError("midpoint_polygon: even n >= 4");
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {
    Vec2 A{std::cos(2 * pi * i / n), std::sin(2 * pi * i / n)};
    Vec2 B{std::cos(2 * pi * (i + 1) / n), std::sin(2 * pi * (i + 1) / n)};
    v.push_back(A);
    v.push_back(0.5 * r * (A + B));
  }
  return unit_sides(std::move(v));
}

// (2j+4, j+2): (1,0), (a+j,1), ..., (a,1), (0,1/a), (-a,1), ..., (-a-j,1)
inline CentroaffinePolygon collinear_polygon(int j) {
  if (j < 1) throw DomainError("collinear_polygon: j >= 1");
  const double a = (std::sqrt(double(j * j + 8)) - j) / 4;
  std::vector<Vec2> half{{1, 0}};
  for (int i = j; i >= 0; --i) half.push_back({a + i, 1});
  half.push_back({0, 1 / a});
  for (int i = 0; i <= j; ++i) half.push_back({-a - i, 1});
  return make_polygon(symmetric_from_half(half));
}

inline std::optional<CentroaffinePolygon> construct_nk(int n, int k) {
  if (n < 4 || k < 2 || k > n - 2) return std::nullopt;
  std::optional<CentroaffinePolygon> P;
  if (n % 2 == 0 && k % 2 == 1)
    P = midpoint_polygon(n, 0.8);
  else if (n == 2 * k)
    P = collinear_polygon(k - 2);
  if (!P || !is_self_backlund(*P, k) || !(hill_variance(*P) > 1e-8)) return std::nullopt;
  return P;
}

// ---- infinitesimal rigidity of the regular 2n-gon ----

struct RigidityReport {
  int n = 0, k = 0;
  std::vector<cplx> eigenvalues;
  std::vector<int> kernel_indices;     // authoritative
  std::vector<int> eigen_indices;      // |lambda_j| < 1e-10
  std::vector<int> closed_form_indices;  // sine form of the tangent identity
  std::vector<int> arithmetic_indices;   // n = 2(k+j), n | (k-1)(j-1)
  int kernel_dim = 0;
  bool nontrivial = false;
  bool criteria_agree = false;
  bool theorem_flexible = false;
};

inline bool arithmetic_criterion(int n, int k, int j) {
  return n == 2 * (k + j) && ((k - 1) * (j - 1)) % n == 0;
}

inline bool exact_kernel(int n, int k, int j) {
  if (j == 0 || j == 1 || j == n - 1) return true;
  for (int jj : {j, n - j}) {
    if ((n == 2 * jj && k % 2 == 1) || (n == 2 * k && jj % 2 == 1) || arithmetic_criterion(n, k, jj)) return true;
  }
  return false;
}

// flexibility cases of the infinitesimal theorem
inline bool theorem_flexible(int n, int k) {
  if (n % 2 == 0 && k % 2 == 1) return true;
  if (n == 2 * k && k % 2 == 0 && k > 2) return true;
  for (int j = 2; j <= n - 2; ++j)
    if (arithmetic_criterion(n, k, j)) return true;
  return false;
}

inline RigidityReport rigidity_analysis(int n, int k) {
  if (k < 2 || 2 * k > n) throw DomainError("rigidity_analysis: 2 <= k <= n/2");
  RigidityReport R;
  R.n = n;
  R.k = k;
  auto mu = [n](int i) { return std::sin(pi * i / n); };
  for (int j = 0; j < n; ++j) {
    cplx w = std::polar(1.0, 2 * pi * j / n);
    cplx lam = mu(k - 1) - mu(k + 1) * w + mu(k + 1) * std::pow(w, k) - mu(k - 1) * std::pow(w, k + 1);
    R.eigenvalues.push_back(lam);
    bool numeric = std::abs(lam) < 1e-10;
    if (numeric) R.eigen_indices.push_back(j);
    bool exact = exact_kernel(n, k, j);
    // near zero the integer criterion decides
    if (std::abs(lam) < 1e-6 ? exact : numeric) R.kernel_indices.push_back(j);
    if (j >= 2 && j <= n - 2) {
      double s = std::sin(pi * j * (k + 1) / n) * std::sin(pi * (k - 1) / n) -
                 std::sin(pi * j * (k - 1) / n) * std::sin(pi * (k + 1) / n);
      if (std::abs(s) < 1e-10) R.closed_form_indices.push_back(j);
      if (arithmetic_criterion(n, k, j) || arithmetic_criterion(n, k, n - j)) R.arithmetic_indices.push_back(j);
    }
  }
  R.kernel_dim = int(R.kernel_indices.size());
  R.nontrivial = R.kernel_dim > 3;
  R.theorem_flexible = theorem_flexible(n, k);
  std::vector<int> inner;
  for (int j : R.kernel_indices)
    if (j >= 2 && j <= n - 2) inner.push_back(j);
  R.criteria_agree = R.eigen_indices == R.kernel_indices && inner == R.closed_form_indices &&
                     R.nontrivial == R.theorem_flexible;
  return R;
}

// ---- random-restart search for self-Backlund (n,k)-gons ----

struct SearchReport {
  int n = 0, k = 0, restarts = 0;
  int converged = 0, regular = 0, nonregular = 0;
  int nonregular_winding_one = 0;
  std::vector<std::vector<double>> nonregular_examples;  // Hill coefficients
  std::vector<int> nonregular_windings;
  bool only_regular() const { return converged > 0 && nonregular == 0; }
  bool only_regular_among_convex() const { return converged > 0 && nonregular_winding_one == 0; }
};

namespace detail {

// unknowns (a_0..a_{n-1}, c); residuals: closure M + Id and [P_i, P_{i+k}] - c
struct SelfBacklundSystem {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  int n, k;
  int inputs() const { return n + 1; }
  int values() const { return n + 4; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
    std::vector<Vec2> v{{1, 0}, {0, 1}};
    for (int j = 1; j <= n + k; ++j) v.push_back(x[j % n] * v[std::size_t(j)] - v[std::size_t(j - 1)]);
    f.resize(n + 4);
    f[0] = v[std::size_t(n)].x + 1;
    f[1] = v[std::size_t(n)].y;
    f[2] = v[std::size_t(n + 1)].x;
    f[3] = v[std::size_t(n + 1)].y + 1;
    for (int i = 0; i < n; ++i) f[4 + i] = det(v[std::size_t(i)], v[std::size_t(i + k)]) - x[n];
    return 0;
  }
};

}  // namespace detail

inline SearchReport search_self_backlund(int n, int k, int restarts = 100, unsigned seed = 1) {
  if (k < 2 || k > n - 2) throw DomainError("search_self_backlund: 2 <= k <= n-2");
  SearchReport S;
  S.n = n;
  S.k = k;
  S.restarts = restarts;
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> U(-0.3, 0.3);
  const double a0 = 2 * std::cos(pi / n);
  detail::SelfBacklundSystem sys{n, k};
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x(n + 1);
    for (int i = 0; i < n; ++i) x[i] = a0 * (1 + U(rng));
    x[n] = std::sin(pi * k / n) / std::sin(pi / n) * (1 + U(rng));
    Eigen::NumericalDiff<detail::SelfBacklundSystem, Eigen::Central> nd(sys);
    Eigen::LevenbergMarquardt<decltype(nd)> lm(nd);
    lm.parameters.xtol = 1e-15;
    lm.parameters.ftol = 1e-15;
    lm.parameters.maxfev = 4000;
    lm.minimize(x);
    Eigen::VectorXd f;
    sys(x, f);
    if (!(f.norm() < 1e-10)) continue;
    ++S.converged;
    std::vector<double> a(x.data(), x.data() + n);
    auto [lo, hi] = std::minmax_element(a.begin(), a.end());
    if (*hi - *lo < 1e-6) {
      ++S.regular;
    } else {
      ++S.nonregular;
      int w = int(std::lround(winding(*from_hill(a).polygon)));
      if (w == 1) ++S.nonregular_winding_one;
      if (S.nonregular_examples.size() < 5) {
        S.nonregular_examples.push_back(a);
        S.nonregular_windings.push_back(w);
      }
    }
  }
  return S;
}

}  // namespace sbk::poly
