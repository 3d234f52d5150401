// Closed self-Backlund curves from Lame eigenfunctions on rectangular lattices
// with real half period omega = pi/2k, and their deformation from the circle.
#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <numeric>

#include "curves.hpp"
#include "elliptic.hpp"

namespace sbk::lame {

struct LameParams {
  int k = 0, n = 0, m = 0;
  double omega_prime_im = 0;
  cplx a;
  elliptic::Lattice lattice;
  double residual = 0;  // |f(a) - target|

  double omega() const { return lattice.omega; }
  cplx target() const { return {0, pi * n / (2.0 * k) + pi * m}; }
  cplx multiplier() const { return std::polar(1.0, pi * n / double(k)); }
  double lambda() const { return -elliptic::wp(a, lattice).real(); }
  // m full turns per period 2 omega plus pi n / k
  int expected_winding() const { return 2 * k * m + n; }
  int ceiling_formula_winding() const { return 2 * k * ((m + 1) / 2) + n; }
};

// a zeta(omega) - omega zeta(a)
inline cplx f_value(cplx a, const elliptic::Lattice& L) { return a * L.eta - L.omega * elliptic::zeta(a, L); }

inline void check_indices(int k, int n, int m) {
  if (k < 2 || n <= 0 || n >= k || n % 2 == 0 || std::gcd(n, k) != 1 || m < 0)
    throw ParameterError("lame: need k >= 2, odd 0 < n < k coprime to k, m >= 0");
}

inline LameParams solve_a(int k, int n, int m, double omega_prime_im) {
  check_indices(k, n, m);
  if (!(omega_prime_im > 0) || !std::isfinite(omega_prime_im)) throw DomainError("solve_a: omega' must be positive");
  LameParams P{k, n, m, omega_prime_im, {}, elliptic::lattice_from_halfperiods(pi / (2.0 * k), omega_prime_im)};
  const auto& L = P.lattice;
  const double w = L.omega, W = omega_prime_im, goal = P.target().imag();
  // Im f along the admissible segment, minus the goal
  auto point = [&](double b) { return m == 0 ? cplx(w, b) : cplx(0, b); };
  auto F = [&](double b) { return f_value(point(b), L).imag() - goal; };
  double lo = m == 0 ? 0.0 : 0.5 * W, hi = W;
  if (m > 0)
    for (int i = 0; i < 200 && F(lo) <= 0; ++i) lo *= 0.5;
  double flo = F(lo), fhi = F(hi);
  if (!((flo < 0) != (fhi < 0))) throw ParameterError("solve_a: segment endpoints do not bracket");
  double b = bisect(F, lo, hi, 1e-16 * W, 400);
  P.a = point(b);
  P.residual = std::abs(f_value(P.a, L) - P.target());
  if (!(P.residual < 1e-10)) throw NumericError("solve_a: residual " + std::to_string(P.residual));
  return P;
}

// X_+ and its logarithmic derivative
struct Eigenfunction {
  const LameParams* P;
  cplx za, base;

  explicit Eigenfunction(const LameParams& p) : P(&p) {
    const auto& L = p.lattice;
    za = elliptic::zeta(p.a, L);
    base = elliptic::log_sigma(L.omega_prime(), L) - elliptic::log_sigma(p.a + L.omega_prime(), L);
  }
  cplx operator()(double t) const {
    const auto& L = P->lattice;
    cplx wp = L.omega_prime();
    return std::exp(-t * za + elliptic::log_sigma(P->a + t + wp, L) - elliptic::log_sigma(t + wp, L) + base);
  }
  cplx log_derivative(double t) const {
    const auto& L = P->lattice;
    cplx wp = L.omega_prime();
    return elliptic::zeta(P->a + t + wp, L) - za - elliptic::zeta(t + wp, L);
  }
  double wronskian(double t) const {
    cplx x = (*this)(t);
    return std::imag(std::conj(x) * x * log_derivative(t));
  }
};

struct LameCurve {
  LameParams params;
  CentroaffineCurve curve;
  double wronskian_scale = 0;  // W, the curve is X_+ / sqrt(W)
  double b0 = 0;               // X_+'(0) = i b0
  int winding = 0;
  double wronskian_spread = 0, quasi_residual = 0, closure_residual = 0, potential_residual = 0;
};

inline LameCurve build_curve(const LameParams& P, std::size_t N = 512) {
  curve_ops::check_closed_shape(N);
  Eigenfunction X(P);
  LameCurve out;
  out.params = P;
  cplx x0 = X(0), d0 = x0 * X.log_derivative(0);
  if (std::abs(x0 - 1.0) > 1e-10 || std::abs(d0.real()) > 1e-9)
    throw ConsistencyError("build_curve: X(0) = 1, X'(0) = ib violated");
  out.b0 = d0.imag();
  const double W = X.wronskian(0);
  if (!(W > 0)) throw ConsistencyError("build_curve: nonpositive Wronskian");
  out.wronskian_scale = W;
  const double s = 1 / std::sqrt(W);

  const double dt = 2 * pi / double(N);
  std::vector<cplx> z(N / 2);
  for (std::size_t j = 0; j < N / 2; ++j) z[j] = s * X(dt * double(j));
  out.curve = curve_ops::sample_closed(
      [&](double t) {
        cplx v = z[std::size_t(std::lround(t / dt))];
        return Vec2{v.real(), v.imag()};
      },
      N);

  // invariants checked against the formula itself
  const cplx mu = P.multiplier();
  const double w2 = 2 * P.omega();
  for (int i = 0; i < 64; ++i) {
    double t = pi * i / 64.0;
    cplx x = X(t);
    out.quasi_residual = std::max(out.quasi_residual, std::abs(X(t + w2) - mu * x) * s);
    out.closure_residual = std::max(out.closure_residual, std::abs(X(t + pi) + x) * s);
    out.wronskian_spread = std::max(out.wronskian_spread, std::abs(X.wronskian(t) / W - 1));
  }
  if (out.quasi_residual > 1e-8 || out.closure_residual > 1e-8 || out.wronskian_spread > 1e-8)
    throw ConsistencyError("build_curve: quasi-periodicity violated");

  double turn = 0;
  for (std::size_t j = 0; j < N; ++j) {
    cplx u = out.curve.samples[j].as_complex(), v = out.curve.samples[(j + 1) % N].as_complex();
    double step = std::arg(v / u);
    if (std::abs(step) > pi / 2) throw DomainError("build_curve: grid too coarse to track the winding");
    turn += step;
  }
  out.winding = int(std::lround(turn / (2 * pi)));
  if (out.winding != P.expected_winding())
    throw ConsistencyError("build_curve: winding " + std::to_string(out.winding));

  auto p = hill::curvature_of(out.curve);
  const double wa = elliptic::wp(P.a, P.lattice).real();
  for (std::size_t j = 0; j < p.grid_size(); ++j) {
    double exact = 2 * elliptic::wp(cplx(p.dt() * double(j), P.omega_prime_im), P.lattice).real() + wa;
    out.potential_residual = std::max(out.potential_residual, std::abs(p.samples[j] - exact));
  }
  return out;
}

// ---- self-Backlund angles ----
//
// With Phi(alpha) = log sigma(a+alpha) - log sigma(a-alpha) - 2 alpha zeta(a) the real part
// vanishes identically on both admissible segments, and Im Phi = 2 G with
//   G(alpha) = int_0^alpha Im zeta(a+s) ds - alpha Im zeta(a).
// Im zeta(a+s) is 2 omega periodic, so G is tabulated over one period.

class ReducedEquation {
 public:
  explicit ReducedEquation(const LameParams& p) : P(p) {
    const double w2 = 2 * P.omega(), beta = P.a.imag();
    cells = std::max<std::size_t>(16, std::size_t(std::ceil(w2 / (0.5 * beta))));
    h = w2 / double(cells);
    slope = elliptic::zeta(P.a, P.lattice).imag();
    table.assign(cells + 1, 0.0);
    for (std::size_t j = 0; j < cells; ++j) table[j + 1] = table[j] + piece(h * double(j), h * double(j + 1));
  }

  double integrand(double s) const { return elliptic::zeta(P.a + s, P.lattice).imag(); }

  double G(double alpha) const {
    double per = table[cells];
    double whole = std::floor(alpha / (h * double(cells)));
    double r = alpha - whole * h * double(cells);
    auto j = std::min(cells - 1, std::size_t(r / h));
    return whole * per + table[j] + piece(h * double(j), r) - alpha * slope;
  }
  double dG(double alpha) const { return integrand(alpha) - slope; }

  // node values G(j h), j = 0..k*cells, covering [0, pi]
  double node(std::size_t j) const {
    return double(j / cells) * table[cells] + table[j % cells] - h * double(j) * slope;
  }
  std::size_t nodes() const { return std::size_t(P.k) * cells; }
  double spacing() const { return h; }
  double period_integral() const { return table[cells]; }

 private:
  double piece(double lo, double hi) const {
    if (hi <= lo) return 0;
    return boost::math::quadrature::gauss<double, 64>::integrate([this](double s) { return integrand(s); }, lo, hi);
  }

  LameParams P;
  std::size_t cells = 0;
  double h = 0, slope = 0;
  std::vector<double> table;
};

struct SelfBacklundAngle {
  double alpha = 0, c = 0, residual = 0;
  int level = 0;       // G(alpha) = pi * level
  double slope = 0;    // G'(alpha), nonzero
};

struct AngleReport {
  std::vector<SelfBacklundAngle> angles;
  int count_k_minus_2 = 0;      // predicted for n = 1
  int count_k_minus_n_1 = 0;    // predicted by the level count
  bool counts_agree() const {
    return int(angles.size()) == count_k_minus_n_1 && int(angles.size()) == count_k_minus_2;
  }
};

inline AngleReport self_backlund_angles(const LameParams& P, std::size_t N = 512) {
  ReducedEquation R(P);
  auto curve = build_curve(P, N);
  AngleReport rep;
  rep.count_k_minus_2 = P.k - 2;
  rep.count_k_minus_n_1 = P.k - P.n - 1;
  const std::size_t M = R.nodes();
  const double end = R.node(M);
  const double top = std::max(0.0, end), bottom = std::min(0.0, end);
  // G(0) = 0 and G(pi) is a multiple of pi: those levels only carry the trivial roots
  for (int l = int(std::floor(bottom / pi)); l <= int(std::ceil(top / pi)); ++l) {
    const double level = pi * l;
    if (std::abs(level) < 1e-6 || std::abs(level - end) < 1e-6) continue;
    auto F = [&](double x) { return R.G(x) - level; };
    double prev = R.node(0) - level;
    for (std::size_t j = 1; j <= M; ++j) {
      double cur = R.node(j) - level;
      bool change = (prev < 0 && cur > 0) || (prev > 0 && cur < 0);
      double lo = R.spacing() * double(j - 1), hi = R.spacing() * double(j);
      prev = cur;
      if (!change) continue;
      // alpha = 0 and alpha = pi are trivial
      double x = bisect(F, lo, hi, 1e-14);
      if (x < 1e-9 || x > pi - 1e-9) continue;
      SelfBacklundAngle A;
      A.alpha = x;
      A.level = l;
      A.slope = R.dG(x);
      if (!(std::abs(A.slope) > 1e-8)) throw ConsistencyError("self_backlund_angles: tangential root");
      auto cert = curves::verify_self_backlund(curve.curve, x);
      A.c = cert.c;
      A.residual = cert.residual;
      if (!(cert.residual < 1e-7))
        throw ConsistencyError("self_backlund_angles: root " + std::to_string(x) + " fails the determinant test (" +
                               std::to_string(cert.residual) + ")");
      rep.angles.push_back(A);
    }
  }
  std::sort(rep.angles.begin(), rep.angles.end(),
            [](const auto& u, const auto& v) { return u.alpha < v.alpha; });
  return rep;
}

// ---- deformation from the circle ----

struct DeformationStep {
  double s = 0, q = 0;
  LameCurve curve;
  std::vector<SelfBacklundAngle> angles;
};

struct DeformationFamily {
  int k = 0;
  std::vector<DeformationStep> steps;
  std::vector<double> limits;     // extrapolated to s = 0
  std::vector<double> reference;  // roots of tan(k alpha) = k tan(alpha)
  double limit_error = 0;
};

// omega'_s = omega_prime_im / s; the default base is the square lattice
inline DeformationFamily deformation_family(int k, const std::vector<double>& s_grid, double omega_prime_im = 0,
                                            std::size_t N = 512) {
  if (k < 3) throw ParameterError("deformation_family: k >= 3");
  if (s_grid.size() < 2) throw DomainError("deformation_family: need at least two grid points");
  for (std::size_t i = 0; i < s_grid.size(); ++i)
    if (!(s_grid[i] > 0 && s_grid[i] <= 1) || (i && !(s_grid[i] < s_grid[i - 1])))
      throw DomainError("deformation_family: s_grid must decrease inside (0, 1]");
  if (omega_prime_im <= 0) omega_prime_im = pi / (2.0 * k);

  DeformationFamily fam;
  fam.k = k;
  fam.reference = curves::infinitesimal_angles(k);
  for (double s : s_grid) {
    DeformationStep st;
    st.s = s;
    auto P = solve_a(k, 1, 0, omega_prime_im / s);
    st.q = P.lattice.q;
    st.curve = build_curve(P, N);
    st.angles = self_backlund_angles(P, N).angles;
    if (!fam.steps.empty()) {
      const auto& prev = fam.steps.back().angles;
      if (prev.size() != st.angles.size())
        throw NumericError("deformation_family: angle count changed at s = " + std::to_string(s));
      double gap = pi;
      for (std::size_t i = 0; i + 1 < prev.size(); ++i) gap = std::min(gap, prev[i + 1].alpha - prev[i].alpha);
      for (std::size_t i = 0; i < prev.size(); ++i)
        if (std::abs(st.angles[i].alpha - prev[i].alpha) > 0.5 * gap)
          throw NumericError("deformation_family: branch jump at s = " + std::to_string(s));
    }
    fam.steps.push_back(std::move(st));
  }
  // linear in the nome through the last two steps
  const auto& A = fam.steps[fam.steps.size() - 2];
  const auto& B = fam.steps.back();
  for (std::size_t i = 0; i < B.angles.size(); ++i) {
    double a1 = A.angles[i].alpha, a2 = B.angles[i].alpha;
    double lim = A.q == B.q ? a2 : a2 - B.q * (a1 - a2) / (A.q - B.q);
    fam.limits.push_back(lim);
    double best = pi;
    for (double r : fam.reference) best = std::min(best, std::abs(r - lim));
    fam.limit_error = std::max(fam.limit_error, best);
  }
  if (fam.limits.size() != fam.reference.size() || fam.limit_error > 1e-4)
    throw NumericError("deformation_family: limits miss the circle's angles by " + std::to_string(fam.limit_error));
  return fam;
}

}  // namespace sbk::lame
