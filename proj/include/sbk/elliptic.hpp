// Weierstrass functions on rectangular lattices (real period 2*omega,
// imaginary period 2i*omega_prime_im), evaluated through nome series.
#pragma once

#include <algorithm>
#include <array>

#include "core.hpp"

namespace sbk::elliptic {

struct Lattice {
  double omega = 0;           // real half period
  double omega_prime_im = 0;  // omega' = i * omega_prime_im
  double q = 0;               // nome exp(-pi omega_prime_im / omega)
  double g2 = 0, g3 = 0;
  double e1 = 0, e2 = 0, e3 = 0;
  cplx eta, eta_prime;

  cplx omega_prime() const { return {0, omega_prime_im}; }
};

inline constexpr double pole_tol = 1e-10;

namespace detail {

// Lambert-type sums  sum_{n>=1} n^p q^{2n}/(1-q^{2n})
inline double lambert(double q, int p) {
  double s = 0;
  for (int n = 1; n < 100000; ++n) {
    double q2n = std::pow(q, 2 * n);
    double t = std::pow(double(n), p) * q2n / (1 - q2n);
    s += t;
    if (t < 1e-18 * std::max(1.0, std::abs(s))) break;
  }
  return s;
}

struct Reduced {
  cplx z0;
  long m = 0, n = 0;  // z = z0 + 2m omega + 2n omega'
};

inline Reduced reduce(cplx z, const Lattice& L) {
  Reduced r;
  r.m = std::lround(z.real() / (2 * L.omega));
  r.n = std::lround(z.imag() / (2 * L.omega_prime_im));
  r.z0 = z - cplx(2.0 * double(r.m) * L.omega, 2.0 * double(r.n) * L.omega_prime_im);
  return r;
}

inline void check_pole(cplx z0, const char* fn) {
  if (std::abs(z0) < pole_tol)
    throw PoleError(std::string(fn) + ": argument at a lattice point");
}

// The three series share the factor q^{2n}/(1-q^{2n}) and exponentials of 2inv.
// Returns {S_sin, S_cos_n, S_sin_n2}:
//   S_sin    = sum w_n sin(2nv)
//   S_cos_n  = sum n w_n cos(2nv)
//   S_sin_n2 = sum n^2 w_n sin(2nv)
inline std::array<cplx, 3> series(cplx v, double q) {
  std::array<cplx, 3> s{0, 0, 0};
  if (q == 0) return s;
  const double lq = std::log(q);
  const cplx I(0, 1);
  for (int n = 1; n < 200000; ++n) {
    double q2n = std::exp(2 * n * lq);
    double w = 1 / (1 - q2n);
    // q^{2n} e^{+-2inv}, computed in log form to avoid overflow
    cplx ep = std::exp(2.0 * n * lq + 2.0 * double(n) * I * v);
    cplx em = std::exp(2.0 * n * lq - 2.0 * double(n) * I * v);
    cplx sn = w * (ep - em) / (2.0 * I);
    cplx cn = w * (ep + em) / 2.0;
    s[0] += sn;
    s[1] += double(n) * cn;
    s[2] += double(n) * double(n) * sn;
    double mag = std::abs(ep) + std::abs(em);
    if (double(n) * double(n) * mag < 1e-18 * (1 + std::abs(s[2])) && n > 2) break;
  }
  return s;
}

inline std::array<double, 3> cubic_roots(double g2, double g3) {
  // 4x^3 - g2 x - g3 = 0, three real roots
  double p = -g2 / 4, qq = -g3 / 4;
  std::array<double, 3> r{};
  if (p >= 0) {
    r.fill(0);
  } else {
    double m = 2 * std::sqrt(-p / 3);
    double arg = (3 * qq / (2 * p)) * std::sqrt(-3 / p);
    arg = std::clamp(arg, -1.0, 1.0);
    double th = std::acos(arg) / 3;
    for (int k = 0; k < 3; ++k) r[k] = m * std::cos(th - 2 * pi * k / 3);
  }
  for (auto& x : r) {
    for (int it = 0; it < 4; ++it) {
      double f = 4 * x * x * x - g2 * x - g3, df = 12 * x * x - g2;
      if (std::abs(df) < 1e-300) break;
      double dx = f / df;
      // near a double root Newton is not trusted
      if (std::abs(dx) > 1e-6 * (1 + std::abs(x))) break;
      x -= dx;
    }
  }
  std::sort(r.begin(), r.end(), std::greater<>());
  return r;
}

}  // namespace detail

// zeta on the fundamental rectangle, no reduction
inline cplx zeta_reduced(cplx z0, const Lattice& L) {
  const double s = pi / (2 * L.omega);
  cplx v = s * z0;
  auto S = detail::series(v, L.q);
  return (L.eta.real() / L.omega) * z0 + s * (1.0 / std::tan(v) + 4.0 * S[0]);
}

inline Lattice lattice_from_halfperiods(double omega, double omega_prime_im) {
  if (!std::isfinite(omega) || !std::isfinite(omega_prime_im) || omega <= 0 || omega_prime_im <= 0)
    throw DomainError("lattice_from_halfperiods: half periods must be finite and positive");
  Lattice L;
  L.omega = omega;
  L.omega_prime_im = omega_prime_im;
  L.q = std::exp(-pi * omega_prime_im / omega);
  const double s = pi / (2 * omega);
  const double s2 = s * s;
  L.g2 = s2 * s2 * (4.0 / 3.0) * (1 + 240 * detail::lambert(L.q, 3));
  L.g3 = s2 * s2 * s2 * (8.0 / 27.0) * (1 - 504 * detail::lambert(L.q, 5));
  auto r = detail::cubic_roots(L.g2, L.g3);
  L.e1 = r[0];
  L.e2 = r[1];
  L.e3 = r[2];
  // zeta(omega): v = pi/2, the sine series vanishes
  L.eta = (pi * pi / (4 * omega)) * (1.0 / 3.0 - 8 * detail::lambert(L.q, 1));
  L.eta_prime = (L.eta * L.omega_prime() - cplx(0, pi / 2)) / omega;
  return L;
}

inline cplx wp(cplx z, const Lattice& L) {
  auto r = detail::reduce(z, L);
  detail::check_pole(r.z0, "wp");
  const double s = pi / (2 * L.omega);
  cplx v = s * r.z0;
  auto S = detail::series(v, L.q);
  cplx sv = std::sin(v);
  return -L.eta / L.omega + s * s * (1.0 / (sv * sv) - 8.0 * S[1]);
}

inline cplx wp_prime(cplx z, const Lattice& L) {
  auto r = detail::reduce(z, L);
  detail::check_pole(r.z0, "wp_prime");
  const double s = pi / (2 * L.omega);
  cplx v = s * r.z0;
  auto S = detail::series(v, L.q);
  cplx sv = std::sin(v), cv = std::cos(v);
  return s * s * s * (-2.0 * cv / (sv * sv * sv) + 16.0 * S[2]);
}

inline cplx zeta(cplx z, const Lattice& L) {
  auto r = detail::reduce(z, L);
  detail::check_pole(r.z0, "zeta");
  return zeta_reduced(r.z0, L) + 2.0 * double(r.m) * L.eta + 2.0 * double(r.n) * L.eta_prime;
}

// log sigma, defined modulo 2 pi i
inline cplx log_sigma(cplx z, const Lattice& L) {
  auto r = detail::reduce(z, L);
  const double s = pi / (2 * L.omega);
  cplx v = s * r.z0;
  cplx acc = std::log(2 * L.omega / pi) + L.eta * r.z0 * r.z0 / (2 * L.omega);
  if (std::abs(r.z0) == 0) return cplx(-INFINITY, 0);
  acc += std::log(std::sin(v));
  if (L.q > 0) {
    const double lq = std::log(L.q);
    const cplx I(0, 1);
    for (int n = 1; n < 200000; ++n) {
      cplx ep = std::exp(2.0 * n * lq + 2.0 * I * v);
      cplx em = std::exp(2.0 * n * lq - 2.0 * I * v);
      double q2n = std::exp(2 * n * lq);
      acc += std::log(1.0 - ep) + std::log(1.0 - em) - 2.0 * std::log1p(-q2n);
      if (std::abs(ep) + std::abs(em) < 1e-18 && n > 2) break;
    }
  }
  double m = double(r.m), n = double(r.n);
  cplx shift = 2.0 * m * L.eta + 2.0 * n * L.eta_prime;
  cplx half = m * L.omega + n * L.omega_prime();
  double parity = double((r.m + r.n + r.m * r.n) % 2 != 0);
  acc += shift * (r.z0 + half) + cplx(0, pi * parity);
  return acc;
}

inline cplx sigma(cplx z, const Lattice& L) {
  auto r = detail::reduce(z, L);
  if (std::abs(r.z0) == 0) return 0;
  return std::exp(log_sigma(z, L));
}

// omega' -> infinity limit
struct Degenerate {
  double omega = 0, c = 0;

  double root() const { return std::sqrt(3 * c); }

  cplx wp0(cplx z) const {
    cplx sz = std::sin(root() * z);
    if (std::abs(sz) < pole_tol) throw PoleError("wp0: pole");
    return -c + 3 * c / (sz * sz);
  }
  cplx zeta0(cplx z) const {
    cplx sz = std::sin(root() * z);
    if (std::abs(sz) < pole_tol) throw PoleError("zeta0: pole");
    return c * z + root() * std::cos(root() * z) / sz;
  }
  cplx sigma0(cplx z) const { return std::exp(c * z * z / 2.0) * std::sin(root() * z) / root(); }
};

inline Degenerate degenerate_functions(double omega) {
  if (!(omega > 0) || !std::isfinite(omega)) throw DomainError("degenerate_functions: omega must be positive");
  double s = pi / (2 * omega);
  return {omega, s * s / 3};
}

}  // namespace sbk::elliptic
