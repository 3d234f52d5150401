// basic types shared by every module
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbk {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

struct Vec2 {
  double x = 0, y = 0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}
  explicit Vec2(cplx z) : x(z.real()), y(z.imag()) {}

  cplx as_complex() const { return {x, y}; }

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
  Vec2& operator/=(double s) { x /= s; y /= s; return *this; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator/(Vec2 a, double s) { return a /= s; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

// the bracket [a,b]
inline double det(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Error kinds. The CLI maps each to its own exit code.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual int code() const { return 10; }
};
struct DomainError : Error {
  using Error::Error;
  int code() const override { return 11; }
};
struct PoleError : Error {
  using Error::Error;
  int code() const override { return 12; }
};
struct SpectralError : Error {
  using Error::Error;
  int code() const override { return 13; }
};
struct ConsistencyError : Error {
  using Error::Error;
  int code() const override { return 14; }
};
struct NumericError : Error {
  using Error::Error;
  int code() const override { return 15; }
};
struct DegeneracyError : Error {
  using Error::Error;
  int code() const override { return 16; }
};
struct ParameterError : Error {
  using Error::Error;
  int code() const override { return 17; }
};

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

template <class Fn>
double bisect(Fn&& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
  double flo = f(lo);
  if (flo == 0) return lo;
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Roots of f on (lo,hi) by sign-change scan on `nodes` intervals then bisection.
// `valid` filters spurious sign changes (poles).
template <class Fn, class Valid>
std::vector<double> scan_roots(Fn&& f, double lo, double hi, std::size_t nodes, Valid&& valid,
                               double tol = 1e-12) {
  std::vector<double> roots;
  double h = (hi - lo) / double(nodes);
  double x0 = lo, f0 = f(x0);
  for (std::size_t i = 1; i <= nodes; ++i) {
    double x1 = lo + h * double(i);
    double f1 = f(x1);
    if (f0 == 0 && i > 1) {
      if (valid(x0)) roots.push_back(x0);
    } else if ((f0 < 0 && f1 > 0) || (f0 > 0 && f1 < 0)) {
      double r = bisect(f, x0, x1, tol);
      if (valid(r)) roots.push_back(r);
    }
    x0 = x1;
    f0 = f1;
  }
  return roots;
}

}  // namespace sbk
