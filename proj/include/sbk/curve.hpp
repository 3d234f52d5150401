// Sampled centroaffine curves: closed (anti-periodic on [0, 2pi)) or open arcs.
#pragma once

#include <algorithm>
#include <functional>

#include "spectral.hpp"

namespace sbk {

struct CentroaffineCurve {
  std::vector<Vec2> samples;
  bool closed = true;
  double t0 = 0;
  double dt = 0;

  std::size_t size() const { return samples.size(); }
  double t(std::size_t j) const { return t0 + dt * double(j); }
};

namespace fd {

// Fornberg weights for the m-th derivative at x0 from nodes xs
inline std::vector<double> weights(double x0, const std::vector<double>& xs, int m) {
  const int n = int(xs.size()) - 1;
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1, c4 = xs[0] - x0;
  c[0][0] = 1;
  for (int i = 1; i <= n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1, c5 = c4;
    c4 = xs[i] - x0;
    for (int j = 0; j < i; ++j) {
      double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

// derivative of uniformly spaced data, 9-point stencils (one-sided at the ends)
template <class T>
std::vector<T> derivative(const std::vector<T>& f, double h, int m) {
  const int N = int(f.size()), W = 9;
  if (N < W) throw DomainError("fd::derivative: need at least 9 samples");
  std::vector<T> out(N);
  std::vector<double> xs(W);
  for (int j = 0; j < N; ++j) {
    int s = std::clamp(j - W / 2, 0, N - W);
    for (int i = 0; i < W; ++i) xs[i] = double(s + i - j);
    auto w = weights(0.0, xs, m);
    T acc{};
    for (int i = 0; i < W; ++i) acc += w[i] * f[s + i];
    out[j] = acc / std::pow(h, m);
  }
  return out;
}

}  // namespace fd

namespace curve_ops {

inline std::vector<cplx> to_complex(const std::vector<Vec2>& v) {
  std::vector<cplx> z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = v[i].as_complex();
  return z;
}

inline std::vector<Vec2> to_vec(const std::vector<cplx>& z) {
  std::vector<Vec2> v(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) v[i] = Vec2(z[i]);
  return v;
}

inline std::vector<Vec2> derivative(const CentroaffineCurve& g, int order = 1) {
  if (g.closed) return to_vec(spectral::derivative(to_complex(g.samples), 2 * pi, order));
  return to_vec(fd::derivative(to_complex(g.samples), g.dt, order));
}

inline double wronskian_residual(const CentroaffineCurve& g) {
  auto d = derivative(g);
  double r = 0;
  for (std::size_t j = 0; j < g.size(); ++j) r = std::max(r, std::abs(det(g.samples[j], d[j]) - 1));
  return r;
}

// gamma(t_j + alpha) for a closed curve
inline std::vector<Vec2> shifted(const CentroaffineCurve& g, double alpha) {
  return to_vec(spectral::shift(to_complex(g.samples), 2 * pi, alpha));
}

inline void check_closed_shape(std::size_t N) {
  if (N < 256 || !is_pow2(N)) throw DomainError("closed curve needs N >= 256, a power of two");
}

// Samples gamma(2 pi j / N) for j < N/2 and fills the second half by antisymmetry.
inline CentroaffineCurve sample_closed(const std::function<Vec2(double)>& gamma, std::size_t N) {
  check_closed_shape(N);
  CentroaffineCurve c;
  c.closed = true;
  c.t0 = 0;
  c.dt = 2 * pi / double(N);
  c.samples.resize(N);
  for (std::size_t j = 0; j < N / 2; ++j) {
    c.samples[j] = gamma(c.dt * double(j));
    c.samples[j + N / 2] = -c.samples[j];
  }
  return c;
}

inline CentroaffineCurve sample_open(const std::function<Vec2(double)>& gamma, double ta, double tb,
                                     std::size_t N) {
  if (N < 9 || !(tb > ta)) throw DomainError("open arc needs N >= 9 and a nonempty range");
  CentroaffineCurve c;
  c.closed = false;
  c.t0 = ta;
  c.dt = (tb - ta) / double(N - 1);
  c.samples.resize(N);
  for (std::size_t j = 0; j < N; ++j) c.samples[j] = gamma(c.t(j));
  return c;
}

inline void require_centroaffine(const CentroaffineCurve& g, double tol, const char* who) {
  if (g.closed) {
    check_closed_shape(g.size());
    for (std::size_t j = 0; j < g.size() / 2; ++j)
      if (!(g.samples[j + g.size() / 2] == -g.samples[j]))
        throw ConsistencyError(std::string(who) + ": curve is not anti-periodic");
  }
  double r = wronskian_residual(g);
  if (!(r <= tol))
    throw ConsistencyError(std::string(who) + ": Wronskian deviates by " + std::to_string(r));
}

// rescale a closed curve so that its Wronskian is exactly one on average
inline CentroaffineCurve normalized(CentroaffineCurve g) {
  auto d = derivative(g);
  double w = 0;
  for (std::size_t j = 0; j < g.size(); ++j) w += det(g.samples[j], d[j]);
  w /= double(g.size());
  if (!(w > 0)) throw DegeneracyError("normalized: nonpositive Wronskian");
  for (auto& p : g.samples) p /= std::sqrt(w);
  return g;
}

}  // namespace curve_ops
}  // namespace sbk
