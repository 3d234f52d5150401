// Fourier tools for periodic samples: derivatives, shifts, point evaluation.
#pragma once

#include <unsupported/Eigen/FFT>

#include "core.hpp"

namespace sbk::spectral {

inline std::vector<cplx> fwd(const std::vector<cplx>& x) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.fwd(out, x);
  return out;
}

inline std::vector<cplx> inv(const std::vector<cplx>& X) {
  Eigen::FFT<double> fft;
  std::vector<cplx> out;
  fft.inv(out, X);
  return out;
}

// signed integer wavenumber of FFT bin k
inline long wavenumber(std::size_t k, std::size_t N) {
  return k <= N / 2 ? long(k) : long(k) - long(N);
}

// d^order/dt^order of samples on a uniform grid over one period of length L
inline std::vector<cplx> derivative(const std::vector<cplx>& x, double L, int order = 1) {
  const std::size_t N = x.size();
  auto X = fwd(x);
  const double s = 2 * pi / L;
  for (std::size_t k = 0; k < N; ++k) {
    if (N % 2 == 0 && k == N / 2 && order % 2 == 1) {
      X[k] = 0;
      continue;
    }
    cplx ik(0, s * double(wavenumber(k, N)));
    X[k] *= std::pow(ik, order);
  }
  return inv(X);
}

inline std::vector<double> derivative(const std::vector<double>& x, double L, int order = 1) {
  std::vector<cplx> z(x.begin(), x.end());
  auto d = derivative(z, L, order);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = d[i].real();
  return out;
}

// values at t_j + delta
inline std::vector<cplx> shift(const std::vector<cplx>& x, double L, double delta) {
  const std::size_t N = x.size();
  auto X = fwd(x);
  const double s = 2 * pi / L;
  for (std::size_t k = 0; k < N; ++k) {
    double w = s * double(wavenumber(k, N));
    if (N % 2 == 0 && k == N / 2)
      X[k] *= std::cos(w * delta);
    else
      X[k] *= std::exp(cplx(0, w * delta));
  }
  return inv(X);
}

inline double mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / double(x.size());
}

// Trigonometric interpolant of real samples; evaluation at arbitrary t.
class TrigInterpolant {
 public:
  TrigInterpolant() = default;
  TrigInterpolant(const std::vector<double>& samples, double period) : L_(period) {
    const std::size_t N = samples.size();
    std::vector<cplx> z(samples.begin(), samples.end());
    auto X = fwd(z);
    c0_ = X[0].real() / double(N);
    std::size_t K = N / 2;
    coef_.resize(K);
    for (std::size_t k = 1; k <= K; ++k) {
      cplx c = X[k] / double(N);
      // Nyquist bin is counted once
      coef_[k - 1] = (N % 2 == 0 && k == K) ? c : 2.0 * c;
    }
    // trailing negligible modes
    double big = std::abs(c0_);
    for (auto& c : coef_) big = std::max(big, std::abs(c));
    while (!coef_.empty() && std::abs(coef_.back()) < 1e-18 * big) coef_.pop_back();
  }

  double operator()(double t) const {
    cplx e = std::exp(cplx(0, 2 * pi * t / L_)), ek = 1;
    double v = c0_;
    for (const auto& c : coef_) {
      ek *= e;
      v += (c * ek).real();
    }
    return v;
  }

  double period() const { return L_; }

 private:
  double L_ = 1, c0_ = 0;
  std::vector<cplx> coef_;
};

}  // namespace sbk::spectral
