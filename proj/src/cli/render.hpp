// SVG scenes shared by the subcommands and repro.
#pragma once

#include <optional>

#include <sbk/carousel.hpp>
#include <sbk/io.hpp>

namespace tool {

inline const char* palette(std::size_t i) {
  static const char* c[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#16a085", "#7f8c8d", "#b7950b"};
  return c[i % 8];
}

// curve (blue); with alpha: chords to gamma(t + alpha) (green) and the midpoint curve (red)
inline void draw_curve(sbk::io::Svg& s, const sbk::CentroaffineCurve& g, std::optional<double> alpha, int chords = 16) {
  s.polyline(g.samples, {"#1f4e9c", 1.5, g.closed});
  if (!alpha || !g.closed) return;
  auto d = sbk::curve_ops::shifted(g, *alpha);
  std::vector<sbk::Vec2> mid(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) mid[j] = 0.5 * (g.samples[j] + d[j]);
  s.polyline(mid, {"#c0392b", 1, true});
  const std::size_t step = std::max<std::size_t>(1, g.size() / std::size_t(std::max(1, chords)));
  for (std::size_t j = 0; j < g.size(); j += step) s.segment(g.samples[j], d[j], {"#2e8b57", 0.6});
}

inline std::string curve_svg(const sbk::CentroaffineCurve& g, std::optional<double> alpha) {
  sbk::io::Svg s;
  draw_curve(s, g, alpha);
  return s.str();
}

// polygon with chords P_i P_{i+k}
inline std::string polygon_svg(const sbk::poly::CentroaffinePolygon& P, int k) {
  sbk::io::Svg s;
  if (k > 0)
    for (long i = 0; i < 2 * P.n; ++i) s.segment(P.P(i), P.P(i + k), {"#2e8b57", 0.6});
  s.polyline(P.vertices, {"#1f4e9c", 1.5, true});
  s.dots({{0, 0}}, "black");
  return s.str();
}

// unimodular map taking the second moment of the points to a multiple of the identity
inline Eigen::Matrix2d rounding(const std::vector<sbk::Vec2>& pts) {
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  for (auto p : pts) M += Eigen::Vector2d(p.x, p.y) * Eigen::Vector2d(p.x, p.y).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(M);
  if (es.eigenvalues().minCoeff() <= 0) return Eigen::Matrix2d::Identity();
  Eigen::Matrix2d R = es.operatorInverseSqrt();
  return R / std::sqrt(R.determinant());
}

inline sbk::Vec2 apply(const Eigen::Matrix2d& A, sbk::Vec2 p) {
  return {A(0, 0) * p.x + A(0, 1) * p.y, A(1, 0) * p.x + A(1, 1) * p.y};
}

// each vertex leaves its own trace; drawn after an SL2 rounding of the whole picture
inline std::string trajectory_svg(const std::vector<sbk::carousel::CarouselState>& tr) {
  sbk::io::Svg s;
  if (tr.empty()) return s.str();
  const long n = tr.front().polygon.n;
  std::vector<sbk::Vec2> all;
  for (const auto& st : tr) all.insert(all.end(), st.polygon.vertices.begin(), st.polygon.vertices.end());
  auto A = rounding(all);
  for (long i = 0; i < 2 * n; ++i) {
    std::vector<sbk::Vec2> path;
    for (const auto& st : tr) path.push_back(apply(A, st.polygon.P(i)));
    s.polyline(path, {palette(std::size_t(i % n)), 1, false});
  }
  std::vector<sbk::Vec2> first;
  for (auto p : tr.front().polygon.vertices) first.push_back(apply(A, p));
  s.polyline(first, {"black", 0.8, true});
  return s.str();
}

}  // namespace tool
