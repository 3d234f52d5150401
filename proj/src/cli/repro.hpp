// Desk-scale regeneration of the reference figures. Each figure is computed
// independently and returned as a bundle; the caller writes it.
#pragma once

#include <map>

#include <sbk/lame.hpp>

#include "job.hpp"
#include "render.hpp"

namespace tool::repro {

using namespace sbk;

struct Bundle {
  json report = json::object();
  std::vector<std::pair<std::string, std::string>> files;  // name relative to the figure directory
};

inline json certificate_json(const curves::SelfBacklundCertificate& c) {
  return {{"alpha", c.alpha}, {"c", c.c}, {"residual", c.residual}, {"accepted", c.accepted()}};
}

// Lame curves of winding 1 and 3 with their chords and midpoint curves
inline Bundle weg() {
  Bundle b;
  struct Case {
    int k, n;
    double w;
    const char* name;
  };
  for (auto c : {Case{3, 1, 0.5, "left"}, Case{5, 3, 0.3, "right"}}) {
    auto P = lame::solve_a(c.k, c.n, 0, c.w);
    auto C = lame::build_curve(P, 1024);
    auto A = lame::self_backlund_angles(P, 1024);
    json r = {{"k", c.k}, {"n", c.n}, {"omega_prime", c.w}, {"winding", C.winding},
              {"closure_residual", C.closure_residual}};
    std::optional<double> alpha;
    if (!A.angles.empty()) {
      alpha = A.angles.front().alpha;
      r["certificate"] = certificate_json(curves::verify_self_backlund(C.curve, *alpha));
    }
    b.report[c.name] = r;
    b.files.push_back({std::string("weg_") + c.name + ".json", io::to_json(C.curve).dump(1) + "\n"});
    b.files.push_back({std::string("weg_") + c.name + ".svg", curve_svg(C.curve, alpha)});
  }
  return b;
}

// u tan(alpha) = tan(u alpha) for u = 2/7 on (0, 14 pi)
inline Bundle eqn() {
  Bundle b;
  const double u = 2.0 / 7, top = 14 * pi;
  auto roots = curves::rotation_equation_roots(curves::RotationKind::tan_tan, u, 1e-9, top - 1e-9);
  io::Csv csv({"alpha", "c", "residual"});
  io::Svg svg;
  std::vector<Vec2> dots;
  double worst = 0;
  for (auto& r : roots) {
    csv.row({r.alpha, r.c, r.residual});
    worst = std::max(worst, r.residual);
    dots.push_back({r.alpha, std::atan(u * std::tan(r.alpha)) - r.alpha + pi * std::round(r.alpha / pi)});
  }
  // red: atan(u tan a) - a + pi n on each branch; blue: (u - 1) a + n pi
  for (int n = 0; n <= 14; ++n) {
    std::vector<Vec2> branch;
    for (int i = 1; i < 200; ++i) {
      double a = pi * n - pi / 2 + pi * i / 200.0;
      if (a < 0 || a > top) continue;
      branch.push_back({a, std::atan(u * std::tan(a)) - a + pi * n});
    }
    if (branch.size() > 1) svg.polyline(branch, {"#c0392b", 1});
  }
  // each line clipped to the band |y| <= pi the red graph lives in
  for (int n = 0; n <= 10; ++n) {
    double a0 = std::max(0.0, (pi * n - pi) / (1 - u)), a1 = std::min(top, (pi * n + pi) / (1 - u));
    if (a1 > a0) svg.segment({a0, (u - 1) * a0 + pi * n}, {a1, (u - 1) * a1 + pi * n}, {"#1f4e9c", 0.6});
  }
  svg.dots(dots, "black", 3);
  b.report = {{"u", u}, {"interval", {0.0, top}}, {"roots", roots.size()}, {"max_residual", worst}};
  b.files.push_back({"eqn_roots.csv", csv.str()});
  b.files.push_back({"eqn.svg", svg.str(1200, 300)});
  return b;
}

// simple curves of 2k-fold symmetry, alpha = pi/2, for a large and a small omega'
inline Bundle weg2() {
  Bundle b;
  for (int k : {3, 5, 7}) {
    const double omega = pi / (2.0 * k);
    for (auto [ratio, tag] : {std::pair{2.0, "top"}, std::pair{0.35, "bottom"}}) {
      auto P = lame::solve_a(k, 1, 0, ratio * omega);
      auto C = lame::build_curve(P, 1024);
      auto cert = curves::verify_self_backlund(C.curve, pi / 2);
      CentroaffineCurve d = C.curve;
      d.samples = curve_ops::shifted(C.curve, pi / 2);
      auto M = hill::middle_curve(C.curve, d);
      // the midpoint velocity is lambda (delta - gamma); cusps are sign changes of lambda
      auto dM = curve_ops::to_vec(spectral::derivative(curve_ops::to_complex(M.samples), 2 * pi));
      int cusps = 0;
      for (std::size_t j = 0; j < dM.size(); ++j) {
        std::size_t i = (j + 1) % dM.size();
        double l0 = dot(dM[j], d.samples[j] - C.curve.samples[j]), l1 = dot(dM[i], d.samples[i] - C.curve.samples[i]);
        cusps += (l0 < 0) != (l1 < 0);
      }
      std::string name = "weg2_k" + std::to_string(k) + "_" + tag;
      b.report[name] = {{"k", k},
                        {"omega_prime", ratio * omega},
                        {"certificate", certificate_json(cert)},
                        {"midpoint_cusps", cusps},
                        {"midpoint_alignment", M.alignment_residual}};
      b.files.push_back({name + ".svg", curve_svg(C.curve, pi / 2)});
    }
  }
  return b;
}

// deformations of the circle for k = 3, 4, 5
inline Bundle deform() {
  Bundle b;
  const std::vector<double> s_grid{1, 0.5, 0.25, 0.1, 0.05};
  for (int k : {3, 4, 5}) {
    auto F = lame::deformation_family(k, s_grid);
    io::Svg svg;
    std::vector<Vec2> circle;
    for (int i = 0; i < 256; ++i) circle.push_back({std::cos(2 * pi * i / 256), std::sin(2 * pi * i / 256)});
    svg.polyline(circle, {"black", 1, true});
    json steps = json::array();
    for (auto& st : F.steps) {
      svg.polyline(st.curve.curve.samples, {"#1f4e9c", 0.8, true});
      json angles = json::array();
      for (auto& a : st.angles) angles.push_back(a.alpha);
      steps.push_back({{"s", st.s}, {"angles", angles}});
    }
    b.report["k" + std::to_string(k)] = {
        {"steps", steps}, {"limits", F.limits}, {"reference", F.reference}, {"limit_error", F.limit_error}};
    b.files.push_back({"deform_k" + std::to_string(k) + ".svg", svg.str()});
  }
  return b;
}

// self-Backlund (8,3)- and (8,4)-gons
inline Bundle polys() {
  Bundle b;
  for (int k : {3, 4}) {
    auto P = poly::construct_nk(8, k);
    if (!P) throw ConsistencyError("repro polys: construction failed for k = " + std::to_string(k));
    auto c = poly::is_self_backlund(*P, k);
    std::string name = "poly_8_" + std::to_string(k);
    b.report[name] = {{"c", *c}, {"hill", P->hill_coeffs}, {"winding", poly::winding(*P)}};
    b.files.push_back({name + ".json", io::to_json(*P).dump(1) + "\n"});
    b.files.push_back({name + ".svg", polygon_svg(*P, k)});
  }
  return b;
}

// a closed period-5 carousel and the curve traced by one vertex
inline Bundle carr() {
  Bundle b;
  auto found = carousel::close_carousels(10, 10.5, 8, 2);
  if (found.empty()) throw NumericError("repro carr: no closed carousel in the scan window");
  const auto& C = found.front();
  auto tr = carousel::flow(carousel::make_state(C.polygon), C.shift_time * 5, 1e-12, 400);
  auto body = trajectory_svg(tr);
  b.report = {{"level", C.level},
              {"periods", C.periods},
              {"shift_time", C.shift_time},
              {"monodromy_trace", C.monodromy.trace},
              {"certificate", certificate_json(C.certificate)}};
  b.files.push_back({"carr_traces.svg", body});
  // an SL2 change of frame keeps the curve self-Backlund and makes the picture legible
  auto round = C.curve;
  auto A = rounding(round.samples);
  for (auto& p : round.samples) p = apply(A, p);
  b.files.push_back({"carr_curve.svg", curve_svg(round, pi / 5)});
  b.files.push_back({"carr_curve.json", io::to_json(C.curve).dump(1) + "\n"});
  return b;
}

// a hexagon (n = 6, P_{i+6} = -P_i) under repeated recutting; for n = 3 all
// vertices stay on one central conic and the picture is trivial
inline Bundle recut() {
  Bundle b;
  auto v = poly::symmetric_from_half({{1, 0}, {0.9, 0.6}, {0.3, 1.1}, {-0.2, 0.9}, {-0.8, 1.0}, {-1.1, 0.3}});
  std::vector<Vec2> cloud;
  double rmin = INFINITY, rmax = 0;
  const int iters = 3000;
  for (int it = 0; it < iters; ++it) {
    v = poly::recut_all(std::move(v));
    for (auto p : v) {
      cloud.push_back(p);
      rmin = std::min(rmin, norm(p));
      rmax = std::max(rmax, norm(p));
    }
  }
  io::Svg svg;
  svg.dots(cloud, "#1f4e9c", 0.4);
  b.report = {{"iterations", iters}, {"rmin", rmin}, {"rmax", rmax}};
  b.files.push_back({"recut.svg", svg.str()});
  return b;
}

inline const std::map<std::string, Bundle (*)()>& figures() {
  static const std::map<std::string, Bundle (*)()> f{{"weg", weg},     {"eqn", eqn},     {"weg2", weg2}, {"deform", deform},
                                                     {"polys", polys}, {"carr", carr}, {"recut", recut}};
  return f;
}

}  // namespace tool::repro
