// Subcommand wiring for the sbk tool.

#include <cstdio>
#include <iostream>

#include <sbk/hyperbolic.hpp>
#include <sbk/lame.hpp>

#include "app.hpp"
#include "job.hpp"
#include "render.hpp"
#include "repro.hpp"

using namespace sbk;
using tool::Job;
using tool::json;
namespace fs = std::filesystem;

namespace {

// accepts "0.25" or "2/7"
double parse_real(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return std::stod(s);
    return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("number", "cannot parse '" + s + "'");
  }
}

void say(const std::string& line) { std::cout << line << '\n'; }

hill::PeriodicPotential load_potential(const std::string& potential, const std::string& curve) {
  if (potential.empty() == curve.empty()) throw CLI::ValidationError("input", "give exactly one of --potential or --curve");
  if (!curve.empty()) return hill::curvature_of(io::read_curve(curve));
  auto s = io::potential_from_json(io::read_json(potential));
  if (!is_pow2(s.size())) throw io::FormatError(potential + ": potential grid size must be a power of two");
  return hill::make_potential(std::move(s));
}

curves::Branch parse_branch(const std::string& s) {
  static const std::map<std::string, curves::Branch> m{{"tan", curves::Branch::tan},
                                                      {"tanh", curves::Branch::tanh},
                                                      {"coth", curves::Branch::coth},
                                                      {"one_over_t", curves::Branch::one_over_t},
                                                      {"line", curves::Branch::line}};
  return m.at(s);
}

curves::RotationKind parse_kind(const std::string& s) {
  static const std::map<std::string, curves::RotationKind> m{{"tan_tan", curves::RotationKind::tan_tan},
                                                            {"tanh_tan", curves::RotationKind::tanh_tan},
                                                            {"coth_tan", curves::RotationKind::coth_tan}};
  return m.at(s);
}

json vec_json(const std::vector<Vec2>& v) {
  json a = json::array();
  for (auto p : v) a.push_back({p.x, p.y});
  return a;
}

// ---- leaves ----

struct Leaf {
  CLI::App* app;
  std::function<void(Job&)> run;
};

std::vector<Leaf> leaves;

CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& help, std::function<void(Job&)> run) {
  auto* a = parent->add_subcommand(name, help);
  a->fallthrough();
  leaves.push_back({a, std::move(run)});
  return a;
}

void add_elliptic(CLI::App& root) {
  auto* e = root.add_subcommand("elliptic", "Weierstrass functions")->require_subcommand(1);
  e->fallthrough();
  struct O {
    std::string fn = "wp";
    std::vector<std::vector<double>> z;
    double omega = 1, omega_prime = 1;
  };
  static O o;
  auto* a = leaf(e, "eval", "evaluate wp, wp_prime, zeta or sigma; one complex value per line", [](Job& job) {
    auto L = elliptic::lattice_from_halfperiods(o.omega, o.omega_prime);
    job.parameters = {{"fn", o.fn}, {"omega", o.omega}, {"omega_prime", o.omega_prime}};
    json values = json::array();
    for (auto& zz : o.z) {
      auto z0 = tool::pair_of(zz, "--z");
      cplx z{z0.x, z0.y}, v;
      if (o.fn == "wp")
        v = elliptic::wp(z, L);
      else if (o.fn == "wp_prime")
        v = elliptic::wp_prime(z, L);
      else if (o.fn == "zeta")
        v = elliptic::zeta(z, L);
      else
        v = elliptic::sigma(z, L);
      say(io::num(v.real()) + " " + io::num(v.imag()));
      values.push_back({{"z", {z.real(), z.imag()}}, {"value", {v.real(), v.imag()}}});
    }
    job.parameters["points"] = values;
    job.conventions["lattice"] = "half periods omega (real) and omega' = i * omega_prime";
    job.residuals["g2"] = L.g2;
    job.residuals["g3"] = L.g3;
  });
  a->add_option("--fn", o.fn)->check(CLI::IsMember({"wp", "wp_prime", "zeta", "sigma"}));
  a->add_option("--z", o.z, "point re,im (repeatable)")->delimiter(',')->required();
  a->add_option("--omega", o.omega, "real half period");
  a->add_option("--omega-prime", o.omega_prime, "imaginary part of the second half period");
}

void add_hill(CLI::App& root) {
  auto* h = root.add_subcommand("hill", "Hill potentials and c-related curves")->require_subcommand(1);
  h->fallthrough();
  struct O {
    std::string potential, curve, out = "delta.json";
    double c = 0.5;
  };
  static O o;
  auto input = [](CLI::App* a) {
    a->add_option("--potential", o.potential, "potential JSON {\"samples\": [...]} on [0, pi)");
    a->add_option("--curve", o.curve, "curve JSON; its curvature is used");
  };
  auto* l0 = leaf(h, "lambda0", "bottom of the periodic spectrum", [](Job& job) {
    auto p = load_potential(o.potential, o.curve);
    double l = hill::lambda0(p);
    job.parameters = {{"potential", o.potential}, {"curve", o.curve}, {"grid", p.grid_size()}};
    job.residuals = {{"lambda0", l}, {"P", p.P()}, {"borg", l <= -p.P() + 1e-12}};
    say("lambda0 " + io::num(l));
    say("P " + io::num(p.P()));
  });
  input(l0);
  auto* cm = leaf(h, "cmax", "largest c admitting a c-related curve", [](Job& job) {
    auto p = load_potential(o.potential, o.curve);
    double c = hill::c_max(p);
    job.parameters = {{"potential", o.potential}, {"curve", o.curve}, {"grid", p.grid_size()}};
    job.residuals = {{"c_max", c}};
    say("c_max " + io::num(c));
  });
  input(cm);
  auto* cr = leaf(h, "crelate", "build a curve c-related to --curve", [](Job& job) {
    if (o.curve.empty()) throw CLI::ValidationError("--curve", "required");
    auto g = io::read_curve(o.curve);
    auto p = hill::curvature_of(g);
    auto f = hill::riccati_periodic(p, o.c);
    if (!f) throw DomainError("crelate: no periodic Riccati solution, c exceeds c_max = " + io::num(hill::c_max(p)));
    auto d = hill::c_related(g, *f, o.c);
    double gap = 0;
    for (std::size_t j = 0; j < g.size(); ++j) gap = std::max(gap, std::abs(det(g.samples[j], d.samples[j]) - o.c));
    job.parameters = {{"curve", o.curve}, {"c", o.c}};
    job.check("bracket_minus_c", gap, 1e-8);
    job.check("wronskian", curve_ops::wronskian_residual(d), 1e-8);
    job.write(o.out, io::to_json(d));
    job.text(fs::path(o.out).replace_extension(".csv").string(), io::curve_csv(d));
  });
  cr->add_option("--curve", o.curve)->required();
  cr->add_option("--c", o.c, "relation constant");
  cr->add_option("--out", o.out, "output curve JSON");
}

void add_curve(CLI::App& root) {
  auto* c = root.add_subcommand("curve", "curve checks, conic-related families, rotation roots")->require_subcommand(1);
  c->fallthrough();
  struct O {
    std::string in, out = "curve.json", roots_out = "roots.csv", branch = "tan", kind = "tan_tan", u = "2/7";
    double alpha = pi / 2, c = 0.6, ta = -1, tb = 1, lo = 0, hi = 14 * pi;
    std::size_t N = 2048;
    bool has_alpha = false;
  };
  static O o;
  auto* v = leaf(c, "verify", "self-Backlund certificate at --alpha", [](Job& job) {
    auto g = io::read_curve(o.in);
    auto cert = curves::verify_self_backlund(g, o.alpha);
    job.parameters = {{"in", o.in}, {"alpha", o.alpha}};
    job.residuals = {{"c", cert.c}, {"residual", cert.residual}};
    say("alpha " + io::num(cert.alpha) + " c " + io::num(cert.c) + " residual " + io::num(cert.residual));
    if (!cert.accepted()) throw tool::ResidualFailure("not self-Backlund at this angle");
  });
  v->add_option("--in", o.in)->required();
  v->add_option("--alpha", o.alpha);
  auto* k = leaf(c, "conic", "conic-related curve on [ta, tb]", [](Job& job) {
    auto g = curves::conic_related(o.c, parse_branch(o.branch), o.ta, o.tb, o.N);
    job.parameters = {{"c", o.c}, {"branch", o.branch}, {"ta", o.ta}, {"tb", o.tb}, {"N", o.N}};
    job.check("wronskian", curve_ops::wronskian_residual(g), 1e-8);
    job.write(o.out, io::to_json(g));
    job.text(fs::path(o.out).replace_extension(".csv").string(), io::curve_csv(g));
    job.text(fs::path(o.out).replace_extension(".svg").string(), tool::curve_svg(g, std::nullopt));
  });
  k->add_option("--c", o.c);
  k->add_option("--branch", o.branch)->check(CLI::IsMember({"tan", "tanh", "coth", "one_over_t", "line"}));
  k->add_option("--ta", o.ta);
  k->add_option("--tb", o.tb);
  k->add_option("--N", o.N);
  k->add_option("--out", o.out);
  auto* r = leaf(c, "roots", "roots of a rotation equation", [](Job& job) {
    const double u = parse_real(o.u);
    auto roots = curves::rotation_equation_roots(parse_kind(o.kind), u, o.lo, o.hi);
    io::Csv csv({"alpha", "c", "residual"});
    double worst = 0;
    for (auto& x : roots) {
      csv.row({x.alpha, x.c, x.residual});
      worst = std::max(worst, x.residual);
    }
    job.parameters = {{"kind", o.kind}, {"u", u}, {"lo", o.lo}, {"hi", o.hi}};
    job.residuals = {{"count", roots.size()}, {"max_shift_residual", worst}};
    job.text(o.roots_out, csv.str());
    say("roots " + std::to_string(roots.size()));
  });
  r->add_option("--kind", o.kind)->check(CLI::IsMember({"tan_tan", "tanh_tan", "coth_tan"}));
  r->add_option("--u", o.u, "u in (0,1), fractions allowed");
  r->add_option("--lo", o.lo);
  r->add_option("--hi", o.hi);
  r->add_option("--out", o.roots_out, "CSV file");
  auto* x = leaf(c, "export", "CSV and SVG of a curve file", [](Job& job) {
    auto g = io::read_curve(o.in);
    job.parameters = {{"in", o.in}};
    std::optional<double> a;
    if (o.has_alpha) a = o.alpha, job.parameters["alpha"] = o.alpha;
    auto stem = fs::path(o.in).stem().string();
    job.text(stem + ".csv", io::curve_csv(g));
    job.text(stem + ".svg", tool::curve_svg(g, a));
  });
  x->add_option("--in", o.in)->required();
  x->add_option("--alpha", o.alpha, "draw chords and the midpoint curve for this shift")->each([](const std::string&) {
    o.has_alpha = true;
  });
}

void add_lame(CLI::App& root) {
  auto* l = root.add_subcommand("lame", "Lame-equation curves")->require_subcommand(1);
  l->fallthrough();
  struct O {
    int k = 3, n = 1, m = 0;
    double w = 0.5;
    std::size_t N = 1024;
    std::string out = "curve.json";
    std::vector<double> s{1, 0.5, 0.25, 0.1, 0.05};
  };
  static O o;
  auto params = [](Job& job) {
    job.parameters = {{"k", o.k}, {"n", o.n}, {"m", o.m}, {"omega_prime", o.w}, {"N", o.N}};
    job.conventions["period"] = "anti-periodic on [0, pi), sampled over [0, 2 pi)";
    return lame::solve_a(o.k, o.n, o.m, o.w);
  };
  auto indices = [](CLI::App* a) {
    a->add_option("--k", o.k);
    a->add_option("--n", o.n);
    a->add_option("--m", o.m);
    a->add_option("--omega-prime", o.w);
    a->add_option("--N", o.N)->check(CLI::Range(256, 1 << 16));
  };
  auto* b = leaf(l, "build", "closed curve for (k, n, m)", [params](Job& job) {
    auto P = params(job);
    auto C = lame::build_curve(P, o.N);
    job.residuals = {{"a", {P.a.real(), P.a.imag()}}, {"a_residual", P.residual}, {"winding", C.winding}};
    job.check("closure", C.closure_residual, 1e-8);
    job.check("quasi_periodicity", C.quasi_residual, 1e-8);
    job.check("wronskian_spread", C.wronskian_spread, 1e-8);
    job.check("wronskian", curve_ops::wronskian_residual(C.curve), 1e-8);
    job.write(o.out, io::to_json(C.curve));
    job.text(fs::path(o.out).replace_extension(".csv").string(), io::curve_csv(C.curve));
    job.text(fs::path(o.out).replace_extension(".svg").string(), tool::curve_svg(C.curve, std::nullopt));
    say("winding " + std::to_string(C.winding) + " closure " + io::num(C.closure_residual));
  });
  indices(b);
  b->add_option("--out", o.out);
  auto* a = leaf(l, "angles", "certified self-Backlund angles", [params](Job& job) {
    auto P = params(job);
    auto R = lame::self_backlund_angles(P, o.N);
    json arr = json::array();
    double worst = 0;
    for (auto& A : R.angles) {
      arr.push_back({{"alpha", A.alpha}, {"c", A.c}, {"residual", A.residual}, {"level", A.level}});
      worst = std::max(worst, A.residual);
      say("alpha " + io::num(A.alpha) + " c " + io::num(A.c) + " residual " + io::num(A.residual));
    }
    job.residuals = {{"count", R.angles.size()}, {"predicted", R.count_k_minus_n_1}};
    job.check("determinant", worst, 1e-7);
    job.write("angles.json", {{"angles", arr}});
  });
  indices(a);
  auto* d = leaf(l, "deform", "family of deformations of the circle", [](Job& job) {
    auto F = lame::deformation_family(o.k, o.s, 0, o.N);
    job.parameters = {{"k", o.k}, {"s", o.s}, {"N", o.N}};
    io::Svg svg;
    json steps = json::array();
    for (std::size_t i = 0; i < F.steps.size(); ++i) {
      const auto& st = F.steps[i];
      std::string name = "deform_s" + std::to_string(i) + ".json";
      job.write(name, io::to_json(st.curve.curve));
      json angles = json::array();
      for (auto& A : st.angles) angles.push_back(A.alpha);
      steps.push_back({{"s", st.s}, {"curve", name}, {"angles", angles}});
      svg.polyline(st.curve.curve.samples, {tool::palette(i), 1, true});
    }
    job.write("family.json", {{"k", o.k}, {"steps", steps}, {"limits", F.limits}, {"reference", F.reference}});
    job.text("deform.svg", svg.str());
    job.check("limit_error", F.limit_error, 1e-4);
  });
  d->add_option("--k", o.k);
  d->add_option("--s-steps", o.s, "decreasing s values starting at 1")->delimiter(',');
  d->add_option("--N", o.N);
}

void add_poly(CLI::App& root) {
  auto* p = root.add_subcommand("poly", "centroaffine polygons")->require_subcommand(1);
  p->fallthrough();
  struct O {
    std::vector<double> hill, q1;
    std::string in, out = "polygon.json";
    int n = 30, k = 4, iters = 1000, restarts = 100;
  };
  static O o;
  auto* b = leaf(p, "build", "polygon from Hill coefficients", [](Job& job) {
    auto H = poly::from_hill(o.hill);
    job.parameters = {{"hill", o.hill}};
    job.check("closure", H.closure_residual, 1e-9);
    job.write(o.out, io::to_json(*H.polygon));
    job.text(fs::path(o.out).replace_extension(".svg").string(), tool::polygon_svg(*H.polygon, 0));
  });
  b->add_option("--hill", o.hill)->delimiter(',')->required();
  b->add_option("--out", o.out);
  auto* bk = leaf(p, "backlund", "discrete Backlund transform from Q_1", [](Job& job) {
    auto P = poly::make_polygon(io::polygon_vertices_from_json(io::read_json(o.in)));
    auto R = poly::backlund_transform(P, tool::pair_of(o.q1, "--q1"));
    job.parameters = {{"in", o.in}, {"q1", o.q1}};
    job.residuals = {{"rail", R.rail}, {"closure_gap", R.closure_gap}, {"closed", R.closed}};
    job.write("backlund.json", {{"Q", vec_json(R.Q)}, {"rail", R.rail}, {"closed", R.closed}});
    say(std::string("closed ") + (R.closed ? "true" : "false") + " gap " + io::num(R.closure_gap));
  });
  bk->add_option("--in", o.in)->required();
  bk->add_option("--q1", o.q1)->delimiter(',')->required();
  auto* rc = leaf(p, "recut", "iterate full recutting", [](Job& job) {
    auto v = io::polygon_vertices_from_json(io::read_json(o.in));
    io::Csv csv({"iter", "vertex", "x", "y"});
    std::vector<Vec2> cloud;
    for (int it = 1; it <= o.iters; ++it) {
      v = poly::recut_all(std::move(v));
      for (std::size_t i = 0; i < v.size(); ++i) {
        csv.row({double(it), double(i), v[i].x, v[i].y});
        cloud.push_back(v[i]);
      }
    }
    io::Svg svg;
    svg.dots(cloud, "#1f4e9c", 0.4);
    job.parameters = {{"in", o.in}, {"iters", o.iters}};
    job.text("recut.csv", csv.str());
    job.text("recut.svg", svg.str());
    job.write("final.json", {{"n", v.size() / 2}, {"vertices", vec_json(v)}});
  });
  rc->add_option("--in", o.in)->required();
  rc->add_option("--iters", o.iters)->check(CLI::PositiveNumber);
  auto* rg = leaf(p, "rigidity", "linearized rigidity of the regular (n,k)-gon", [](Job& job) {
    auto R = poly::rigidity_analysis(o.n, o.k);
    job.parameters = {{"n", o.n}, {"k", o.k}};
    json eig = json::array();
    for (auto z : R.eigenvalues) eig.push_back({z.real(), z.imag()});
    json rep = {{"kernel_dim", R.kernel_dim},
                {"kernel_indices", R.kernel_indices},
                {"eigen_indices", R.eigen_indices},
                {"arithmetic_indices", R.arithmetic_indices},
                {"nontrivial", R.nontrivial},
                {"criteria_agree", R.criteria_agree},
                {"eigenvalues", eig}};
    job.write("rigidity.json", rep);
    job.residuals = {{"kernel_dim", R.kernel_dim}, {"criteria_agree", R.criteria_agree}};
    say(std::string("nontrivial=") + (R.nontrivial ? "true" : "false") + " kernel_dim=" + std::to_string(R.kernel_dim));
    if (!R.criteria_agree) throw tool::ResidualFailure("eigenvalue and arithmetic criteria disagree");
  });
  rg->add_option("--n", o.n);
  rg->add_option("--k", o.k);
  auto* cs = leaf(p, "construct", "explicit self-Backlund (n,k)-gon", [](Job& job) {
    auto P = poly::construct_nk(o.n, o.k);
    job.parameters = {{"n", o.n}, {"k", o.k}};
    if (!P) throw DomainError("construct: no explicit construction for this (n,k)");
    job.residuals = {{"c", *poly::is_self_backlund(*P, o.k)}, {"hill_variance", poly::hill_variance(*P)}};
    job.write(o.out, io::to_json(*P));
    job.text(fs::path(o.out).replace_extension(".svg").string(), tool::polygon_svg(*P, o.k));
  });
  cs->add_option("--n", o.n);
  cs->add_option("--k", o.k);
  cs->add_option("--out", o.out);
  auto* se = leaf(p, "search", "multi-start search for self-Backlund (n,k)-gons", [](Job& job) {
    auto R = poly::search_self_backlund(o.n, o.k, o.restarts, job.seed);
    job.parameters = {{"n", o.n}, {"k", o.k}, {"restarts", o.restarts}};
    job.residuals = {{"converged", R.converged}, {"regular", R.regular}, {"nonregular", R.nonregular}};
    job.write("search.json", {{"converged", R.converged},
                              {"regular", R.regular},
                              {"nonregular", R.nonregular},
                              {"nonregular_windings", R.nonregular_windings},
                              {"nonregular_examples", R.nonregular_examples}});
    say("converged " + std::to_string(R.converged) + " regular " + std::to_string(R.regular) + " nonregular " +
        std::to_string(R.nonregular));
  });
  se->add_option("--n", o.n);
  se->add_option("--k", o.k);
  se->add_option("--restarts", o.restarts)->check(CLI::PositiveNumber);
}

void add_carousel(CLI::App& root) {
  auto* c = root.add_subcommand("carousel", "Hamiltonian flow on centroaffine polygons")->require_subcommand(1);
  c->fallthrough();
  struct O {
    int n = 5, samples = 200, scan = 24;
    std::string init;
    std::vector<double> xy{1.6680339887498949, 1.5880339887498948}, levels{10, 10.5};
    std::vector<int> periods{8};
    double T = 10, tol = 1e-12;
    std::size_t N = 4096;
  };
  static O o;
  auto* f = leaf(c, "flow", "integrate the flow; CSV of t, vertices, I, J, K, H", [](Job& job) {
    poly::CentroaffinePolygon P;
    if (!o.init.empty()) {
      P = poly::make_polygon(io::polygon_vertices_from_json(io::read_json(o.init)));
      if (P.n != o.n) throw CLI::ValidationError("--n", "does not match the polygon in --init");
    } else {
      if (o.n != 5) throw CLI::ValidationError("--init", "required unless n = 5");
      auto q = tool::pair_of(o.xy, "--xy");
      P = carousel::decagon(q.x, q.y);
    }
    auto s0 = carousel::make_state(P);
    auto tr = carousel::flow(s0, o.T, o.tol, o.samples);
    std::vector<std::string> head{"t"};
    for (int i = 0; i < o.n; ++i) head.push_back("x" + std::to_string(i)), head.push_back("y" + std::to_string(i));
    for (const char* h : {"I", "J", "K", "H"}) head.push_back(h);
    io::Csv csv(head);
    double drift = 0;
    for (auto& s : tr) {
      std::vector<double> row{s.t};
      for (int i = 0; i < o.n; ++i) row.push_back(s.polygon.P(i).x), row.push_back(s.polygon.P(i).y);
      double H = NAN;
      if (o.n == 5) {
        auto [x, y] = carousel::frieze5_coords(s.polygon.hill_coeffs);
        H = carousel::frieze5_hamiltonian(x, y);
      }
      row.insert(row.end(), {s.I, s.J, s.K, H});
      csv.row(row);
      drift = std::max({drift, std::abs(s.I - s0.I), std::abs(s.J - s0.J), std::abs(s.K - s0.K)});
    }
    job.parameters = {{"n", o.n}, {"T", o.T}, {"tol", o.tol}, {"samples", o.samples}, {"init", o.init}};
    if (o.init.empty()) job.parameters["xy"] = o.xy;
    job.conventions["H"] = "frieze Hamiltonian in (x, y) = (a_1, a_4); n = 5 only";
    job.check("integral_drift", drift, 1e-8);
    job.text("trajectory.csv", csv.str());
    job.text("trajectory.svg", tool::trajectory_svg(tr));
  });
  f->add_option("--n", o.n);
  f->add_option("--init", o.init, "polygon JSON");
  f->add_option("--xy", o.xy, "frieze start x,y when n = 5")->delimiter(',');
  f->add_option("--T", o.T);
  f->add_option("--tol", o.tol);
  f->add_option("--samples", o.samples)->check(CLI::PositiveNumber);
  auto* cl = leaf(c, "close", "shoot for closed n = 5 carousels on a level window", [](Job& job) {
    auto win = tool::pair_of(o.levels, "--level-scan");
    auto found = tool::parallel_map<std::vector<carousel::ClosedCarousel>>(
        o.periods.size(), job.threads,
        [&](std::size_t i) { return carousel::close_carousels(win.x, win.y, o.periods[i], o.scan, o.N); });
    job.parameters = {{"level_scan", o.levels}, {"periods", o.periods}, {"scan", o.scan}, {"N", o.N}};
    job.conventions["section"] = carousel::Monodromy{}.section;
    job.conventions["closing"] = "A B^m with the shift time t0 + m tau";
    json list = json::array();
    double worst = 0;
    std::size_t idx = 0;
    for (auto& group : found)
      for (auto& C : group) {
        std::string name = "carousel_" + std::to_string(idx++);
        job.write(name + ".json", io::to_json(C.curve));
        job.text(name + ".svg", tool::curve_svg(C.curve, pi / 5));
        list.push_back({{"level", C.level},
                        {"periods", C.periods},
                        {"shift_time", C.shift_time},
                        {"trace", C.monodromy.trace},
                        {"angle", C.monodromy.angle},
                        {"certificate", C.certificate.residual},
                        {"curve", name + ".json"}});
        worst = std::max(worst, C.certificate.residual);
        say("level " + io::num(C.level) + " m " + std::to_string(C.periods) + " certificate " +
            io::num(C.certificate.residual));
      }
    job.write("carousels.json", {{"found", list}});
    job.residuals["found"] = list.size();
    if (list.empty()) throw tool::ResidualFailure("no closed carousel in the window");
    job.check("certificate", worst, 1e-5);
  });
  cl->add_option("--level-scan", o.levels, "lo,hi")->delimiter(',');
  cl->add_option("--periods", o.periods, "m values, comma separated")->delimiter(',');
  cl->add_option("--scan", o.scan, "scan nodes per window")->check(CLI::PositiveNumber);
  cl->add_option("--N", o.N);
}

void add_dual(CLI::App& root) {
  struct O {
    std::string in, out = "dual.csv";
  };
  static O o;
  auto* d = root.add_subcommand("dual", "dual curve in the hyperbolic plane; CSV t,a,b,c,kappa");
  d->fallthrough();
  leaves.push_back({d, [](Job& job) {
                      auto g = io::read_curve(o.in);
                      auto D = hyp::dual_curve(g);
                      io::Csv csv({"t", "a", "b", "c", "kappa"});
                      for (std::size_t j = 0; j < D.samples.size(); ++j)
                        csv.row({D.t[j], D.samples[j][0], D.samples[j][1], D.samples[j][2], D.kappa[j]});
                      job.parameters = {{"in", o.in}};
                      job.conventions["form"] = "(a, b, c) = a x^2 + 2 b x y + c y^2";
                      job.conventions["kappa"] = "signed against T x X; NaN where |1 + p| < 1e-4";
                      try {
                        job.residuals["cusps"] = hyp::cusp_count(D);
                      } catch (const DomainError&) {
                        job.residuals["cusps"] = nullptr;
                      }
                      job.check("sphere", D.sphere_residual, 1e-9);
                      job.check("speed", D.speed_residual, 1e-6);
                      job.check("curvature_relation", D.relation_residual, 1e-6);
                      job.text(o.out, csv.str());
                    }});
  d->add_option("--in", o.in)->required();
  d->add_option("--out", o.out);
}

void add_repro(CLI::App& root) {
  static std::vector<std::string> figs;
  auto* r = root.add_subcommand("repro", "regenerate the reference figures");
  r->fallthrough();
  leaves.push_back({r, [](Job& job) {
                      const auto& all = tool::repro::figures();
                      std::vector<std::string> names = figs;
                      if (names.empty())
                        for (auto& [k, v] : all) names.push_back(k);
                      job.parameters = {{"figures", names}};
                      auto bundles = tool::parallel_map<tool::repro::Bundle>(
                          names.size(), job.threads, [&](std::size_t i) { return all.at(names[i])(); });
                      for (std::size_t i = 0; i < names.size(); ++i) {
                        for (auto& [file, body] : bundles[i].files) job.text(names[i] + "/" + file, body);
                        job.residuals[names[i]] = bundles[i].report;
                        say(names[i] + " done");
                      }
                    }});
  r->add_option("--figure", figs, "subset of: weg eqn weg2 deform polys carr recut")
      ->delimiter(',')
      ->check(CLI::IsMember({"weg", "eqn", "weg2", "deform", "polys", "carr", "recut"}));
}

}  // namespace

int tool::run(int argc, char** argv) {
  leaves.clear();
  CLI::App app{"sbk: self-Backlund centroaffine curves and polygons"};
  app.set_version_flag("--version", tool::version);
  app.require_subcommand(1);
  Job job;
  std::string dir = ".";
  app.add_option("--dir", dir, "directory for outputs and manifest.json");
  app.add_option("--threads", job.threads, "worker threads for scans and repro")->check(CLI::Range(1, 256));
  app.add_option("--seed", job.seed, "seed for randomized searches");
  add_elliptic(app);
  add_hill(app);
  add_curve(app);
  add_lame(app);
  add_poly(app);
  add_carousel(app);
  add_dual(app);
  add_repro(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : tool::usage;
  }
  job.dir = dir;
  const Leaf* chosen = nullptr;
  for (auto& l : leaves)
    if (l.app->parsed()) chosen = &l;
  if (!chosen) {
    std::cerr << app.help();
    return tool::usage;
  }
  for (auto* a = chosen->app; a && a != &app; a = a->get_parent())
    job.command = job.command.empty() ? a->get_name() : a->get_name() + " " + job.command;

  auto fail = [&](int code, const std::string& kind, const std::string& what) {
    std::cerr << "sbk " << job.command << ": " << kind << ": " << what << '\n';
    try {
      job.manifest(kind, what);
    } catch (...) {
    }
    return code;
  };
  try {
    chosen->run(job);
    job.manifest("ok");
  } catch (const CLI::ValidationError& e) {
    return fail(tool::usage, "usage", e.what());
  } catch (const io::FormatError& e) {
    return fail(tool::malformed, "malformed", e.what());
  } catch (const tool::ResidualFailure& e) {
    return fail(tool::residual, "residual", e.what());
  } catch (const sbk::Error& e) {
    return fail(e.code(), "error", e.what());
  } catch (const std::exception& e) {
    return fail(1, "failure", e.what());
  }
  return tool::ok;
}
