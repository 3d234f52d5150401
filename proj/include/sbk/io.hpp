// Flat-file formats: curve and polygon JSON, CSV tables, SVG line plots.
// Every file goes through write_atomic (temp file + rename).
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "polygons.hpp"

namespace sbk::io {

using json = nlohmann::json;

// unreadable or malformed input; maps to its own exit status in the CLI
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    if (!f.flush()) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot read " + path.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_atomic(path, j.dump(1) + "\n"); }

// ---- curves: {"N", "closed", "samples": [[x, y], ...], "t0", "dt"} ----

inline json to_json(const CentroaffineCurve& g) {
  json s = json::array();
  for (auto v : g.samples) s.push_back({v.x, v.y});
  return {{"N", g.size()}, {"closed", g.closed}, {"samples", s}, {"t0", g.t0}, {"dt", g.dt}};
}

inline CentroaffineCurve curve_from_json(const json& j) {
  try {
    CentroaffineCurve g;
    g.closed = j.at("closed").get<bool>();
    g.t0 = j.at("t0").get<double>();
    g.dt = j.at("dt").get<double>();
    for (const auto& p : j.at("samples")) {
      if (p.size() != 2) throw FormatError("curve sample is not a pair");
      g.samples.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (j.contains("N") && j["N"].get<std::size_t>() != g.size()) throw FormatError("curve N does not match samples");
    if (g.closed && (!is_pow2(g.size()) || g.size() < 256))
      throw FormatError("closed curve needs a power-of-two sample count of at least 256");
    if (!(g.dt > 0)) throw FormatError("curve dt must be positive");
    return g;
  } catch (const json::exception& e) {
    throw FormatError(std::string("curve json: ") + e.what());
  }
}

inline CentroaffineCurve read_curve(const std::filesystem::path& path) {
  try {
    return curve_from_json(read_json(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---- polygons: {"n", "vertices": [[x, y] x 2n]} ----

inline json to_json(const poly::CentroaffinePolygon& P) {
  json v = json::array();
  for (auto p : P.vertices) v.push_back({p.x, p.y});
  return {{"n", P.n}, {"vertices", v}, {"hill", P.hill_coeffs}};
}

inline std::vector<Vec2> polygon_vertices_from_json(const json& j) {
  try {
    std::vector<Vec2> v;
    for (const auto& p : j.at("vertices")) {
      if (p.size() != 2) throw FormatError("vertex is not a pair");
      v.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (j.contains("n") && 2 * j["n"].get<std::size_t>() != v.size()) throw FormatError("polygon needs 2n vertices");
    return v;
  } catch (const json::exception& e) {
    throw FormatError(std::string("polygon json: ") + e.what());
  }
}

// potentials: {"samples": [...]} on [0, pi)
inline std::vector<double> potential_from_json(const json& j) {
  try {
    return j.at("samples").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("potential json: ") + e.what());
  }
}

// ---- CSV ----

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out_ << (i ? "," : "") << num(r[i]);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

inline std::string curve_csv(const CentroaffineCurve& g) {
  Csv c({"t", "x", "y"});
  for (std::size_t j = 0; j < g.size(); ++j) c.row({g.t(j), g.samples[j].x, g.samples[j].y});
  return c.str();
}

// ---- SVG ----

class Svg {
 public:
  struct Style {
    std::string stroke = "black";
    double width = 1;
    bool closed = false;
  };

  void polyline(const std::vector<Vec2>& pts, Style s) { items_.push_back({pts, s, false}); }
  void segment(Vec2 a, Vec2 b, Style s) { items_.push_back({{a, b}, s, false}); }
  void dots(const std::vector<Vec2>& pts, std::string color, double r = 1) {
    items_.push_back({pts, {std::move(color), r, false}, true});
  }

  // square canvas with equal axes, or width x height with independent axes
  std::string str(double width = 600, double height = 0) const {
    double lo_x = INFINITY, lo_y = INFINITY, hi_x = -INFINITY, hi_y = -INFINITY;
    for (const auto& it : items_)
      for (auto p : it.pts) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
        lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
      }
    if (!(hi_x > lo_x)) lo_x -= 1, hi_x += 1;
    if (!(hi_y > lo_y)) lo_y -= 1, hi_y += 1;
    const bool equal = height <= 0;
    if (equal) height = width;
    double kx = width / ((hi_x - lo_x) * 1.05), ky = height / ((hi_y - lo_y) * 1.05);
    if (equal) kx = ky = std::min(kx, ky);
    double cx = (lo_x + hi_x) / 2, cy = (lo_y + hi_y) / 2;
    // y axis points up
    auto X = [&](Vec2 p) { return num(width / 2 + kx * (p.x - cx)); };
    auto Y = [&](Vec2 p) { return num(height / 2 - ky * (p.y - cy)); };
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
      << width << ' ' << height << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& it : items_) {
      if (it.dots) {
        for (auto p : it.pts)
          o << "<circle cx=\"" << X(p) << "\" cy=\"" << Y(p) << "\" r=\"" << it.style.width << "\" fill=\"" << it.style.stroke << "\"/>\n";
        continue;
      }
      o << (it.style.closed ? "<polygon" : "<polyline") << " fill=\"none\" stroke=\"" << it.style.stroke
        << "\" stroke-width=\"" << it.style.width << "\" points=\"";
      for (std::size_t i = 0; i < it.pts.size(); ++i) o << (i ? " " : "") << X(it.pts[i]) << ',' << Y(it.pts[i]);
      o << "\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
  }

 private:
  struct Item {
    std::vector<Vec2> pts;
    Style style;
    bool dots;
  };
  std::vector<Item> items_;
};

}  // namespace sbk::io
