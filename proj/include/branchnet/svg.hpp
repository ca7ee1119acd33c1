#pragma once

// Static SVG rendering of planar networks (or the first two coordinates of a
// higher-dimensional one when `project` is set).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "branchnet/chains.hpp"
#include "branchnet/errors.hpp"

namespace branchnet {

struct SvgStyle {
  double gamma = 0.5;         // stroke width ~ |theta|^gamma
  double max_stroke = 10.0;   // px, for the largest multiplicity
  double min_stroke = 0.75;   // px
  double max_disc = 9.0;      // px radius for the heaviest atom
  int size = 800;             // canvas edge, px
  bool project = false;
};

namespace detail {

// Component j gets hue 360 j / m; an edge mixes them in proportion to |theta_j|.
inline std::string blend_color(std::span<const double> theta) {
  const int m = static_cast<int>(theta.size());
  double r = 0, g = 0, b = 0, tot = 0;
  for (int j = 0; j < m; ++j) {
    const double wgt = std::abs(theta[j]);
    if (wgt == 0.0) continue;
    const double h = (m == 1 ? 210.0 : 360.0 * j / m) / 60.0;
    const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
    double cr = 0, cg = 0, cb = 0;
    switch (static_cast<int>(h) % 6) {
      case 0: cr = 1; cg = x; break;
      case 1: cr = x; cg = 1; break;
      case 2: cg = 1; cb = x; break;
      case 3: cg = x; cb = 1; break;
      case 4: cr = x; cb = 1; break;
      default: cr = 1; cb = x; break;
    }
    r += wgt * cr;
    g += wgt * cg;
    b += wgt * cb;
    tot += wgt;
  }
  if (tot == 0.0) return "#888888";
  char buf[8];
  auto c = [&](double v) { return static_cast<int>(std::lround(40 + 180 * v / tot)); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c(r), c(g), c(b));
  return buf;
}

}  // namespace detail

inline std::string render_svg(const Chain1& T, const Chain0& mu_minus, const Chain0& mu_plus,
                              const SvgStyle& style = {}) {
  for (int n : {T.n, mu_minus.n, mu_plus.n})
    if (n != 2 && !style.project)
      throw InputError("svg output needs n = 2 (use the projection flag to draw the first two coordinates)");
  double lo[2] = {kInfinity, kInfinity}, hi[2] = {-kInfinity, -kInfinity};
  auto grow = [&](const Point& p) {
    for (int i = 0; i < 2; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  };
  double max_theta = 0.0, max_w = 0.0;
  for (const Edge& e : T.edges) {
    grow(e.a);
    grow(e.b);
    max_theta = std::max(max_theta, detail::norm2(e.theta));
  }
  for (const Chain0* mu : {&mu_minus, &mu_plus})
    for (const Atom& at : mu->atoms) {
      grow(at.position);
      max_w = std::max(max_w, detail::norm2(at.weight));
    }
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.size << "\" height=\"" << style.size
     << "\" viewBox=\"0 0 " << style.size << ' ' << style.size << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!(lo[0] <= hi[0])) {
    os << "</svg>\n";
    return os.str();
  }
  const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
  const double margin = 0.06 * style.size;
  const double scale = (style.size - 2 * margin) / span;
  auto X = [&](const Point& p) { return margin + (p[0] - lo[0]) * scale; };
  auto Y = [&](const Point& p) { return style.size - margin - (p[1] - lo[1]) * scale; };  // y up
  os.precision(6);
  for (const Edge& e : T.edges) {
    const double t = max_theta > 0 ? detail::norm2(e.theta) / max_theta : 0.0;
    const double width = std::max(style.min_stroke, style.max_stroke * std::pow(t, style.gamma));
    os << "<line x1=\"" << X(e.a) << "\" y1=\"" << Y(e.a) << "\" x2=\"" << X(e.b) << "\" y2=\"" << Y(e.b)
       << "\" stroke=\"" << detail::blend_color(e.theta) << "\" stroke-width=\"" << width
       << "\" stroke-linecap=\"round\"/>\n";
  }
  auto discs = [&](const Chain0& mu, const char* fill) {
    for (const Atom& at : mu.atoms) {
      const double r = style.max_disc * std::sqrt(max_w > 0 ? detail::norm2(at.weight) / max_w : 0.0);
      os << "<circle cx=\"" << X(at.position) << "\" cy=\"" << Y(at.position) << "\" r=\"" << std::max(r, 1.5)
         << "\" fill=\"" << fill << "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    }
  };
  discs(mu_minus, "#d62728");
  discs(mu_plus, "#2ca02c");
  os << "</svg>\n";
  return os.str();
}

inline void emit_svg(const Chain1& T, const Chain0& mu_minus, const Chain0& mu_plus, const SvgStyle& style,
                     const std::string& path) {
  const std::string text = render_svg(T, mu_minus, mu_plus, style);
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot write file");
  out << text;
}

}  // namespace branchnet
