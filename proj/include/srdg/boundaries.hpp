#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "srdg/core.hpp"
#include "srdg/geometry.hpp"
#include "srdg/ringleb.hpp"

namespace srdg {

namespace detail {

inline bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& x) {
  bool in = false;
  for (std::size_t a = 0, b = poly.size() - 1; a < poly.size(); b = a++) {
    if ((poly[a].y() > x.y()) != (poly[b].y() > x.y())) {
      const double xc = poly[b].x() + (x.y() - poly[b].y()) * (poly[a].x() - poly[b].x()) /
                                          (poly[a].y() - poly[b].y());
      if (x.x() < xc) in = !in;
    }
  }
  return in;
}

inline double signed_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) a += cross(poly[j], poly[i]);
  return 0.5 * a;
}

// Perimeter coordinate of a point on the rectangle boundary, counterclockwise from lo.
inline double rect_coord(const Vec2& p, const Vec2& lo, const Vec2& hi) {
  const double w = hi.x() - lo.x();
  const double h = hi.y() - lo.y();
  const double tol = 1e-9 * std::max(w, h);
  if (std::abs(p.y() - lo.y()) <= tol) return (p.x() - lo.x()) / w;
  if (std::abs(p.x() - hi.x()) <= tol) return 1.0 + (p.y() - lo.y()) / h;
  if (std::abs(p.y() - hi.y()) <= tol) return 2.0 + (hi.x() - p.x()) / w;
  if (std::abs(p.x() - lo.x()) <= tol) return 3.0 + (hi.y() - p.y()) / h;
  throw GeometryError("open boundary curve endpoint is not on the domain boundary");
}

}  // namespace detail

/// Inside predicate from the curves themselves: each closed curve is sampled into a polygon
/// (fluid inside when counterclockwise), each open curve is closed by walking the domain
/// boundary counterclockwise from its end back to its start. A point is fluid when it is on
/// the fluid side of every curve.
[[nodiscard]] inline std::function<bool(const Vec2&)> sampled_inside(
    const std::vector<BoundaryCurve>& curves, const Vec2& lo, const Vec2& hi,
    int samples_per_segment = 4000) {
  struct Region {
    std::vector<Vec2> poly;
    bool fluid_inside;
  };
  std::vector<Region> regions;
  for (const auto& c : curves) {
    Region r;
    for (const auto& seg : c.segments) {
      for (int i = 0; i < samples_per_segment; ++i)
        r.poly.push_back(seg(seg.s_lo + (seg.s_hi - seg.s_lo) * i / samples_per_segment));
    }
    if (!c.closed) {
      const auto& last = c.segments.back();
      const Vec2 end = last(last.s_hi);
      const Vec2 start = c.segments.front()(c.segments.front().s_lo);
      r.poly.push_back(end);
      const double t_end = detail::rect_coord(end, lo, hi);
      double t_start = detail::rect_coord(start, lo, hi);
      if (t_start <= t_end) t_start += 4.0;
      const std::array<Vec2, 4> corners{lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
      for (int k = static_cast<int>(std::floor(t_end)) + 1; k < t_start; ++k) r.poly.push_back(corners[k % 4]);
    }
    r.fluid_inside = detail::signed_area(r.poly) > 0.0;
    regions.push_back(std::move(r));
  }
  return [regions = std::move(regions)](const Vec2& x) {
    for (const auto& r : regions) {
      if (detail::point_in_polygon(r.poly, x) != r.fluid_inside) return false;
    }
    return true;
  };
}

/// Fluid between two concentric circles; tags "outer" and "inner".
[[nodiscard]] inline Boundary annulus(Vec2 center = Vec2(1.5, 1.5), double r1 = 0.75,
                                      double r2 = 1.25) {
  Boundary b;
  b.name = "annulus";
  b.curves.push_back(circle_curve(center, r2, true, "outer"));
  b.curves.push_back(circle_curve(center, r1, false, "inner"));
  b.inside = [center, r1, r2](const Vec2& x) {
    const double r = (x - center).norm();
    return r > r1 && r < r2;
  };
  return b;
}

/// Fluid outside a set of discs (tag "wall").
[[nodiscard]] inline Boundary discs(const std::vector<Vec2>& centers, double radius,
                                    std::string name = "discs") {
  Boundary b;
  b.name = std::move(name);
  for (const auto& c : centers) b.curves.push_back(circle_curve(c, radius, false, "wall"));
  b.inside = [centers, radius](const Vec2& x) {
    for (const auto& c : centers)
      if ((x - c).norm() < radius) return false;
    return true;
  };
  return b;
}

[[nodiscard]] inline std::vector<Vec2> five_disc_centers() {
  std::vector<Vec2> c;
  for (int k = 0; k < 5; ++k) {
    const double phi = 2.0 * kPi * k / 5.0 - 2.0 * kPi / 3.0;
    c.emplace_back(10.0 + 5.0 * std::cos(phi), 10.0 + 5.0 * std::sin(phi));
  }
  return c;
}

[[nodiscard]] inline Boundary five_discs(double radius = 2.0) {
  return discs(five_disc_centers(), radius, "five-discs");
}

/// Ringleb channel on [0, 2.75]^2: up the k=1.2 wall, along the q=0.5 line, down the k=0.7
/// wall. The y=0 side is closed by the domain boundary.
[[nodiscard]] inline Boundary ringleb_channel(double k_inner = 0.7, double k_outer = 1.2,
                                              double q_top = 0.5) {
  Boundary b;
  b.name = "ringleb";
  BoundaryCurve c;
  CurveSegment right;
  right.eval = [k_outer, q_top](double s) { return ringleb::point(k_outer, k_outer + s * (q_top - k_outer)); };
  right.tag = "wall";
  CurveSegment top;
  top.eval = [k_outer, k_inner, q_top](double s) { return ringleb::point(k_outer + s * (k_inner - k_outer), q_top); };
  top.tag = "top";
  CurveSegment left;
  left.eval = [k_inner, q_top](double s) { return ringleb::point(k_inner, q_top + s * (k_inner - q_top)); };
  left.tag = "wall";
  c.segments = {right, top, left};
  b.curves.push_back(std::move(c));
  b.inside = sampled_inside(b.curves, Vec2(0, 0), Vec2(2.75, 2.75));
  return b;
}

/// Ramp starting at (x0, lo.y) rising at `angle` until it leaves the domain; fluid above.
[[nodiscard]] inline Boundary wedge(double x0, double angle, const Vec2& lo, const Vec2& hi) {
  const Vec2 a(x0, lo.y());
  const Vec2 dir(std::cos(angle), std::sin(angle));
  const double t_right = (hi.x() - a.x()) / dir.x();
  const double t_top = (hi.y() - a.y()) / dir.y();
  const Vec2 b = a + std::min(t_right, t_top) * dir;
  Boundary bd;
  bd.name = "wedge";
  BoundaryCurve c;
  c.segments.push_back(line_segment(a, b, "wall"));
  bd.curves.push_back(std::move(c));
  bd.inside = [a, dir](const Vec2& x) { return x.x() < a.x() || cross(dir, x - a) > 0.0; };
  return bd;
}

/// Horizontal line y = y0 across [lo, hi]; fluid below.
[[nodiscard]] inline Boundary half_plane(double y0, const Vec2& lo, const Vec2& hi) {
  Boundary b;
  b.name = "half-plane";
  BoundaryCurve c;
  c.segments.push_back(line_segment(Vec2(hi.x(), y0), Vec2(lo.x(), y0), "wall"));
  b.curves.push_back(std::move(c));
  b.inside = [y0](const Vec2& x) { return x.y() < y0; };
  return b;
}

/// Boundary from a JSON document:
///   {"name": "...", "curves": [{"closed": true, "segments": [
///       {"type": "line", "from": [x, y], "to": [x, y], "tag": "wall"},
///       {"type": "arc", "center": [x, y], "radius": r, "theta0": a, "theta1": b, "tag": "wall"}]}]}
/// Segments are oriented with the fluid on their left; open curves start and end on the domain
/// boundary. Angles are in radians; theta1 < theta0 runs clockwise.
[[nodiscard]] inline Boundary boundary_from_json(const nlohmann::json& j, const Vec2& lo,
                                                 const Vec2& hi) {
  auto vec = [](const nlohmann::json& a) { return Vec2(a.at(0).get<double>(), a.at(1).get<double>()); };
  Boundary b;
  b.name = j.value("name", "custom");
  for (const auto& jc : j.at("curves")) {
    BoundaryCurve c;
    c.closed = jc.value("closed", false);
    for (const auto& js : jc.at("segments")) {
      const std::string type = js.at("type");
      const std::string tag = js.value("tag", "wall");
      if (type == "line") {
        c.segments.push_back(line_segment(vec(js.at("from")), vec(js.at("to")), tag));
      } else if (type == "arc") {
        c.segments.push_back(circle_arc(vec(js.at("center")), js.at("radius").get<double>(),
                                        js.at("theta0").get<double>(), js.at("theta1").get<double>(),
                                        tag));
      } else {
        throw ConfigError("boundary JSON: unknown segment type '" + type + "'");
      }
    }
    if (c.segments.empty()) throw ConfigError("boundary JSON: curve without segments");
    if (c.closed && c.segments.size() > 1) c.segments.front().periodic = false;
    b.curves.push_back(std::move(c));
  }
  b.inside = sampled_inside(b.curves, lo, hi);
  return b;
}

[[nodiscard]] inline Boundary boundary_from_json_file(const std::string& path, const Vec2& lo,
                                                      const Vec2& hi) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open boundary file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("boundary JSON: ") + e.what());
  }
  return boundary_from_json(j, lo, hi);
}

}  // namespace srdg
