#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "srdg/core.hpp"

namespace srdg {

/// A parametric boundary piece Gamma(s), s in [s_lo, s_hi], oriented with the fluid on its left.
struct CurveSegment {
  std::function<Vec2(double)> eval;
  double s_lo = 0.0;
  double s_hi = 1.0;
  // Parameter is affine in arclength (straight lines, circular arcs): interpolation points
  // are placed by parameter interpolation instead of root finding.
  bool closed_form_arclength = false;
  // eval(s + (s_hi - s_lo)) == eval(s); only meaningful for single-segment closed curves.
  bool periodic = false;
  std::string tag;

  [[nodiscard]] Vec2 operator()(double s) const { return eval(s); }
};

struct BoundaryCurve {
  std::vector<CurveSegment> segments;
  bool closed = false;
};

/// Embedded boundary: parametric curves for edges plus an inside predicate for classification.
struct Boundary {
  std::string name = "none";
  std::vector<BoundaryCurve> curves;
  std::function<bool(const Vec2&)> inside = [](const Vec2&) { return true; };
};

enum class Side { fluid, solid };

[[nodiscard]] inline Side classify_point(const Boundary& b, const Vec2& x) {
  return b.inside(x) ? Side::fluid : Side::solid;
}

[[nodiscard]] inline CurveSegment line_segment(Vec2 a, Vec2 b, std::string tag = "wall") {
  CurveSegment seg;
  seg.eval = [a, b](double s) -> Vec2 { return a + s * (b - a); };
  seg.closed_form_arclength = true;
  seg.tag = std::move(tag);
  return seg;
}

/// Circular arc from angle theta0 to theta1 (theta1 < theta0 traverses clockwise).
[[nodiscard]] inline CurveSegment circle_arc(Vec2 center, double radius, double theta0,
                                             double theta1, std::string tag = "wall") {
  CurveSegment seg;
  seg.eval = [center, radius, theta0, theta1](double s) -> Vec2 {
    const double th = theta0 + s * (theta1 - theta0);
    return center + radius * Vec2(std::cos(th), std::sin(th));
  };
  seg.closed_form_arclength = true;
  seg.periodic = std::abs(std::abs(theta1 - theta0) - 2.0 * kPi) < 1e-14;
  seg.tag = std::move(tag);
  return seg;
}

/// Full circle as a closed curve; fluid_inside selects counterclockwise orientation.
[[nodiscard]] inline BoundaryCurve circle_curve(Vec2 center, double radius, bool fluid_inside,
                                                std::string tag, double theta_start = 0.0) {
  BoundaryCurve c;
  c.closed = true;
  const double end = fluid_inside ? theta_start + 2.0 * kPi : theta_start - 2.0 * kPi;
  c.segments.push_back(circle_arc(center, radius, theta_start, end, std::move(tag)));
  return c;
}

// Chord-fraction function f(s) = |Gamma(s) - p1| / |p2 - p1| - w.
[[nodiscard]] inline double chord_fraction(const CurveSegment& seg, double s, const Vec2& p1,
                                           const Vec2& p2, double w) {
  return (seg(s) - p1).norm() / (p2 - p1).norm() - w;
}

/// Parameter s* in [s1, s2] whose chord distance from the start is the fraction w of the
/// full chord. Throws NoRoot when the chord fraction is not monotone on the interval.
[[nodiscard]] inline double arclength_fraction_root(const CurveSegment& seg, double s1, double s2,
                                                    double w, const Vec2& p1, const Vec2& p2) {
  if (!(s1 < s2)) throw NoRoot("arclength_fraction_root: empty parameter interval");
  if ((p2 - p1).norm() <= 0.0) throw NoRoot("arclength_fraction_root: zero chord");
  if (seg.closed_form_arclength) return s1 + w * (s2 - s1);

  constexpr int kSamples = 64;
  double prev = chord_fraction(seg, s1, p1, p2, w);
  for (int i = 1; i <= kSamples; ++i) {
    const double s = s1 + (s2 - s1) * i / kSamples;
    const double f = chord_fraction(seg, s, p1, p2, w);
    if (f < prev - 1e-14) throw NoRoot("boundary segment doubles back within one cell");
    prev = f;
  }
  double lo = s1;
  double hi = s2;
  double flo = chord_fraction(seg, lo, p1, p2, w);
  const double fhi = chord_fraction(seg, hi, p1, p2, w);
  if (flo * fhi > 0.0) throw NoRoot("chord fraction does not change sign");
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = chord_fraction(seg, mid, p1, p2, w);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

[[nodiscard]] inline double arclength_fraction_root(const CurveSegment& seg, double s1, double s2,
                                                    double w) {
  return arclength_fraction_root(seg, s1, s2, w, seg(s1), seg(s2));
}

/// Degree-q polynomial edge interpolating the boundary at q+1 points; node i sits at the
/// reference coordinate t = i/q.
struct CurvedEdge {
  std::vector<Vec2> points;
  std::vector<double> params;  // curve parameter of each point
  int segment = -1;            // segment index within its BoundaryCurve
  std::string tag;

  [[nodiscard]] int degree() const noexcept { return static_cast<int>(points.size()) - 1; }
};

/// Value and derivative of the equispaced Lagrange interpolant through nodes at t_i = i/q.
inline void lagrange_equispaced(const std::vector<Vec2>& nodes, double t, Vec2& value,
                                Vec2& deriv) {
  const int q = static_cast<int>(nodes.size()) - 1;
  value.setZero();
  deriv.setZero();
  if (q == 0) {
    value = nodes[0];
    return;
  }
  for (int i = 0; i <= q; ++i) {
    const double ti = static_cast<double>(i) / q;
    double li = 1.0;
    double dli = 0.0;
    for (int j = 0; j <= q; ++j) {
      if (j == i) continue;
      const double tj = static_cast<double>(j) / q;
      const double inv = 1.0 / (ti - tj);
      dli = dli * (t - tj) * inv + li * inv;
      li *= (t - tj) * inv;
    }
    value += li * nodes[i];
    deriv += dli * nodes[i];
  }
}

/// Interpolation points for the boundary piece Gamma([s1, s2]) with explicit (snapped)
/// endpoints p1, p2. Interior points are the roots of the chord fraction for w = i/q.
[[nodiscard]] inline CurvedEdge edge_interpolation_points(const CurveSegment& seg, double s1,
                                                          double s2, int q, const Vec2& p1,
                                                          const Vec2& p2) {
  if (q < 1) throw GeometryError("edge_interpolation_points: q must be >= 1");
  CurvedEdge e;
  e.tag = seg.tag;
  e.points.push_back(p1);
  e.params.push_back(s1);
  for (int i = 1; i < q; ++i) {
    const double s = arclength_fraction_root(seg, s1, s2, static_cast<double>(i) / q, p1, p2);
    e.points.push_back(seg(s));
    e.params.push_back(s);
  }
  e.points.push_back(p2);
  e.params.push_back(s2);
  for (std::size_t i = 1; i < e.points.size(); ++i) {
    if ((e.points[i] - e.points[i - 1]).norm() <= 0.0)
      throw DegenerateCut("interior interpolation point collides with its neighbor");
  }
  return e;
}

[[nodiscard]] inline CurvedEdge edge_interpolation_points(const CurveSegment& seg, double s1,
                                                          double s2, int q) {
  return edge_interpolation_points(seg, s1, s2, q, seg(s1), seg(s2));
}

}  // namespace srdg
