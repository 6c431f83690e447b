#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "srdg/boundaries.hpp"
#include "srdg/geometry.hpp"

using namespace srdg;

namespace {

// Independent chord-fraction root: dense scan of Gamma on n points to bracket the first
// sign change, then plain bisection inside the bracket.
double dense_root(const std::function<Vec2(double)>& g, double s1, double s2, double w,
                  int n = 1000000) {
  const Vec2 p1 = g(s1);
  const double chord = (g(s2) - p1).norm();
  auto f = [&](double s) { return (g(s) - p1).norm() / chord - w; };
  double a = s1;
  double fa = f(a);
  for (int i = 1; i <= n; ++i) {
    double b = s1 + (s2 - s1) * i / n;
    const double fb = f(b);
    if ((fa <= 0.0) != (fb <= 0.0)) {
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        if ((f(m) <= 0.0) == (fa <= 0.0)) {
          a = m;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    a = b;
    fa = fb;
  }
  return std::nan("");
}

CurveSegment generic(std::function<Vec2(double)> g, double lo, double hi) {
  CurveSegment s;
  s.eval = std::move(g);
  s.s_lo = lo;
  s.s_hi = hi;
  return s;
}

}  // namespace

TEST(Geometry, AnnulusClassification) {
  const Boundary b = annulus();
  EXPECT_EQ(classify_point(b, Vec2(1.5, 1.5)), Side::solid);
  EXPECT_EQ(classify_point(b, Vec2(1.5, 2.5)), Side::fluid);
  EXPECT_EQ(classify_point(b, Vec2(50.0, -40.0)), Side::solid);
}

TEST(Geometry, UnitSquareHoleFarPoint) {
  nlohmann::json j = nlohmann::json::parse(R"({"curves": [{"closed": true, "segments": [
      {"type": "line", "from": [1, 1], "to": [1, 2]},
      {"type": "line", "from": [1, 2], "to": [2, 2]},
      {"type": "line", "from": [2, 2], "to": [2, 1]},
      {"type": "line", "from": [2, 1], "to": [1, 1]}]}]})");
  const Boundary b = boundary_from_json(j, Vec2(0, 0), Vec2(3, 3));
  EXPECT_EQ(classify_point(b, Vec2(1.5, 1.5)), Side::solid);
  EXPECT_EQ(classify_point(b, Vec2(0.5, 2.5)), Side::fluid);
  EXPECT_EQ(classify_point(b, Vec2(1e6, 1e6)), Side::fluid);
}

TEST(Geometry, OrientationMatchesPredicate) {
  // a point offset along the left normal of each segment midpoint is fluid
  std::vector<Boundary> all{annulus(), five_discs(), ringleb_channel(),
                            wedge(1.0 / 6.0, kPi / 6.0, Vec2(0, 0), Vec2(2.5, 1.75))};
  for (const auto& b : all) {
    for (const auto& c : b.curves) {
      for (const auto& seg : c.segments) {
        for (double f : {0.25, 0.5, 0.75}) {
          const double s = seg.s_lo + f * (seg.s_hi - seg.s_lo);
          const double h = 1e-6 * (seg.s_hi - seg.s_lo);
          const Vec2 t = (seg(s + h) - seg(s - h)).normalized();
          const Vec2 left(-t.y(), t.x());
          EXPECT_EQ(classify_point(b, seg(s) + 1e-4 * left), Side::fluid) << b.name;
          EXPECT_EQ(classify_point(b, seg(s) - 1e-4 * left), Side::solid) << b.name;
        }
      }
    }
  }
}

TEST(Geometry, ClassificationStableUnderSnapPerturbation) {
  const Boundary b = annulus();
  const double snap = 1e-10 * 0.06;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::uniform_real_distribution<double> d(-snap, snap);
  for (int n = 0; n < 2000; ++n) {
    const Vec2 x(u(rng), u(rng));
    const double r = (x - Vec2(1.5, 1.5)).norm();
    if (std::abs(r - 0.75) < 10 * snap || std::abs(r - 1.25) < 10 * snap) continue;
    EXPECT_EQ(classify_point(b, x), classify_point(b, x + Vec2(d(rng), d(rng))));
  }
}

TEST(Geometry, QuarterCircleHalfChord) {
  const CurveSegment arc = circle_arc(Vec2(0, 0), 1.0, 0.0, kPi / 2);
  const double s = arclength_fraction_root(arc, 0.0, 1.0, 0.5);
  EXPECT_NEAR((arc(s) - Vec2(std::sqrt(0.5), std::sqrt(0.5))).norm(), 0.0, 1e-14);
  // without the closed-form flag the root is the chord-fraction point, w |p2 - p1| from p1
  const CurveSegment g = generic(arc.eval, 0.0, 1.0);
  const double sg = arclength_fraction_root(g, 0.0, 1.0, 0.5);
  EXPECT_NEAR((g(sg) - Vec2(1, 0)).norm(), 0.5 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(g(sg).norm(), 1.0, 1e-15);
}

TEST(Geometry, StraightSegmentQuarter) {
  const CurveSegment line = line_segment(Vec2(0, 0), Vec2(2, 0));
  EXPECT_NEAR((line(arclength_fraction_root(line, 0.0, 1.0, 0.25)) - Vec2(0.5, 0)).norm(), 0.0, 1e-15);
  const CurveSegment g = generic(line.eval, 0.0, 1.0);
  EXPECT_NEAR((g(arclength_fraction_root(g, 0.0, 1.0, 0.25)) - Vec2(0.5, 0)).norm(), 0.0, 1e-12);
}

TEST(Geometry, EllipseMatchesDenseOracle) {
  auto ell = [](double s) { return Vec2(2.0 * std::cos(s), std::sin(s)); };
  const CurveSegment g = generic(ell, 0.0, kPi / 2);
  const double s = arclength_fraction_root(g, 0.0, kPi / 2, 0.5);
  EXPECT_NEAR(s, dense_root(ell, 0.0, kPi / 2, 0.5), 1e-10);
}

TEST(Geometry, DoublingBackRaisesNoRoot) {
  // a hairpin: chord distance from the start grows then shrinks
  auto hairpin = [](double s) { return Vec2(std::sin(s), 1.0 - std::cos(s)); };
  const CurveSegment g = generic(hairpin, 0.0, 1.9 * kPi);
  EXPECT_THROW((void)arclength_fraction_root(g, 0.0, 1.9 * kPi, 0.5), NoRoot);
}

TEST(Geometry, InterpolationPointsQ1AndQ2) {
  const CurveSegment arc = circle_arc(Vec2(0, 0), 1.0, 0.0, kPi / 2);
  const CurvedEdge e1 = edge_interpolation_points(arc, 0.0, 1.0, 1);
  ASSERT_EQ(e1.points.size(), 2u);
  EXPECT_NEAR((e1.points[0] - Vec2(1, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR((e1.points[1] - Vec2(0, 1)).norm(), 0.0, 1e-15);
  const CurvedEdge e2 = edge_interpolation_points(arc, 0.0, 1.0, 2);
  ASSERT_EQ(e2.points.size(), 3u);
  EXPECT_NEAR((e2.points[1] - Vec2(std::sqrt(0.5), std::sqrt(0.5))).norm(), 0.0, 1e-14);
}

TEST(Geometry, RinglebWallQ5MatchesDenseOracle) {
  const Boundary b = ringleb_channel();
  const CurveSegment& wall = b.curves[0].segments[2];  // k = 0.7
  // parameters of two consecutive crossings with grid lines y = 1.1 and y = 1.2
  auto cross_y = [&](double y) {
    double lo = 0.0;
    double hi = 1.0;  // y decreases along this segment
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (lo + hi);
      if (wall(m).y() > y) {
        lo = m;
      } else {
        hi = m;
      }
    }
    return 0.5 * (lo + hi);
  };
  const double s1 = cross_y(1.2);
  const double s2 = cross_y(1.1);
  const CurvedEdge e = edge_interpolation_points(wall, s1, s2, 5);
  ASSERT_EQ(e.points.size(), 6u);
  for (int i = 1; i < 5; ++i) {
    const double so = dense_root(wall.eval, s1, s2, i / 5.0);
    EXPECT_NEAR((e.points[i] - wall(so)).norm(), 0.0, 1e-9);
  }
}

TEST(Geometry, InterpolationPointsSatisfyChordFraction) {
  const Boundary b = ringleb_channel();
  for (const auto& seg : b.curves[0].segments) {
    const CurvedEdge e = edge_interpolation_points(seg, 0.3, 0.34, 4);
    for (int i = 1; i < 4; ++i)
      EXPECT_LT(std::abs(chord_fraction(seg, e.params[i], e.points[0], e.points[4], i / 4.0)), 1e-12);
  }
}

TEST(Geometry, InterpolantErrorOrder) {
  const CurveSegment arc = circle_arc(Vec2(0, 0), 1.25, 0.0, 2 * kPi);
  for (int q = 1; q <= 5; ++q) {
    std::vector<double> err;
    std::vector<double> h;
    for (int lvl = 0; lvl < 4; ++lvl) {
      const double span = 0.2 / std::pow(2.0, lvl);  // parameter span of one edge
      const CurvedEdge e = edge_interpolation_points(arc, 0.1, 0.1 + span, q);
      double m = 0.0;
      for (int k = 0; k <= 200; ++k) {
        Vec2 x;
        Vec2 dx;
        lagrange_equispaced(e.points, k / 200.0, x, dx);
        m = std::max(m, std::abs(x.norm() - 1.25));
      }
      err.push_back(m);
      h.push_back((e.points.back() - e.points.front()).norm());
    }
    const double rate = std::log(err[2] / err[3]) / std::log(h[2] / h[3]);
    EXPECT_GE(rate, q + 1 - 0.1) << "q=" << q;
  }
}

TEST(Geometry, LagrangeInterpolantPassesThroughNodes) {
  const std::vector<Vec2> nodes{{0, 0}, {0.3, 0.1}, {0.5, 0.4}, {0.6, 0.9}};
  for (int i = 0; i <= 3; ++i) {
    Vec2 x;
    Vec2 dx;
    lagrange_equispaced(nodes, i / 3.0, x, dx);
    EXPECT_NEAR((x - nodes[i]).norm(), 0.0, 1e-15);
  }
}
