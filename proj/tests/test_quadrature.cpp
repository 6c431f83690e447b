#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "srdg/boundaries.hpp"
#include "srdg/mesh.hpp"
#include "srdg/quadrature.hpp"

using namespace srdg;

namespace {

using Loop = std::vector<std::vector<Vec2>>;

Loop straight_loop(const std::vector<Vec2>& v) {
  Loop l;
  for (std::size_t i = 0; i < v.size(); ++i) l.push_back({v[i], v[(i + 1) % v.size()]});
  return l;
}

// Green's theorem oracle: int x^a y^b dA = closed integral of x^(a+1) y^b / (a+1) dy, each edge
// integrated with a 40-point Gauss rule on its (polynomial) parametrization.
double green_moment(const Loop& loop, int a, int b) {
  const auto& g = gauss_legendre(40);
  double s = 0.0;
  for (const auto& e : loop) {
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      Vec2 x;
      Vec2 dx;
      lagrange_equispaced(e, g.nodes[i], x, dx);
      s += g.weights[i] * std::pow(x.x(), a + 1) / (a + 1) * std::pow(x.y(), b) * dx.y();
    }
  }
  return s;
}

double rule_moment(const VolumeRule& r, int a, int b) {
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    s += r.weights[k] * std::pow(r.points[k].x(), a) * std::pow(r.points[k].y(), b);
  return s;
}

std::vector<Vec2> random_star_polygon(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> rad(0.4, 1.0);
  std::uniform_real_distribution<double> jit(-0.3, 0.3);
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) {
    const double th = 2 * kPi * (i + 0.5 + jit(rng)) / n;
    v.push_back(Vec2(0.2, -0.1) + rad(rng) * Vec2(std::cos(th), std::sin(th)));
  }
  return v;
}

}  // namespace

TEST(Quadrature, GaussTwoPoint) {
  const auto& g = gauss_legendre(2);
  EXPECT_NEAR(g.nodes[0], 0.5 - 1.0 / (2 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(g.nodes[1], 0.5 + 1.0 / (2 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(g.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(g.weights[1], 0.5, 1e-15);
}

TEST(Quadrature, StraightEdgeRule) {
  const SurfaceRule r = edge_rule({Vec2(0, 0), Vec2(1, 0)}, 2);
  EXPECT_NEAR(r.points[0].x(), 0.5 - 1.0 / (2 * std::sqrt(3.0)), 1e-15);
  EXPECT_NEAR(r.weights[0], 0.5, 1e-15);
  EXPECT_NEAR(r.weights[1], 0.5, 1e-15);
  EXPECT_NEAR((r.normals[0] - Vec2(0, -1)).norm(), 0.0, 1e-15);
  const SurfaceRule back = edge_rule({Vec2(1, 0), Vec2(0, 0)}, 2);
  EXPECT_NEAR((back.normals[1] - Vec2(0, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(r.length(), 1.0, 1e-15);
}

TEST(Quadrature, QuarterCircleEdgeLength) {
  const CurvedEdge e = edge_interpolation_points(circle_arc(Vec2(0, 0), 1.0, 0.0, kPi / 2), 0.0, 1.0, 5);
  const SurfaceRule r = edge_rule(e.points, 6);
  const SurfaceRule fine = edge_rule(e.points, 40);
  // exact for the degree-5 edge map up to the non-polynomial speed |dGamma/dt|
  EXPECT_NEAR(r.length(), fine.length(), 1e-9);
  // the interpolant itself is only O(h^6) close to the arc
  EXPECT_NEAR(r.length(), kPi / 2, 1e-5);
  for (const auto& n : r.normals) EXPECT_NEAR(n.norm(), 1.0, 1e-15);
}

TEST(Quadrature, UnitSquare) {
  const Loop l = straight_loop({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const VolumeRule r = polygon_rule(l, 3);
  EXPECT_NEAR(r.measure(), 1.0, 1e-14);
  EXPECT_NEAR(rule_moment(r, 1, 0), 0.5, 1e-14);
  const VolumeRule t = rectangle_rule(Vec2(0, 0), Vec2(1, 1), 2);
  EXPECT_NEAR(rule_moment(t, 3, 0), 0.25, 1e-15);
}

TEST(Quadrature, RightTriangleSecondMoment) {
  const VolumeRule r = polygon_rule(straight_loop({{0, 0}, {1, 0}, {0, 1}}), 2);
  EXPECT_NEAR(rule_moment(r, 2, 0), 1.0 / 12.0, 1e-14);
}

TEST(Quadrature, RandomPolygonMonomialExactness) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const Loop l = straight_loop(random_star_polygon(rng, 3 + trial % 6));
    const int d = 1 + trial % 8;
    const VolumeRule r = polygon_rule(l, d);
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        const double ex = green_moment(l, a, b);
        EXPECT_NEAR(rule_moment(r, a, b), ex, 1e-12 * std::max(1.0, std::abs(ex)));
      }
    }
    for (double w : r.weights) EXPECT_GT(w, 0.0);
  }
}

TEST(Quadrature, QuarterDiscCutCell) {
  const CurvedEdge arc =
      edge_interpolation_points(circle_arc(Vec2(0, 0), 1.0, 0.0, kPi / 2), 0.0, 1.0, 5);
  Loop l{arc.points, {Vec2(0, 1), Vec2(0, 0)}, {Vec2(0, 0), Vec2(1, 0)}};
  const VolumeRule r = polygon_rule(l, 10);
  // exactness with respect to the degree-5 edge map
  for (int a = 0; a <= 10; a += 2)
    for (int b = 0; a + b <= 10; b += 3)
      EXPECT_NEAR(rule_moment(r, a, b), green_moment(l, a, b), 1e-12);
  // area of the true quarter disc, up to the interpolation error of one degree-5 edge
  EXPECT_NEAR(r.measure(), kPi / 4, 1e-5);
  for (double w : r.weights) EXPECT_GT(w, 0.0);
}

TEST(Quadrature, CutCellRulesInteriorPositiveAndClosed) {
  for (int q : {2, 3, 5}) {
    const CutCellMesh m = generate_mesh(annulus(), Vec2(0, 0), Vec2(3.0001, 3.0001), 25, 25, q);
    for (int id : m.cut_cells) {
      const Cell& c = m.cells[id];
      const VolumeRule r = polygon_rule(c.loop(), 2 * q);
      EXPECT_NEAR(r.measure(), c.volume, 1e-12 * c.volume);
      for (std::size_t k = 0; k < r.size(); ++k) {
        EXPECT_GT(r.weights[k], 0.0);
        EXPECT_TRUE(detail::point_in_cell(c, r.points[k]));
      }
      // constant-field divergence: closed integral of n dl vanishes
      Vec2 flux = Vec2::Zero();
      double perim = 0.0;
      for (const auto& e : c.edges) {
        const SurfaceRule s = edge_rule(e.nodes, q + 1);
        for (std::size_t k = 0; k < s.size(); ++k) flux += s.weights[k] * s.normals[k];
        perim += s.length();
      }
      EXPECT_LT(flux.norm(), 1e-10 * perim);
    }
  }
}

TEST(Quadrature, RuledFallbackOnSliver) {
  // thin sliver whose curved side is steep near its ends: no fan apex sees the whole edge
  const Loop sliver{{Vec2(15.8422, 6.41509), Vec2(15.845, 6.22625), Vec2(15.8335, 6.03774)},
                    {Vec2(15.8335, 6.03774), Vec2(15.8491, 6.03774)},
                    {Vec2(15.8491, 6.03774), Vec2(15.8491, 6.41509)},
                    {Vec2(15.8491, 6.41509), Vec2(15.8422, 6.41509)}};
  const VolumeRule r = polygon_rule(sliver, 4);
  for (double w : r.weights) EXPECT_GT(w, 0.0);
  const Vec2 c(15.84, 6.2);
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      double ex = 0.0;
      double got = 0.0;
      // shifted monomials keep the comparison well conditioned
      Loop shifted = sliver;
      for (auto& e : shifted)
        for (auto& v : e) v -= c;
      ex = green_moment(shifted, a, b);
      for (std::size_t k = 0; k < r.size(); ++k) {
        const Vec2 x = r.points[k] - c;
        got += r.weights[k] * std::pow(x.x(), a) * std::pow(x.y(), b);
      }
      EXPECT_NEAR(got, ex, 1e-13);
    }
  }
  VolumeRule ruled;
  ASSERT_TRUE(detail::ruled_rule(sliver, 4, ruled));
  EXPECT_NEAR(ruled.measure(), green_moment(sliver, 0, 0), 1e-14);
}
