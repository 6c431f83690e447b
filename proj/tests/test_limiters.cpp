#include <gtest/gtest.h>

#include <random>

#include "srdg/boundaries.hpp"
#include "srdg/discretization.hpp"
#include "srdg/limiters.hpp"
#include "srdg/problems.hpp"

using namespace srdg;

namespace {

struct WedgeCase {
  EulerProblem pr = double_mach();
  CutCellMesh mesh;
  Discretization d;
  explicit WedgeCase(int n) : mesh(generate_mesh(pr.boundary, pr.lo, pr.hi, n, n * 7 / 10, 1)), d(build_discretization(mesh, 1)) {}
};

Matrix random_euler_field(const Discretization& d, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::normal_distribution<double> g(0.0, 0.3);
  Euler law;
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(d.ncells()) * d.np(), 4);
  for (int id = 0; id < d.ncells(); ++id) {
    auto cb = c.middleRows(static_cast<Eigen::Index>(id) * d.np(), d.np());
    cb.row(0) = law.from_primitive(u(rng), g(rng), g(rng), u(rng)).transpose();
    for (int k = 1; k < d.np(); ++k)
      for (int v = 0; v < 4; ++v) cb(k, v) = g(rng);
  }
  return c;
}

}  // namespace

TEST(Limiters, Minmod) {
  EXPECT_EQ(minmod(1.0, 2.0, 3.0), 1.0);
  EXPECT_EQ(minmod(-1.0, -0.5, -3.0), -0.5);
  EXPECT_EQ(minmod(1.0, -2.0, 3.0), 0.0);
  EXPECT_EQ(minmod(0.0, 2.0, 3.0), 0.0);
}

TEST(Limiters, BarthJespersenFactor) {
  EXPECT_EQ(barth_jespersen(1.0, 0.0, 2.0, {0.5, -0.5}), 1.0);
  EXPECT_DOUBLE_EQ(barth_jespersen(1.0, 0.0, 1.5, {1.0, -0.5}), 0.5);
  EXPECT_DOUBLE_EQ(barth_jespersen(1.0, 0.8, 3.0, {1.0, -0.4}), 0.5);
  EXPECT_EQ(barth_jespersen(1.0, 1.0, 1.0, {1.0}), 0.0);
}

TEST(Limiters, ClassifiesRegularStencils) {
  const WedgeCase s(30);
  const SlopeLimiter lim(s.d, s.pr.law, s.pr.bj_direction);
  int regular = 0;
  for (int id = 0; id < s.d.ncells(); ++id) {
    const Cell& c = s.mesh.cells[id];
    if (lim.regular(id)) {
      ++regular;
      EXPECT_EQ(c.kind, CellKind::whole);
      EXPECT_EQ(lim.neighbors(id).size(), 4u);
    }
    if (c.kind != CellKind::whole || c.i == 0 || c.j == 0) EXPECT_FALSE(lim.regular(id));
  }
  EXPECT_GT(regular, s.d.ncells() / 2);
}

TEST(Limiters, LinearFieldsAreUntouched) {
  const WedgeCase s(30);
  const SlopeLimiter lim(s.d, s.pr.law, s.pr.bj_direction);
  Matrix c = s.d.project([](const Vec2& x) {
    return Eigen::VectorXd(Euler::State(2.0 + 0.3 * x.x() - 0.2 * x.y(), 0.1 * x.x(), 0.4 - 0.1 * x.y(), 10.0 + x.x()));
  }, 4);
  const Matrix before = c;
  lim.apply(c);
  EXPECT_LT((c - before).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(Limiters, SlopeLimitingPreservesAverages) {
  const WedgeCase s(30);
  const SlopeLimiter lim(s.d, s.pr.law, s.pr.bj_direction);
  Matrix c = random_euler_field(s.d, 3);
  const Matrix before = c;
  lim.apply(c);
  double diff = 0.0;
  for (int id = 0; id < s.d.ncells(); ++id)
    diff = std::max(diff, (c.row(static_cast<Eigen::Index>(id) * 3) - before.row(static_cast<Eigen::Index>(id) * 3)).cwiseAbs().maxCoeff());
  EXPECT_LE(diff, 1e-14);
  EXPECT_GT((c - before).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Limiters, BarthJespersenCreatesNoNewExtrema) {
  // scalar check in identity frames: limited values at neighbor centroids stay in the local range
  const WedgeCase s(30);
  const SlopeLimiter lim(s.d, s.pr.law, s.pr.bj_direction, false);
  Matrix c = random_euler_field(s.d, 4);
  const Matrix before = c;
  lim.apply(c);
  for (int id = 0; id < s.d.ncells(); ++id) {
    if (lim.regular(id)) continue;
    const Vec2 xc = s.mesh.cells[id].centroid;
    const auto g = lim.gradient(c, id);
    for (int v = 0; v < 4; ++v) {
      const double ubar = before(static_cast<Eigen::Index>(id) * 3, v);
      double lo = ubar;
      double hi = ubar;
      for (int n : lim.neighbors(id)) {
        lo = std::min(lo, before(static_cast<Eigen::Index>(n) * 3, v));
        hi = std::max(hi, before(static_cast<Eigen::Index>(n) * 3, v));
      }
      for (int n : lim.neighbors(id)) {
        const double val = ubar + g.col(v).dot(s.mesh.cells[n].centroid - xc);
        EXPECT_GE(val, lo - 1e-12);
        EXPECT_LE(val, hi + 1e-12);
      }
    }
  }
}

TEST(Limiters, MonotonizedCentralOnStep) {
  // identity frames: a step in density leaves zero slope in the cells away from the jump
  const WedgeCase s(30);
  const SlopeLimiter lim(s.d, s.pr.law, s.pr.bj_direction, false);
  const Euler& law = s.pr.law;
  Matrix c = s.d.project([&](const Vec2& x) {
    return Eigen::VectorXd(law.from_primitive(x.x() < 1.25 ? 2.0 + x.x() * x.x() : 1.0, 0.0, 0.0, 1.0));
  }, 4);
  lim.apply(c);
  for (int id = 0; id < s.d.ncells(); ++id) {
    if (!lim.regular(id)) continue;
    const auto g = lim.gradient(c, id);
    const double xc = s.mesh.cells[id].centroid.x();
    if (xc > 1.25 + 2 * s.mesh.dx) EXPECT_NEAR(g(0, 0), 0.0, 1e-12);
    // smooth region keeps the second-order slope within the MC bound
    if (xc < 1.25 - 2 * s.mesh.dx) EXPECT_NEAR(g(0, 0), 2.0 * xc, 0.05);
  }
}

TEST(Limiters, RejectsHigherDegree) {
  const EulerProblem pr = double_mach();
  const CutCellMesh m = generate_mesh(pr.boundary, pr.lo, pr.hi, 20, 14, 2);
  const Discretization d = build_discretization(m, 2);
  EXPECT_THROW(SlopeLimiter(d, pr.law, pr.bj_direction), ConfigError);
}

TEST(Positivity, DensityFactorAndFloor) {
  Euler law;
  Matrix phi(3, 2);
  phi << 1.0, -1.0, 1.0, 0.0, 1.0, 1.0;
  Matrix cb(2, 4);
  cb.row(0) = law.from_primitive(1.0, 0.0, 0.0, 1.0).transpose();
  cb.row(1) << 1.5, 0.0, 0.0, 0.0;  // density -0.5 at the first point
  const double theta = positivity_scale(law, phi, cb.block(0, 0, 2, 4));
  EXPECT_NEAR(theta, (1.0 - kPositivityEps) / 1.5, 1e-15);
  EXPECT_NEAR((phi * cb).col(0).minCoeff(), kPositivityEps, 1e-15);
  EXPECT_EQ(cb(0, 0), 1.0);
}

TEST(Positivity, PressureFloorOnRandomStates) {
  Euler law;
  std::mt19937 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix phi(8, 3);
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi.data()[i] = g(rng);
  phi.col(0).setOnes();
  for (int trial = 0; trial < 200; ++trial) {
    Matrix cb(3, 4);
    cb.row(0) = law.from_primitive(0.5 + std::abs(g(rng)), g(rng), g(rng), 0.01 + std::abs(g(rng))).transpose();
    for (int k = 1; k < 3; ++k)
      for (int v = 0; v < 4; ++v) cb(k, v) = g(rng);
    const Euler::State mean = cb.row(0).transpose();
    (void)positivity_scale(law, phi, cb.block(0, 0, 3, 4));
    EXPECT_TRUE(cb.row(0).transpose() == mean);
    const Matrix vals = phi * cb;
    for (Eigen::Index q = 0; q < vals.rows(); ++q) {
      const Euler::State u = vals.row(q).transpose();
      EXPECT_GE(u[0], kPositivityEps * (1.0 - 1e-6));
      EXPECT_GE(law.pressure(u), kPositivityEps * (1.0 - 1e-3));
    }
  }
}

TEST(Positivity, UntouchedWhenAdmissible) {
  Euler law;
  Matrix phi(2, 2);
  phi << 1.0, -1.0, 1.0, 1.0;
  Matrix cb(2, 4);
  cb.row(0) = law.from_primitive(1.0, 0.1, 0.0, 1.0).transpose();
  cb.row(1) << 0.1, 0.0, 0.0, 0.05;
  const Matrix before = cb;
  EXPECT_EQ(positivity_scale(law, phi, cb.block(0, 0, 2, 4)), 1.0);
  EXPECT_TRUE(cb == before);
}

TEST(Positivity, InadmissibleMeanThrows) {
  Euler law;
  Matrix phi = Matrix::Ones(1, 1);
  Matrix cb(1, 4);
  cb << -1.0, 0.0, 0.0, 1.0;
  EXPECT_THROW((void)positivity_scale(law, phi, cb.block(0, 0, 1, 4)), PositivityFailure);
}

TEST(Positivity, GridAndNeighborhoodHooks) {
  const WedgeCase s(24);
  const Euler& law = s.pr.law;
  Matrix c = random_euler_field(s.d, 9);
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    if (i % 3 != 0) c.row(i) *= 20.0;  // force violations
  const Matrix before = c;
  positivity_limit(s.d, law, c);
  for (int id = 0; id < s.d.ncells(); ++id) {
    const auto cb = c.middleRows(static_cast<Eigen::Index>(id) * 3, 3);
    EXPECT_TRUE(cb.row(0) == before.row(static_cast<Eigen::Index>(id) * 3));
    Matrix pts(s.d.bases[id].phi.rows() + s.d.surf_phi[id].rows(), 3);
    pts << s.d.bases[id].phi, s.d.surf_phi[id];
    const Matrix vals = pts * cb;
    EXPECT_GE(vals.col(0).minCoeff(), kPositivityEps * (1.0 - 1e-6));
  }
  const MergePlan plan = build_merge_plan(s.d);
  const Matrix out = plan.apply(c, neighborhood_positivity(law));
  for (int v = 0; v < 4; ++v) {
    double m0 = 0.0;
    double m1 = 0.0;
    for (int id = 0; id < s.d.ncells(); ++id) {
      m0 += s.d.volume(id) * c(static_cast<Eigen::Index>(id) * 3, v);
      m1 += s.d.volume(id) * out(static_cast<Eigen::Index>(id) * 3, v);
    }
    EXPECT_LT(std::abs(m1 - m0) / std::abs(m0), 1e-12);
  }
}
