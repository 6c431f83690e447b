#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "srdg/boundaries.hpp"
#include "srdg/diagnostics.hpp"
#include "srdg/discretization.hpp"

using namespace srdg;

namespace {

struct AnnulusCase {
  CutCellMesh mesh = generate_mesh(annulus(), Vec2(0, 0), Vec2(3.0001, 3.0001), 20, 20, 2);
  Discretization d = build_discretization(mesh, 1);
};

}  // namespace

TEST(Diagnostics, NormsOfExactAndOffset) {
  const AnnulusCase a;
  auto f = [](const Vec2& x) { return x.x() - 0.5 * x.y(); };
  const Matrix c = a.d.project([&](const Vec2& x) { return Eigen::VectorXd::Constant(1, f(x)); }, 1);
  const NormPair e0 = l1_linf(a.d, c, f);
  EXPECT_LT(e0.l1, 1e-13);
  EXPECT_LT(e0.linf, 1e-10);  // projection round-off on tiny cut cells
  const NormPair e1 = l1_linf(a.d, c, [&](const Vec2& x) { return f(x) - 1.0; });
  EXPECT_NEAR(e1.l1, a.mesh.fluid_area(), 1e-12);
  EXPECT_NEAR(e1.linf, 1.0, 1e-10);
  EXPECT_GE(e1.linf, e1.l1 / a.mesh.fluid_area());
}

TEST(Diagnostics, FvErrorsZeroForExactAndSplitByTag) {
  const AnnulusCase a;
  const Matrix one = a.d.project([](const Vec2&) { return Eigen::VectorXd::Constant(1, 1.0); }, 1);
  const FvErrors e = fv_style_errors(a.d, one, [](const Vec2&) { return 1.0; });
  EXPECT_LT(e.domain, 1e-13);
  ASSERT_EQ(e.boundary.size(), 2u);
  EXPECT_LT(e.boundary.at("inner"), 1e-13);
  EXPECT_LT(e.boundary.at("outer"), 1e-13);
  // 10% relative offset everywhere gives 0.1 in every measure
  const FvErrors e2 = fv_style_errors(a.d, one, [](const Vec2&) { return 1.0 / 1.1; });
  EXPECT_NEAR(e2.domain, 0.1, 1e-14);
  EXPECT_NEAR(e2.boundary.at("inner"), 0.1, 1e-14);
}

TEST(Diagnostics, LeastSquaresRate) {
  const std::vector<double> n{25, 50, 100, 200};
  std::vector<double> e;
  for (double k : n) e.push_back(3.0 * std::pow(k, -2.0));
  EXPECT_NEAR(convergence_rate(n, e), 2.0, 1e-12);
  // tabulated domain errors: consecutive rates
  const std::vector<double> ed{4.24e-03, 8.36e-04, 1.90e-04, 4.60e-05};
  const auto r = pairwise_rates(n, ed);
  EXPECT_NEAR(r[0], 2.34, 0.01);
  EXPECT_NEAR(r[1], 2.14, 0.01);
  EXPECT_NEAR(r[2], 2.05, 0.01);
  // noisy data against a normal-equations solve
  std::mt19937 rng(1);
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<double> noisy;
  for (double k : n) noisy.push_back(std::pow(k, -3.0) * std::exp(g(rng)));
  Eigen::MatrixXd a(4, 2);
  Eigen::VectorXd b(4);
  for (int i = 0; i < 4; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = std::log(1.0 / n[i]);
    b[i] = std::log(noisy[i]);
  }
  const Eigen::Vector2d sol = (a.transpose() * a).ldlt().solve(a.transpose() * b);
  EXPECT_NEAR(convergence_rate(n, noisy), sol[1], 1e-12);
  EXPECT_THROW((void)convergence_rate({10}, {1.0}), ConfigError);
}

TEST(Diagnostics, MassAuditAndL2) {
  const AnnulusCase a;
  const Matrix zero = Matrix::Zero(static_cast<Eigen::Index>(a.d.ncells()) * a.d.np(), 2);
  EXPECT_EQ(mass_audit(a.d, zero).cwiseAbs().maxCoeff(), 0.0);
  const Matrix cst = a.d.project([](const Vec2&) { return Eigen::Vector2d(2.0, -1.0).eval(); }, 2);
  const Eigen::VectorXd m = mass_audit(a.d, cst);
  EXPECT_NEAR(m[0], 2.0 * a.mesh.fluid_area(), 1e-12);
  EXPECT_NEAR(m[1], -a.mesh.fluid_area(), 1e-12);
  EXPECT_NEAR(l2_norm(a.d, cst, 0), 2.0 * std::sqrt(a.mesh.fluid_area()), 1e-12);
}
