#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "srdg/diagnostics.hpp"
#include "srdg/oned.hpp"

using namespace srdg;
using namespace srdg::oned;

namespace {

double total_mass(const Plan1D& pl, const Matrix& c) {
  double s = 0.0;
  for (int i = 0; i < pl.ncells(); ++i) s += pl.grid.size(i) * c(static_cast<Eigen::Index>(i) * pl.np(), 0);
  return s;
}

}  // namespace

TEST(OneD, ModelGridOverlapCounts) {
  const Plan1D pl = build_1d_plan(model_grid(0.1), 2);
  const std::vector<int> expect{1, 2, 1, 3, 1, 2, 1};
  EXPECT_EQ(pl.overlap, expect);
  EXPECT_FALSE(pl.nbhds[2].identity);
  EXPECT_EQ(pl.nbhds[2].members, (std::vector<int>{2, 1, 3}));
  EXPECT_NEAR(pl.nbhds[2].weighted_size, 0.5 + 0.1 + 1.0 / 3.0, 1e-15);
}

TEST(OneD, WorkedFiniteVolumeExample) {
  // p = 0: provisional upwind update, neighborhood averages, then averages of overlapping values
  const double alpha = 0.1;
  const Plan1D pl = build_1d_plan(model_grid(alpha), 0);
  const std::vector<double> u0{1.0, 2.0, 4.0, 3.0, 0.5, 1.5, 2.5};
  Matrix c(7, 1);
  for (int i = 0; i < 7; ++i) c(i, 0) = u0[i];
  const double dt = 0.3;
  const Matrix out = forward_euler_srd(pl, c, dt);
  std::vector<double> uh(7);
  for (int i = 0; i < 7; ++i) uh[i] = u0[i] - dt / pl.grid.size(i) * (u0[i] - u0[(i + 6) % 7]);
  const double wsum = 0.5 + alpha + 1.0 / 3.0;
  const double qm1 = (0.5 * uh[1] + alpha * uh[2] + uh[3] / 3.0) / wsum;
  const double qp1 = (0.5 * uh[5] + alpha * uh[4] + uh[3] / 3.0) / wsum;
  EXPECT_NEAR(out(3, 0), (qm1 + uh[3] + qp1) / 3.0, 1e-14);
  EXPECT_NEAR(out(1, 0), 0.5 * (uh[1] + qm1), 1e-14);
  EXPECT_NEAR(out(5, 0), 0.5 * (uh[5] + qp1), 1e-14);
  EXPECT_NEAR(out(2, 0), qm1, 1e-14);
  EXPECT_NEAR(out(4, 0), qp1, 1e-14);
  EXPECT_NEAR(out(0, 0), uh[0], 1e-14);
  EXPECT_NEAR(out(6, 0), uh[6], 1e-14);
}

TEST(OneD, UniformGridPlanIsIdentity) {
  const Plan1D pl = build_1d_plan(uniform_grid(16), 3);
  for (const auto& nb : pl.nbhds) EXPECT_TRUE(nb.identity);
  const Matrix c = pl.project([](double x) { return std::sin(6.0 * x); });
  EXPECT_TRUE(pl.apply(c) == c);
}

TEST(OneD, NeighborhoodBasisIsWeightedOrthonormalButNotLegendre) {
  const Plan1D pl = build_1d_plan(model_grid(0.1), 4);
  const Neighborhood1D& nb = pl.nbhds[2];
  const auto nq = static_cast<Eigen::Index>(pl.gauss.nodes.size());
  Matrix g = Matrix::Zero(5, 5);
  for (std::size_t r = 0; r < nb.members.size(); ++r) {
    const int m = nb.members[r];
    for (Eigen::Index q = 0; q < nq; ++q) {
      const auto row = nb.phihat.row(static_cast<Eigen::Index>(r) * nq + q);
      g += pl.gauss.weights[q] * pl.grid.size(m) / pl.overlap[m] / nb.weighted_size * row.transpose() * row;
    }
  }
  EXPECT_LT((g - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
  // Legendre polynomials on the neighborhood interval differ pointwise
  const double lo = pl.grid.x[1];
  const double hi = pl.grid.x[4];
  double diff = 0.0;
  Eigen::RowVectorXd v(5);
  Eigen::RowVectorXd dv(5);
  for (Eigen::Index q = 0; q < nq; ++q) {
    legendre_basis(4, (pl.grid.x[2] + pl.gauss.nodes[q] * pl.grid.size(2) - lo) / (hi - lo), v, dv);
    diff = std::max(diff, (nb.phihat.row(q) - v).cwiseAbs().maxCoeff());
  }
  EXPECT_GT(diff, 1e-3);
}

TEST(OneD, LegendreBasisOrthonormal) {
  const GaussRule1D& g = gauss_legendre(8);
  Matrix gram = Matrix::Zero(6, 6);
  Eigen::RowVectorXd v(6);
  Eigen::RowVectorXd dv(6);
  for (std::size_t q = 0; q < g.nodes.size(); ++q) {
    legendre_basis(5, g.nodes[q], v, dv);
    gram += g.weights[q] * v.transpose() * v;
  }
  EXPECT_LT((gram - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-13);
  // derivative by central differences
  Eigen::RowVectorXd vp(6);
  Eigen::RowVectorXd vm(6);
  legendre_basis(5, 0.3 + 1e-6, vp, dv);
  legendre_basis(5, 0.3 - 1e-6, vm, dv);
  legendre_basis(5, 0.3, v, dv);
  EXPECT_LT(((vp - vm) / 2e-6 - dv).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(OneD, SrdConservativeAndPExact) {
  for (int p : {0, 1, 2, 3, 4}) {
    const Plan1D pl = build_1d_plan(random_split_grid(20, 17 + p), p);
    std::mt19937 rng(p);
    std::normal_distribution<double> g;
    Matrix c(static_cast<Eigen::Index>(pl.ncells()) * pl.np(), 1);
    for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, 0) = g(rng);
    EXPECT_LT(std::abs(total_mass(pl, pl.apply(c)) - total_mass(pl, c)), 1e-13 * std::max(1.0, std::abs(total_mass(pl, c))));
    // a global polynomial of degree p (no periodic wrap inside a neighborhood away from x = 0)
    std::vector<double> a(p + 1);
    for (double& ak : a) ak = g(rng);
    const Matrix poly = pl.project([&](double x) {
      double s = 0.0;
      for (int k = p; k >= 0; --k) s = s * x + a[k];
      return s;
    });
    const Matrix out = pl.apply(poly);
    for (int i = 0; i < pl.ncells(); ++i) {
      bool wraps = false;
      for (const auto& nb : pl.nbhds)
        if (!nb.identity && std::find(nb.members.begin(), nb.members.end(), i) != nb.members.end())
          for (double s : nb.shift) wraps = wraps || s != 0.0;
      if (wraps) continue;
      EXPECT_LT((out.middleRows(static_cast<Eigen::Index>(i) * pl.np(), pl.np()) -
                 poly.middleRows(static_cast<Eigen::Index>(i) * pl.np(), pl.np())).cwiseAbs().maxCoeff(), 1e-11)
          << "p=" << p << " cell " << i;
    }
  }
}

TEST(OneD, ConstantStaysConstant) {
  const Plan1D pl = build_1d_plan(random_split_grid(16, 3), 2);
  Matrix c = pl.project([](double) { return 2.5; });
  advance(pl, c, 0.3);
  const NormPair e = errors(pl, c, [](double) { return 2.5; });
  EXPECT_LT(e.linf, 1e-12);
}

TEST(OneD, ConvergesOnRandomGrids) {
  auto f = [](double x) { return std::sin(2.0 * kPi * x); };
  for (int p : {1, 2, 3, 4}) {
    std::vector<double> ns;
    std::vector<double> l1;
    std::vector<double> li;
    for (int n : {20, 40, 80, 160}) {
      const Plan1D pl = build_1d_plan(random_split_grid(n, 1000 + n), p);
      Matrix c = pl.project(f);
      advance(pl, c, 1.0);
      const NormPair e = errors(pl, c, f);
      ns.push_back(n);
      l1.push_back(e.l1);
      li.push_back(e.linf);
    }
    EXPECT_NEAR(convergence_rate(ns, l1), p + 1, 0.2) << "p=" << p;
    EXPECT_NEAR(convergence_rate(ns, li), p + 1, 0.2) << "p=" << p;
  }
}
