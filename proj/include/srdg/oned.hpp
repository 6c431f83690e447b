#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "srdg/core.hpp"
#include "srdg/diagnostics.hpp"
#include "srdg/quadrature.hpp"
#include "srdg/solver.hpp"

// Periodic 1D model: upwind DG for u_t + a u_x = 0 (a > 0) with state redistribution.
namespace srdg::oned {

struct Grid1D {
  std::vector<double> x;  // cell edges, x.front() = 0
  double h = 1.0;         // regular cell size; cells below h/2 are merged

  [[nodiscard]] int ncells() const { return static_cast<int>(x.size()) - 1; }
  [[nodiscard]] double size(int i) const { return x[i + 1] - x[i]; }
  [[nodiscard]] double length() const { return x.back() - x.front(); }
};

[[nodiscard]] inline Grid1D uniform_grid(int n, double length = 1.0) {
  Grid1D g;
  g.h = length / n;
  for (int i = 0; i <= n; ++i) g.x.push_back(length * i / n);
  return g;
}

/// Seven cells of sizes h, h, alpha h, h, alpha h, h, h (indices -3..3 stored as 0..6).
[[nodiscard]] inline Grid1D model_grid(double alpha, double h = 1.0) {
  Grid1D g;
  g.h = h;
  g.x.push_back(0.0);
  for (double s : {1.0, 1.0, alpha, 1.0, alpha, 1.0, 1.0}) g.x.push_back(g.x.back() + s * h);
  return g;
}

/// Uniform grid of n cells with every other cell split at a random fraction in [1e-6, 0.5].
[[nodiscard]] inline Grid1D random_split_grid(int n, std::uint32_t seed, double length = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(std::log(1e-6), std::log(0.5));
  Grid1D g;
  g.h = length / n;
  g.x.push_back(0.0);
  for (int i = 0; i < n; ++i) {
    const double left = length * i / n;
    if (i % 2 == 1) g.x.push_back(left + std::exp(u(rng)) * g.h);
    g.x.push_back(length * (i + 1) / n);
  }
  return g;
}

/// Orthonormal Legendre basis on [0,1] under the unit-length L2 product: sqrt(2k+1) P_k(2s-1).
using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

inline void legendre_basis(int p, double s, RowRef v, RowRef dv) {
  const double t = 2.0 * s - 1.0;
  double pm = 1.0;
  double pc = t;
  double dpm = 0.0;
  double dpc = 1.0;
  for (int k = 0; k <= p; ++k) {
    double pk;
    double dpk;
    if (k == 0) {
      pk = 1.0;
      dpk = 0.0;
    } else if (k == 1) {
      pk = t;
      dpk = 1.0;
    } else {
      pk = ((2.0 * k - 1.0) * t * pc - (k - 1.0) * pm) / k;
      dpk = dpm + (2.0 * k - 1.0) * pc;  // P'_k = P'_{k-2} + (2k-1) P_{k-1}
      pm = pc;
      pc = pk;
      dpm = dpc;
      dpc = dpk;
    }
    const double nk = std::sqrt(2.0 * k + 1.0);
    v[k] = nk * pk;
    dv[k] = nk * 2.0 * dpk;  // d/ds
  }
}

struct Neighborhood1D {
  std::vector<int> members;  // owner first
  std::vector<double> shift; // periodic offset applied to member coordinates
  double weighted_size = 0.0;
  bool identity = true;
  Matrix phihat;  // neighborhood basis at all member points, stacked by member
};

/// Per-cell quadrature, basis tables, neighborhoods and overlap counts.
struct Plan1D {
  int p = 0;
  Grid1D grid;
  GaussRule1D gauss;  // on [0,1]
  Matrix phi;       // nq x np, same on every cell in local coordinates
  Matrix dphi;      // d/ds
  Eigen::RowVectorXd phi_left;
  Eigen::RowVectorXd phi_right;
  std::vector<Neighborhood1D> nbhds;
  std::vector<int> overlap;

  [[nodiscard]] int np() const { return p + 1; }
  [[nodiscard]] int ncells() const { return grid.ncells(); }

  /// L2 projection of f onto every cell.
  [[nodiscard]] Matrix project(const std::function<double(double)>& f) const {
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(ncells()) * np(), 1);
    for (int i = 0; i < ncells(); ++i)
      for (std::size_t q = 0; q < gauss.nodes.size(); ++q) {
        const double x = grid.x[i] + gauss.nodes[q] * grid.size(i);
        for (int k = 0; k < np(); ++k)
          c(static_cast<Eigen::Index>(i) * np() + k, 0) += gauss.weights[q] * f(x) * phi(static_cast<Eigen::Index>(q), k);
      }
    return c;
  }

  /// Value of cell i's polynomial at local coordinate s.
  [[nodiscard]] double value(const Matrix& c, int i, double s) const {
    Eigen::RowVectorXd v(np());
    Eigen::RowVectorXd dv(np());
    legendre_basis(p, s, v, dv);
    return v.dot(c.middleRows(static_cast<Eigen::Index>(i) * np(), np()).col(0));
  }

  /// State redistribution: coarsen onto neighborhoods, average back onto cells.
  [[nodiscard]] Matrix apply(const Matrix& c) const {
    Matrix out = c;
    const int n = np();
    const auto nq = static_cast<Eigen::Index>(gauss.nodes.size());
    std::vector<bool> touched(ncells(), false);
    for (const auto& nb : nbhds)
      if (!nb.identity)
        for (int m : nb.members) touched[m] = true;
    for (int i = 0; i < ncells(); ++i)
      if (touched[i]) out.middleRows(static_cast<Eigen::Index>(i) * n, n).setZero();
    for (int owner = 0; owner < ncells(); ++owner) {
      const Neighborhood1D& nb = nbhds[owner];
      if (nb.identity) {
        if (touched[owner])
          out.middleRows(static_cast<Eigen::Index>(owner) * n, n) +=
              c.middleRows(static_cast<Eigen::Index>(owner) * n, n) / overlap[owner];
        continue;
      }
      Eigen::VectorXd qhat = Eigen::VectorXd::Zero(n);
      for (std::size_t r = 0; r < nb.members.size(); ++r) {
        const int m = nb.members[r];
        const double wm = grid.size(m) / overlap[m] / nb.weighted_size;
        const Eigen::VectorXd u = phi * c.middleRows(static_cast<Eigen::Index>(m) * n, n).col(0);
        for (Eigen::Index q = 0; q < nq; ++q)
          qhat += wm * gauss.weights[q] * u[q] * nb.phihat.row(static_cast<Eigen::Index>(r) * nq + q).transpose();
      }
      for (std::size_t r = 0; r < nb.members.size(); ++r) {
        const int m = nb.members[r];
        const Eigen::VectorXd qv = nb.phihat.middleRows(static_cast<Eigen::Index>(r) * nq, nq) * qhat;
        for (Eigen::Index q = 0; q < nq; ++q)
          out.middleRows(static_cast<Eigen::Index>(m) * n, n).col(0) +=
              gauss.weights[q] * qv[q] / overlap[m] * phi.row(q).transpose();
      }
    }
    return out;
  }

  /// Upwind DG right-hand side on the periodic grid.
  void rhs(const Matrix& c, double, Matrix& r, double a = 1.0) const {
    const int n = np();
    r.setZero(c.rows(), 1);
    const int nc = ncells();
    for (int i = 0; i < nc; ++i) {
      const int im = (i + nc - 1) % nc;
      const auto ci = c.middleRows(static_cast<Eigen::Index>(i) * n, n).col(0);
      const double uin = phi_right.dot(c.middleRows(static_cast<Eigen::Index>(im) * n, n).col(0));
      const double uout = phi_right.dot(ci);
      const Eigen::VectorXd u = phi * ci;
      const double inv = 1.0 / grid.size(i);
      auto ri = r.middleRows(static_cast<Eigen::Index>(i) * n, n).col(0);
      for (Eigen::Index q = 0; q < u.size(); ++q) ri += a * gauss.weights[q] * u[q] * dphi.row(q).transpose() * inv;
      ri += a * inv * (uin * phi_left.transpose() - uout * phi_right.transpose());
    }
  }
};

[[nodiscard]] inline Plan1D build_1d_plan(const Grid1D& grid, int p) {
  if (p < 0) throw ConfigError("oned: p must be >= 0");
  for (int i = 0; i < grid.ncells(); ++i)
    if (!(grid.size(i) > 0.0)) throw MeshError("oned: non-positive cell size");
  Plan1D pl;
  pl.p = p;
  pl.grid = grid;
  pl.gauss = gauss_legendre(p + 2);
  const auto nq = static_cast<Eigen::Index>(pl.gauss.nodes.size());
  pl.phi.resize(nq, p + 1);
  pl.dphi.resize(nq, p + 1);
  for (Eigen::Index q = 0; q < nq; ++q) legendre_basis(p, pl.gauss.nodes[q], pl.phi.row(q), pl.dphi.row(q));
  pl.phi_left.resize(p + 1);
  pl.phi_right.resize(p + 1);
  Eigen::RowVectorXd tmp(p + 1);
  legendre_basis(p, 0.0, pl.phi_left, tmp);
  legendre_basis(p, 1.0, pl.phi_right, tmp);

  const int nc = grid.ncells();
  const double len = grid.length();
  pl.nbhds.resize(nc);
  pl.overlap.assign(nc, 0);
  for (int i = 0; i < nc; ++i) {
    Neighborhood1D& nb = pl.nbhds[i];
    nb.members = {i};
    nb.shift = {0.0};
    if (grid.size(i) < 0.5 * grid.h) {
      nb.identity = false;
      nb.members.push_back((i + nc - 1) % nc);
      nb.shift.push_back(i == 0 ? -len : 0.0);
      nb.members.push_back((i + 1) % nc);
      nb.shift.push_back(i == nc - 1 ? len : 0.0);
    }
    for (int m : nb.members) ++pl.overlap[m];
  }
  for (int i = 0; i < nc; ++i) {
    Neighborhood1D& nb = pl.nbhds[i];
    nb.weighted_size = 0.0;
    for (int m : nb.members) nb.weighted_size += grid.size(m) / pl.overlap[m];
    if (nb.identity) continue;
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t r = 0; r < nb.members.size(); ++r) {
      lo = std::min(lo, grid.x[nb.members[r]] + nb.shift[r]);
      hi = std::max(hi, grid.x[nb.members[r] + 1] + nb.shift[r]);
    }
    const auto rows = static_cast<Eigen::Index>(nb.members.size()) * nq;
    Matrix v(rows, p + 1);
    Eigen::VectorXd sw(rows);
    Eigen::RowVectorXd dv(p + 1);
    for (std::size_t r = 0; r < nb.members.size(); ++r) {
      const int m = nb.members[r];
      for (Eigen::Index q = 0; q < nq; ++q) {
        const double x = grid.x[m] + nb.shift[r] + pl.gauss.nodes[q] * grid.size(m);
        const Eigen::Index row = static_cast<Eigen::Index>(r) * nq + q;
        Eigen::RowVectorXd vr(p + 1);
        legendre_basis(p, (x - lo) / (hi - lo), vr, dv);
        v.row(row) = vr;
        sw[row] = std::sqrt(pl.gauss.weights[q] * grid.size(m) / pl.overlap[m] / nb.weighted_size);
      }
    }
    Eigen::HouseholderQR<Matrix> qr(sw.asDiagonal() * v);
    Matrix rr = qr.matrixQR().topRows(p + 1).triangularView<Eigen::Upper>();
    for (int k = 0; k <= p; ++k)
      if (rr(k, k) < 0.0) rr.row(k) *= -1.0;
    nb.phihat = rr.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(v);
  }
  return pl;
}

/// Operator adaptor for the shared Runge-Kutta driver.
struct Advection1D {
  const Plan1D* plan;
  double a = 1.0;
  void rhs(const Matrix& c, double t, Matrix& r) const { plan->rhs(c, t, r, a); }
};

/// dt = cfl h / (a (2p+1)) on the regular size.
[[nodiscard]] inline double stable_dt_1d(const Plan1D& pl, double a = 1.0, double cfl = 0.9) {
  return cfl * pl.grid.h / (a * (2.0 * pl.p + 1.0));
}

/// One forward Euler step followed by state redistribution.
[[nodiscard]] inline Matrix forward_euler_srd(const Plan1D& pl, const Matrix& c, double dt, double a = 1.0) {
  Matrix r;
  pl.rhs(c, 0.0, r, a);
  Matrix u = c + dt * r;
  detail::check_finite(u, dt);
  return pl.apply(u);
}

/// Advance to t_final with the degree-matched Runge-Kutta scheme and SRD after every stage.
inline void advance(const Plan1D& pl, Matrix& c, double t_final, double a = 1.0, double cfl = 0.9) {
  const Advection1D op{&pl, a};
  const RKScheme s = scheme_for_degree(std::max(pl.p, 1));
  const double dt0 = stable_dt_1d(pl, a, cfl);
  const long steps = static_cast<long>(std::ceil(t_final / dt0 - 1e-12));
  const double dt = t_final / static_cast<double>(steps);
  double t = 0.0;
  for (long n = 0; n < steps; ++n) {
    rk_step(op, c, t, dt, s, [&](Matrix& u) { u = pl.apply(u); });
    t += dt;
  }
}

/// L1 = sum_i h_i sum_q w_q |U - f|, Linf = max at the same points (2p+4 per cell).
[[nodiscard]] inline NormPair errors(const Plan1D& pl, const Matrix& c, const std::function<double(double)>& f) {
  const GaussRule1D& g = gauss_legendre(2 * pl.p + 4);
  NormPair e;
  for (int i = 0; i < pl.ncells(); ++i)
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double x = pl.grid.x[i] + g.nodes[q] * pl.grid.size(i);
      const double d = std::abs(pl.value(c, i, g.nodes[q]) - f(x));
      e.l1 += pl.grid.size(i) * g.weights[q] * d;
      e.linf = std::max(e.linf, d);
    }
  return e;
}

}  // namespace srdg::oned
