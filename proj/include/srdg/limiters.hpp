#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "srdg/discretization.hpp"
#include "srdg/laws.hpp"
#include "srdg/srd.hpp"

namespace srdg {

inline constexpr double kPositivityEps = 1e-12;

[[nodiscard]] inline double minmod(double a, double b, double c) {
  if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
  if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
  return 0.0;
}

/// Largest alpha in [0,1] keeping ubar + alpha*delta_n within [lo, hi] for every delta_n.
[[nodiscard]] inline double barth_jespersen(double ubar, double lo, double hi, const std::vector<double>& deltas) {
  double alpha = 1.0;
  for (double dlt : deltas) {
    if (dlt > 0.0) {
      alpha = std::min(alpha, (hi - ubar) / dlt);
    } else if (dlt < 0.0) {
      alpha = std::min(alpha, (lo - ubar) / dlt);
    }
  }
  return std::clamp(alpha, 0.0, 1.0);
}

/// Slope limiting of a p = 1 Euler solution in characteristic variables: MC on whole cells
/// whose four axis neighbors are whole, Barth-Jespersen at neighbor centroids elsewhere.
class SlopeLimiter {
 public:
  using State = Euler::State;
  using Frame = Euler::Frame;
  using Grad = Eigen::Matrix<double, 2, 4>;  // rows: x and y derivatives

  SlopeLimiter(const Discretization& d, Euler law, std::function<Vec2(const Vec2&)> bj_direction,
               bool characteristic = true)
      : d_(d), law_(law), dir_(std::move(bj_direction)), characteristic_(characteristic) {
    if (d.p != 1) throw ConfigError("slope limiter: only p = 1 is supported");
    const CutCellMesh& m = *d.mesh;
    const int nc = d.ncells();
    regular_.assign(nc, false);
    neighbors_.resize(nc);
    grad_.resize(nc);
    for (int id = 0; id < nc; ++id) {
      const Cell& c = m.cells[id];
      for (const auto& e : c.edges)
        if (e.kind == EdgeKind::interior &&
            std::find(neighbors_[id].begin(), neighbors_[id].end(), e.neighbor) == neighbors_[id].end())
          neighbors_[id].push_back(e.neighbor);
      bool reg = c.kind == CellKind::whole;
      for (auto [di, dj] : {std::pair{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
        const int n = m.cell_id(c.i + di, c.j + dj);
        reg = reg && n >= 0 && m.cells[n].kind == CellKind::whole;
      }
      regular_[id] = reg;
      const CellBasis& b = d.bases[id];
      grad_[id] << b.dphidx(0, 1), b.dphidx(0, 2), b.dphidy(0, 1), b.dphidy(0, 2);
    }
  }

  [[nodiscard]] bool regular(int id) const { return regular_[id]; }
  [[nodiscard]] const std::vector<int>& neighbors(int id) const { return neighbors_[id]; }

  /// Gradient of the linear part of cell `id`.
  [[nodiscard]] Grad gradient(const Matrix& c, int id) const {
    const auto cb = c.middleRows(static_cast<Eigen::Index>(id) * 3, 3);
    Grad g = grad_[id] * cb.bottomRows(2);
    return g;
  }
  void set_gradient(Matrix& c, int id, const Grad& g) const {
    c.middleRows(static_cast<Eigen::Index>(id) * 3 + 1, 2) = grad_[id].inverse() * g;
  }

  void apply(Matrix& c) const {
    const int nc = d_.ncells();
    std::vector<Grad> out(nc);
    for (int id = 0; id < nc; ++id) out[id] = regular_[id] ? mc(c, id) : bj(c, id);
    for (int id = 0; id < nc; ++id) set_gradient(c, id, out[id]);
  }

  [[nodiscard]] Grad mc(const Matrix& c, int id) const {
    const CutCellMesh& m = *d_.mesh;
    const Cell& cell = m.cells[id];
    const State u = avg(c, id);
    const Grad g = gradient(c, id);
    Grad out;
    for (int axis = 0; axis < 2; ++axis) {
      const Vec2 dir = axis == 0 ? Vec2(1, 0) : Vec2(0, 1);
      const double h = axis == 0 ? m.dx : m.dy;
      const int np = m.cell_id(cell.i + (axis == 0), cell.j + (axis == 1));
      const int nm = m.cell_id(cell.i - (axis == 0), cell.j - (axis == 1));
      const Frame R = frame(u, dir);
      const Frame L = R.inverse();
      const State wp = L * (avg(c, np) - u) / h;
      const State wm = L * (u - avg(c, nm)) / h;
      const State w = L * g.row(axis).transpose();
      State lim;
      for (int v = 0; v < 4; ++v) lim[v] = minmod(2.0 * wp[v], w[v], 2.0 * wm[v]);
      out.row(axis) = (R * lim).transpose();
    }
    return out;
  }

  [[nodiscard]] Grad bj(const Matrix& c, int id) const {
    const CutCellMesh& m = *d_.mesh;
    const Vec2 xc = m.cells[id].centroid;
    const auto& nbrs = neighbors_[id];
    const Grad g = gradient(c, id);
    if (nbrs.empty()) return Grad::Zero();
    const State u = avg(c, id);
    const Frame R = frame(u, dir_(xc));
    const Frame L = R.inverse();
    const State w = L * u;
    const Eigen::Matrix<double, 4, 2> gw = L * g.transpose();  // characteristic gradients
    Eigen::Matrix<double, 4, 2> lim;
    std::vector<double> deltas(nbrs.size());
    for (int v = 0; v < 4; ++v) {
      double lo = w[v];
      double hi = w[v];
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const double wn = (L * avg(c, nbrs[k]))[v];
        lo = std::min(lo, wn);
        hi = std::max(hi, wn);
        deltas[k] = gw.row(v).dot(m.cells[nbrs[k]].centroid - xc);
      }
      lim.row(v) = barth_jespersen(w[v], lo, hi, deltas) * gw.row(v);
    }
    return (R * lim).transpose();
  }

 private:
  const Discretization& d_;
  Euler law_;
  std::function<Vec2(const Vec2&)> dir_;
  bool characteristic_;
  std::vector<bool> regular_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<Eigen::Matrix2d> grad_;  // columns: gradients of phi_1, phi_2

  [[nodiscard]] State avg(const Matrix& c, int id) const {
    return c.row(static_cast<Eigen::Index>(id) * 3).transpose();
  }
  [[nodiscard]] Frame frame(const State& u, const Vec2& dir) const {
    return characteristic_ ? law_.right_eigenvectors(u, dir) : Frame(Frame::Identity());
  }
};

/// Zhang-Shu scaling of the high modes of one polynomial (coefficient block, first row the
/// mean) so that density and pressure are at least eps at every row of phi. Returns the
/// factor applied.
template <class Block>
double positivity_scale(const Euler& law, const Matrix& phi, Block cb, double eps = kPositivityEps) {
  using State = Euler::State;
  const State ubar = cb.row(0).transpose();
  const double rbar = ubar[0];
  const double pbar = law.pressure(ubar);
  if (!(rbar > 0.0) || !(pbar > 0.0) || !ubar.allFinite())
    throw PositivityFailure("positivity: cell average has non-positive density or pressure");
  const double er = std::min(eps, rbar);
  const double ep = std::min(eps, pbar);
  const Eigen::Index n = cb.rows();
  Matrix vals = phi * cb;
  double theta1 = 1.0;
  const double rmin = vals.col(0).minCoeff();
  if (rmin < er) theta1 = rbar > rmin ? (rbar - er) / (rbar - rmin) : 0.0;
  if (theta1 < 1.0) {
    cb.block(1, 0, n - 1, 1) *= theta1;
    vals.col(0) = ((vals.col(0).array() - rbar) * theta1 + rbar).matrix();
  }
  // repeat on recomputed values: cancellation in the pressure can leave a point just under the floor
  double theta2 = 1.0;
  for (int pass = 0; pass < 4; ++pass) {
    double t = 1.0;
    for (Eigen::Index q = 0; q < vals.rows(); ++q) {
      const State uq = vals.row(q).transpose();
      if (law.pressure(uq) >= ep && uq[0] > 0.0) continue;
      double lo = 0.0;
      double hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const State um = ubar + mid * (uq - ubar);
        if (um[0] > 0.0 && law.pressure(um) >= ep * (1.0 + 1e-2)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      t = std::min(t, lo);
    }
    if (t >= 1.0) break;
    cb.bottomRows(n - 1) *= t;
    theta2 *= t;
    vals = phi * cb;
  }
  return theta1 * theta2;
}

/// Base-grid positivity at all volume and surface quadrature points.
inline void positivity_limit(const Discretization& d, const Euler& law, Matrix& c,
                             double eps = kPositivityEps) {
  const int np = d.np();
  Matrix pts;
  for (int id = 0; id < d.ncells(); ++id) {
    pts.resize(d.bases[id].phi.rows() + d.surf_phi[id].rows(), np);
    pts << d.bases[id].phi, d.surf_phi[id];
    (void)positivity_scale(law, pts, c.middleRows(static_cast<Eigen::Index>(id) * np, np), eps);
  }
}

/// Positivity of a neighborhood polynomial at all member volume points, as an SRD hook.
[[nodiscard]] inline NeighborhoodFix neighborhood_positivity(const Euler& law, double eps = kPositivityEps) {
  return [law, eps](const Neighborhood& nb, Matrix& q) { (void)positivity_scale(law, nb.phihat, q.block(0, 0, q.rows(), q.cols()), eps); };
}

}  // namespace srdg
