#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "srdg/basis.hpp"
#include "srdg/discretization.hpp"
#include "srdg/mesh.hpp"

namespace srdg {

enum class MergeKind { self, normal, central };

[[nodiscard]] inline const char* merge_kind_name(MergeKind k) {
  switch (k) {
    case MergeKind::self: return "self";
    case MergeKind::normal: return "normal";
    case MergeKind::central: return "central";
  }
  return "?";
}

struct Neighborhood {
  int owner = -1;
  std::vector<int> members;  // owner first
  MergeKind kind = MergeKind::self;
  double weighted_volume = 0.0;  // sum |K_m| / N_m
  Vec2 box_min = Vec2::Zero();
  Vec2 box_size = Vec2::Ones();
  std::vector<Matrix> C;       // coarsen block per member, Np x Np
  std::vector<Matrix> D;       // refine block per member, Np x Np
  Matrix phihat;               // neighborhood basis at all member volume points, stacked
  std::vector<int> offsets;    // first row of each member in phihat
  bool identity = false;       // single member with overlap 1: SRD leaves it untouched

  [[nodiscard]] bool contains(int id) const {
    return std::find(members.begin(), members.end(), id) != members.end();
  }
};

/// Hook applied to a neighborhood polynomial q (Np x m) before refinement.
using NeighborhoodFix = std::function<void(const Neighborhood&, Matrix& q)>;

struct MergePlan {
  int np = 1;
  std::vector<Neighborhood> nbhds;  // one per cell, indexed by owner
  std::vector<int> overlap;         // N per cell

  /// Refine(coarsen(c)) for all conserved variables at once; c is (ncells*Np) x m.
  [[nodiscard]] Matrix apply(const Matrix& c, const NeighborhoodFix& fix = {}) const {
    Matrix out = Matrix::Zero(c.rows(), c.cols());
    Matrix q(np, c.cols());
    for (const Neighborhood& nb : nbhds) {
      if (nb.identity) {
        out.middleRows(static_cast<Eigen::Index>(nb.owner) * np, np) +=
            c.middleRows(static_cast<Eigen::Index>(nb.owner) * np, np);
        continue;
      }
      q.setZero();
      for (std::size_t m = 0; m < nb.members.size(); ++m)
        q.noalias() += nb.C[m] * c.middleRows(static_cast<Eigen::Index>(nb.members[m]) * np, np);
      if (fix) fix(nb, q);
      for (std::size_t m = 0; m < nb.members.size(); ++m)
        out.middleRows(static_cast<Eigen::Index>(nb.members[m]) * np, np).noalias() += nb.D[m] * q;
    }
    return out;
  }

  /// Neighborhood coefficients q for every neighborhood (coarsen only).
  [[nodiscard]] std::vector<Matrix> coarsen(const Matrix& c) const {
    std::vector<Matrix> qs;
    qs.reserve(nbhds.size());
    for (const Neighborhood& nb : nbhds) {
      Matrix q = Matrix::Zero(np, c.cols());
      for (std::size_t m = 0; m < nb.members.size(); ++m)
        q += nb.C[m] * c.middleRows(static_cast<Eigen::Index>(nb.members[m]) * np, np);
      qs.push_back(std::move(q));
    }
    return qs;
  }
};

namespace detail {

inline bool is_corner(const Cell& c) { return c.embedded_edge_count() >= 2; }

// Average outward (into the solid) normal over the embedded-edge quadrature points.
inline Vec2 embedded_normal(const Cell& c, int npts) {
  Vec2 n = Vec2::Zero();
  int count = 0;
  for (const auto& e : c.edges) {
    if (e.kind != EdgeKind::embedded) continue;
    const SurfaceRule r = edge_rule(e.nodes, npts);
    for (const auto& v : r.normals) {
      n += v;
      ++count;
    }
  }
  return count ? Vec2(n / count) : n;
}

inline std::vector<int> central_tile(const CutCellMesh& m, const Cell& c) {
  std::vector<int> out{m.cell_id(c.i, c.j)};
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      if (di == 0 && dj == 0) continue;
      const int id = m.cell_id(c.i + di, c.j + dj);
      if (id >= 0) out.push_back(id);
    }
  return out;
}

}  // namespace detail

/// Member sets: whole and large cut cells keep themselves; small cut cells merge along the
/// grid axis closest to the inward boundary normal (at most 4 cells), otherwise with the
/// fluid part of the surrounding 3x3 tile. Corner cells always use the tile.
[[nodiscard]] inline std::vector<Neighborhood> build_neighborhoods(const CutCellMesh& m, int max_chain = 4) {
  const double target = 0.5 * m.dx * m.dy;
  std::vector<Neighborhood> out(m.cells.size());
  for (std::size_t id = 0; id < m.cells.size(); ++id) {
    const Cell& c = m.cells[id];
    Neighborhood& nb = out[id];
    nb.owner = static_cast<int>(id);
    nb.members = {nb.owner};
    nb.kind = MergeKind::self;
    if (c.volume >= target) continue;
    bool done = false;
    if (!detail::is_corner(c)) {
      const Vec2 inward = -detail::embedded_normal(c, 3);
      int sx = inward.x() >= 0 ? 1 : -1;
      int sy = inward.y() >= 0 ? 1 : -1;
      bool use_x = std::abs(inward.x()) > std::abs(inward.y());
      if (std::abs(std::abs(inward.x()) - std::abs(inward.y())) <= 1e-12) {
        const int ix = m.cell_id(c.i + sx, c.j);
        const int iy = m.cell_id(c.i, c.j + sy);
        const double vx = ix >= 0 ? m.cells[ix].volume : -1.0;
        const double vy = iy >= 0 ? m.cells[iy].volume : -1.0;
        use_x = vx >= vy;
      }
      const int di = use_x ? sx : 0;
      const int dj = use_x ? 0 : sy;
      double vol = c.volume;
      std::vector<int> chain{nb.owner};
      for (int k = 1; k < max_chain; ++k) {
        const int nid = m.cell_id(c.i + k * di, c.j + k * dj);
        if (nid < 0) break;
        chain.push_back(nid);
        vol += m.cells[nid].volume;
        if (vol >= target) {
          done = true;
          break;
        }
      }
      if (done) {
        nb.members = chain;
        nb.kind = MergeKind::normal;
      }
    }
    if (!done) {
      nb.members = detail::central_tile(m, c);
      nb.kind = MergeKind::central;
      double vol = 0.0;
      for (int mid : nb.members) vol += m.cells[mid].volume;
      if (vol < target)
        throw MergeFailure("merge: central tile of cell (" + std::to_string(c.i) + "," +
                           std::to_string(c.j) + ") has fluid volume below half a cell");
    }
  }
  return out;
}

[[nodiscard]] inline std::vector<int> compute_overlap_counts(const std::vector<Neighborhood>& nbhds,
                                                             std::size_t ncells) {
  std::vector<int> n(ncells, 0);
  for (const auto& nb : nbhds)
    for (int m : nb.members) ++n[m];
  return n;
}

/// Weighted orthonormal basis of one neighborhood: point weights w/(N |K^|), bounding box
/// of the members. Fills phihat and offsets.
inline void build_neighborhood_basis(Neighborhood& nb, const Discretization& d,
                                     const std::vector<int>& overlap, CellBasis* out = nullptr) {
  const CutCellMesh& m = *d.mesh;
  Vec2 lo = m.cells[nb.members[0]].bbox_min;
  Vec2 hi = lo + m.cells[nb.members[0]].bbox_size;
  nb.weighted_volume = 0.0;
  for (int id : nb.members) {
    const Cell& c = m.cells[id];
    lo = lo.cwiseMin(c.bbox_min);
    hi = hi.cwiseMax(c.bbox_min + c.bbox_size);
    nb.weighted_volume += c.volume / overlap[id];
  }
  nb.box_min = lo;
  nb.box_size = hi - lo;
  std::vector<Vec2> pts;
  std::vector<double> w;
  nb.offsets.clear();
  for (int id : nb.members) {
    nb.offsets.push_back(static_cast<int>(pts.size()));
    const VolumeRule& r = d.rules[id];
    for (std::size_t q = 0; q < r.size(); ++q) {
      pts.push_back(r.points[q]);
      w.push_back(r.weights[q] / (overlap[id] * nb.weighted_volume));
    }
  }
  nb.offsets.push_back(static_cast<int>(pts.size()));
  CellBasis b = build_weighted_basis(d.ref, pts, w, nb.box_min, nb.box_size, false);
  nb.phihat = b.phi;
  if (out) *out = std::move(b);
}

[[nodiscard]] inline MergePlan build_merge_plan(const Discretization& d, int max_chain = 4) {
  const CutCellMesh& m = *d.mesh;
  MergePlan plan;
  plan.np = d.np();
  plan.nbhds = build_neighborhoods(m, max_chain);
  plan.overlap = compute_overlap_counts(plan.nbhds, m.cells.size());
  const int np = d.np();
  for (Neighborhood& nb : plan.nbhds) {
    if (nb.members.size() == 1 && plan.overlap[nb.owner] == 1) {
      nb.identity = true;
      nb.weighted_volume = m.cells[nb.owner].volume;
      nb.C = {Matrix::Identity(np, np)};
      nb.D = {Matrix::Identity(np, np)};
      continue;
    }
    build_neighborhood_basis(nb, d, plan.overlap);
    nb.C.clear();
    nb.D.clear();
    for (std::size_t k = 0; k < nb.members.size(); ++k) {
      const int id = nb.members[k];
      const VolumeRule& r = d.rules[id];
      const Matrix& phi = d.bases[id].phi;
      const auto rows = nb.phihat.middleRows(nb.offsets[k], nb.offsets[k + 1] - nb.offsets[k]);
      Eigen::VectorXd w(static_cast<Eigen::Index>(r.size()));
      for (std::size_t q = 0; q < r.size(); ++q) w[static_cast<Eigen::Index>(q)] = r.weights[q];
      const double n = plan.overlap[id];
      nb.C.push_back(rows.transpose() * w.asDiagonal() * phi / (nb.weighted_volume * n));
      nb.D.push_back(phi.transpose() * w.asDiagonal() * rows / (m.cells[id].volume * n));
    }
  }
  return plan;
}

}  // namespace srdg
