#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "srdg/basis.hpp"
#include "srdg/mesh.hpp"
#include "srdg/quadrature.hpp"

namespace srdg {

/// Interior face shared by cells a and b; the rule is oriented with normals pointing out of a.
struct InteriorFace {
  int a = -1;
  int b = -1;
  int edge_a = -1;
  int edge_b = -1;
  SurfaceRule rule;
  Matrix phi_a;  // npts x Np
  Matrix phi_b;
};

struct BoundaryFace {
  int cell = -1;
  int edge = -1;
  EdgeKind kind = EdgeKind::domain;
  std::string tag;
  SurfaceRule rule;
  Matrix phi;
};

/// Per-cell rules, bases and face tables of the modal DG space S^p on a cut-cell mesh.
/// Whole cells use tensor Gauss rules exact to degree 2p+1, cut cells rules exact to 2p,
/// straight edges p+1 Gauss points.
struct Discretization {
  const CutCellMesh* mesh = nullptr;
  int p = 1;
  ReferenceBasis ref{1};
  std::vector<VolumeRule> rules;
  std::vector<CellBasis> bases;
  std::vector<InteriorFace> faces;
  std::vector<BoundaryFace> bfaces;
  std::vector<Matrix> surf_phi;                  // per cell: basis at all its edge points
  std::vector<std::vector<Vec2>> surf_points;    // matching points

  [[nodiscard]] int np() const { return ref.size(); }
  [[nodiscard]] int ncells() const { return static_cast<int>(mesh->cells.size()); }
  [[nodiscard]] double volume(int c) const { return mesh->cells[c].volume; }

  /// L2 projection of f (m components) onto every cell: c_k = (1/|K|) sum_q w_q f(x_q) phi_k.
  [[nodiscard]] Matrix project(const std::function<Eigen::VectorXd(const Vec2&)>& f, int m) const {
    const int n = np();
    Matrix c = Matrix::Zero(static_cast<Eigen::Index>(ncells()) * n, m);
    for (int id = 0; id < ncells(); ++id) {
      const VolumeRule& r = rules[id];
      const Matrix& phi = bases[id].phi;
      const double vol = volume(id);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const Eigen::VectorXd v = f(r.points[q]);
        for (int k = 0; k < n; ++k)
          c.row(static_cast<Eigen::Index>(id) * n + k) +=
              (r.weights[q] / vol) * phi(static_cast<Eigen::Index>(q), k) * v.transpose();
      }
    }
    return c;
  }

  /// Solution values at the volume points of cell `id` (nq x m).
  [[nodiscard]] Matrix values(const Matrix& c, int id) const {
    return bases[id].phi * c.middleRows(static_cast<Eigen::Index>(id) * np(), np());
  }
};

[[nodiscard]] inline Discretization build_discretization(const CutCellMesh& mesh, int p) {
  Discretization d;
  d.mesh = &mesh;
  d.p = p;
  d.ref = ReferenceBasis(p);
  const auto n = mesh.cells.size();
  d.rules.resize(n);
  d.bases.resize(n);
  d.surf_phi.resize(n);
  d.surf_points.resize(n);
  // on a degree-q edge phi * n dl has degree pq + q - 1; integrating it exactly keeps the
  // discrete divergence theorem, so a uniform state stays steady next to curved walls
  auto edge_points = [p](const MeshEdge& e) {
    const int q = static_cast<int>(e.nodes.size()) - 1;
    return std::max(p + 1, (q * (p + 1) + 1) / 2);
  };
  std::vector<std::vector<SurfaceRule>> edge_rules(n);
  for (std::size_t id = 0; id < n; ++id) {
    const Cell& c = mesh.cells[id];
    if (c.kind == CellKind::whole) {
      d.rules[id] = rectangle_rule(c.bbox_min, c.bbox_min + c.bbox_size, p + 1);
    } else {
      d.rules[id] = polygon_rule(c.loop(), 2 * p);
    }
    d.bases[id] = build_cell_basis(d.ref, d.rules[id], c.bbox_min, c.bbox_size);
    for (const auto& e : c.edges) {
      edge_rules[id].push_back(edge_rule(e.nodes, edge_points(e)));
      const auto& r = edge_rules[id].back();
      d.surf_points[id].insert(d.surf_points[id].end(), r.points.begin(), r.points.end());
    }
    d.surf_phi[id] = d.bases[id].eval(d.ref, d.surf_points[id]);
  }
  for (std::size_t id = 0; id < n; ++id) {
    const Cell& c = mesh.cells[id];
    for (std::size_t k = 0; k < c.edges.size(); ++k) {
      const MeshEdge& e = c.edges[k];
      const SurfaceRule& r = edge_rules[id][k];
      if (e.kind == EdgeKind::interior) {
        if (e.neighbor < static_cast<int>(id)) continue;
        InteriorFace f;
        f.a = static_cast<int>(id);
        f.b = e.neighbor;
        f.edge_a = static_cast<int>(k);
        f.edge_b = e.neighbor_edge;
        f.rule = r;
        f.phi_a = d.bases[id].eval(d.ref, r.points);
        f.phi_b = d.bases[f.b].eval(d.ref, r.points);
        d.faces.push_back(std::move(f));
      } else {
        BoundaryFace f;
        f.cell = static_cast<int>(id);
        f.edge = static_cast<int>(k);
        f.kind = e.kind;
        f.tag = e.tag;
        f.rule = r;
        f.phi = d.bases[id].eval(d.ref, r.points);
        d.bfaces.push_back(std::move(f));
      }
    }
  }
  return d;
}

}  // namespace srdg
