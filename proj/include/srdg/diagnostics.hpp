#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "srdg/discretization.hpp"
#include "srdg/solver.hpp"

namespace srdg {

struct NormPair {
  double l1 = 0.0;
  double linf = 0.0;
};

/// Pointwise error at a volume quadrature point from the solution row there.
using PointError = std::function<double(const Eigen::RowVectorXd& u, const Vec2& x)>;

/// L1 = sum_K sum_q w_q |err|, Linf = max over the same points.
[[nodiscard]] inline NormPair l1_linf(const Discretization& d, const Matrix& c, const PointError& err) {
  NormPair n;
  for (int id = 0; id < d.ncells(); ++id) {
    const Matrix v = d.values(c, id);
    const VolumeRule& r = d.rules[id];
    for (std::size_t q = 0; q < r.size(); ++q) {
      const double e = std::abs(err(v.row(static_cast<Eigen::Index>(q)), r.points[q]));
      n.l1 += r.weights[q] * e;
      n.linf = std::max(n.linf, e);
    }
  }
  return n;
}

/// Norms of component `var` against a scalar exact solution.
[[nodiscard]] inline NormPair l1_linf(const Discretization& d, const Matrix& c,
                                      const std::function<double(const Vec2&)>& exact, int var = 0) {
  return l1_linf(d, c, [&](const Eigen::RowVectorXd& u, const Vec2& x) { return u[var] - exact(x); });
}

struct FvErrors {
  double domain = 0.0;
  std::map<std::string, double> boundary;  // by embedded-boundary tag
};

/// Relative L1 errors of cell averages against the exact solution at centroids, weighted by
/// |K| over the domain and by the embedded-edge arclength over boundary cells.
[[nodiscard]] inline FvErrors fv_style_errors(const Discretization& d, const Matrix& c,
                                              const std::function<double(const Vec2&)>& exact, int var = 0) {
  const CutCellMesh& m = *d.mesh;
  double num = 0.0;
  double den = 0.0;
  std::map<std::string, std::pair<double, double>> b;
  for (int id = 0; id < d.ncells(); ++id) {
    const Cell& cell = m.cells[id];
    const double u = exact(cell.centroid);
    const double e = std::abs(c(static_cast<Eigen::Index>(id) * d.np(), var) - u);
    num += e * cell.volume;
    den += std::abs(u) * cell.volume;
    for (const auto& edge : cell.edges) {
      if (edge.kind != EdgeKind::embedded) continue;
      const SurfaceRule r = edge_rule(edge.nodes, 2 * d.p + 2);
      double len = 0.0;
      for (double w : r.weights) len += w;
      auto& acc = b[edge.tag];
      acc.first += e * len;
      acc.second += std::abs(u) * len;
    }
  }
  FvErrors out;
  out.domain = den > 0.0 ? num / den : num;
  for (const auto& [tag, acc] : b) out.boundary[tag] = acc.second > 0.0 ? acc.first / acc.second : acc.first;
  return out;
}

/// Least-squares slope of log(error) against log(1/N).
[[nodiscard]] inline double convergence_rate(const std::vector<double>& n, const std::vector<double>& err) {
  if (n.size() != err.size() || n.size() < 2) throw ConfigError("convergence_rate: need at least two levels");
  const std::size_t k = n.size();
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sx += -std::log(n[i]);
    sy += std::log(err[i]);
  }
  const double mx = sx / static_cast<double>(k);
  const double my = sy / static_cast<double>(k);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = -std::log(n[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// Rates between consecutive levels.
[[nodiscard]] inline std::vector<double> pairwise_rates(const std::vector<double>& n, const std::vector<double>& err) {
  std::vector<double> r;
  for (std::size_t i = 1; i < n.size(); ++i) r.push_back(std::log(err[i - 1] / err[i]) / std::log(n[i] / n[i - 1]));
  return r;
}

/// Solution at an arbitrary point x (all components); throws ConfigError outside the fluid.
[[nodiscard]] inline Eigen::RowVectorXd point_value(const Discretization& d, const Matrix& c, const Vec2& x) {
  const int id = d.mesh->locate(x);
  if (id < 0) throw ConfigError("point_value: point is not in the fluid");
  const Eigen::RowVectorXd phi = d.bases[id].eval(d.ref, x);
  return phi * c.middleRows(static_cast<Eigen::Index>(id) * d.np(), d.np());
}

/// Discrete L2 norm of component `var`: sqrt(sum_K sum_q w_q u^2).
[[nodiscard]] inline double l2_norm(const Discretization& d, const Matrix& c, int var = 0) {
  double s = 0.0;
  for (int id = 0; id < d.ncells(); ++id) {
    const Matrix v = d.values(c, id);
    const VolumeRule& r = d.rules[id];
    for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * v(static_cast<Eigen::Index>(q), var) * v(static_cast<Eigen::Index>(q), var);
  }
  return std::sqrt(s);
}

}  // namespace srdg
