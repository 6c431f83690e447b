#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "srdg/core.hpp"
#include "srdg/geometry.hpp"

namespace srdg {

struct GaussRule1D {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1] (exact for degree 2n-1).
[[nodiscard]] inline const GaussRule1D& gauss_legendre(int n) {
  static std::map<int, GaussRule1D> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  if (n < 1) throw Error("gauss_legendre: n must be positive");

  GaussRule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // ascending order on [0,1]
    r.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    r.weights[n - 1 - i] = 0.5 * w;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

struct VolumeRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] double measure() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

struct SurfaceRule {
  std::vector<Vec2> points;
  std::vector<Vec2> normals;     // outward unit normals (right of the edge direction)
  std::vector<double> weights;   // include |dGamma/dt|
  std::vector<double> ref;       // reference coordinate t in [0,1] of each node

  [[nodiscard]] std::size_t size() const noexcept { return points.size(); }
  [[nodiscard]] double length() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Gauss-Legendre rule on an edge given by its interpolation nodes (2 nodes = straight).
[[nodiscard]] inline SurfaceRule edge_rule(const std::vector<Vec2>& nodes, int n_points) {
  if (n_points < 1) throw Error("edge_rule: n_points must be >= 1");
  const auto& g = gauss_legendre(n_points);
  SurfaceRule r;
  for (int i = 0; i < n_points; ++i) {
    Vec2 x;
    Vec2 dx;
    lagrange_equispaced(nodes, g.nodes[i], x, dx);
    const double jac = dx.norm();
    r.points.push_back(x);
    r.weights.push_back(g.weights[i] * jac);
    r.normals.push_back(Vec2(dx.y(), -dx.x()) / jac);
    r.ref.push_back(g.nodes[i]);
  }
  return r;
}

/// Tensor Gauss rule on an axis-aligned rectangle, n points per direction.
[[nodiscard]] inline VolumeRule rectangle_rule(const Vec2& lo, const Vec2& hi, int n) {
  const auto& g = gauss_legendre(n);
  const Vec2 d = hi - lo;
  VolumeRule r;
  r.degree = 2 * n - 1;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      r.points.emplace_back(lo.x() + d.x() * g.nodes[i], lo.y() + d.y() * g.nodes[j]);
      r.weights.push_back(d.x() * d.y() * g.weights[i] * g.weights[j]);
    }
  }
  return r;
}

namespace detail {

// Apex-edge "fan" rule: x(u,t) = apex + u (E(t) - apex), Jacobian u * cross(E - apex, E').
// Returns false if the Jacobian is not positive at every node.
inline bool fan_rule(const std::vector<Vec2>& edge, const Vec2& apex, int degree,
                     VolumeRule& out) {
  const int q = static_cast<int>(edge.size()) - 1;
  const int nu = (degree + 3) / 2;
  const int nt = (degree * q + 2 * q + 1) / 2;
  const auto& gu = gauss_legendre(nu);
  const auto& gt = gauss_legendre(std::max(nt, 1));
  const Vec2 span = edge.back() - edge.front();
  const double scale = std::max(span.norm(), (edge.front() - apex).norm());
  for (std::size_t it = 0; it < gt.nodes.size(); ++it) {
    Vec2 e;
    Vec2 de;
    lagrange_equispaced(edge, gt.nodes[it], e, de);
    const double jac = cross(e - apex, de);
    if (!(jac > 1e-15 * scale * scale)) return false;
    for (std::size_t iu = 0; iu < gu.nodes.size(); ++iu) {
      const double u = gu.nodes[iu];
      out.points.push_back(apex + u * (e - apex));
      out.weights.push_back(gu.weights[iu] * gt.weights[it] * u * jac);
    }
  }
  return true;
}

inline bool is_degenerate_with_apex(const std::vector<Vec2>& edge, const Vec2& apex) {
  if (edge.size() != 2) return false;
  if (edge.front() == apex || edge.back() == apex) return true;
  const Vec2 d = edge.back() - edge.front();
  const Vec2 r = apex - edge.front();
  const double t = r.dot(d) / d.squaredNorm();
  return std::abs(cross(d, r)) <= 1e-14 * d.squaredNorm() && t > 0.0 && t < 1.0;
}

// Ruled rule for cells that are not star-shaped from any candidate apex (thin slivers along a
// curved edge). The loop is split into two chains from A to B, each parametrized by normalized
// length t, and x(u,t) = (1-u) E(t) + u G(t) sweeps the segments joining them. Both chains
// are polynomial on each t-interval between breakpoints, so exactness matches the fan rule.
inline bool ruled_rule(std::span<const std::vector<Vec2>> loop, int degree, VolumeRule& out) {
  const int n = static_cast<int>(loop.size());
  // first chain: the longest run of curved edges, or half the loop if all are straight
  int start = 0;
  int len = 0;
  for (int s = 0; s < n; ++s) {
    if (loop[s].size() <= 2 || loop[(s + n - 1) % n].size() > 2) continue;
    int l = 0;
    while (l < n && loop[(s + l) % n].size() > 2) ++l;
    if (l > len) {
      start = s;
      len = l;
    }
  }
  if (len == 0) len = n / 2;
  if (len == 0 || len == n) return false;

  struct Chain {
    std::vector<std::vector<Vec2>> edges;
    std::vector<double> T;  // cumulative normalized length, size edges+1
  };
  auto edge_length = [](const std::vector<Vec2>& e) {
    const auto& g = gauss_legendre(10);
    double l = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      Vec2 x;
      Vec2 d;
      lagrange_equispaced(e, g.nodes[i], x, d);
      l += g.weights[i] * d.norm();
    }
    return l;
  };
  auto finish = [&](Chain& c) {
    c.T.assign(1, 0.0);
    for (const auto& e : c.edges) c.T.push_back(c.T.back() + edge_length(e));
    for (double& t : c.T) t /= c.T.back();
    c.T.back() = 1.0;
  };
  Chain first;
  Chain second;
  for (int k = 0; k < len; ++k) first.edges.push_back(loop[(start + k) % n]);
  for (int k = n - 1; k >= len; --k) {
    auto e = loop[(start + k) % n];
    std::reverse(e.begin(), e.end());
    second.edges.push_back(std::move(e));
  }
  finish(first);
  finish(second);
  std::vector<double> breaks(first.T);
  breaks.insert(breaks.end(), second.T.begin(), second.T.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-15; }),
               breaks.end());

  auto eval = [](const Chain& c, double t, double ta, double tb, Vec2& x, Vec2& dx) {
    const double mid = 0.5 * (ta + tb);
    std::size_t k = 0;
    while (k + 2 < c.T.size() && c.T[k + 1] <= mid) ++k;
    const double h = c.T[k + 1] - c.T[k];
    lagrange_equispaced(c.edges[k], (t - c.T[k]) / h, x, dx);
    dx /= h;
  };

  const int q = static_cast<int>(std::max_element(loop.begin(), loop.end(), [](const auto& a, const auto& b) {
                                   return a.size() < b.size();
                                 })->size()) - 1;
  const auto& gu = gauss_legendre((degree + 3) / 2);
  const auto& gt = gauss_legendre(std::max(1, (degree * q + 2 * q + 1) / 2));
  double scale = 0.0;
  for (const auto& e : loop) scale = std::max(scale, (e.back() - e.front()).norm());
  std::vector<double> jacs;
  std::vector<Vec2> pts;
  std::vector<double> wts;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double ta = breaks[b];
    const double tb = breaks[b + 1];
    for (std::size_t it = 0; it < gt.nodes.size(); ++it) {
      const double t = ta + (tb - ta) * gt.nodes[it];
      Vec2 e;
      Vec2 de;
      Vec2 g;
      Vec2 dg;
      eval(first, t, ta, tb, e, de);
      eval(second, t, ta, tb, g, dg);
      for (std::size_t iu = 0; iu < gu.nodes.size(); ++iu) {
        const double u = gu.nodes[iu];
        const Vec2 xt = (1.0 - u) * de + u * dg;
        jacs.push_back(cross(g - e, xt));
        pts.push_back((1.0 - u) * e + u * g);
        wts.push_back(gu.weights[iu] * gt.weights[it] * (tb - ta));
      }
    }
  }
  const double sign = jacs.empty() || jacs.front() > 0.0 ? 1.0 : -1.0;
  for (std::size_t k = 0; k < jacs.size(); ++k) {
    if (!(sign * jacs[k] > 1e-15 * scale * scale)) return false;
    out.points.push_back(pts[k]);
    out.weights.push_back(wts[k] * sign * jacs[k]);
  }
  return !out.points.empty();
}

}  // namespace detail

/// Volume rule on a (curved) polygon given as a CCW loop of edges, each edge a list of
/// Lagrange nodes (2 nodes for straight edges). Exact to `degree` with respect to the
/// degree-q edge maps; weights positive and points interior.
[[nodiscard]] inline VolumeRule polygon_rule(std::span<const std::vector<Vec2>> loop, int degree) {
  if (loop.size() < 2) throw TriangulationError("polygon_rule: fewer than two edges");
  std::vector<Vec2> candidates;
  {
    Vec2 avg = Vec2::Zero();
    for (const auto& e : loop) avg += e.front();
    avg /= static_cast<double>(loop.size());
    candidates.push_back(avg);
    // area centroid of the straight polygon through all nodes
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    for (const auto& e : loop) {
      for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        const double cr = cross(e[i], e[i + 1]);
        a += cr;
        c += cr * (e[i] + e[i + 1]);
      }
    }
    if (std::abs(a) > 0.0) candidates.push_back(c / (3.0 * a));
    for (const auto& e : loop) {
      if (e.size() == 2) candidates.push_back(0.5 * (e.front() + e.back()));
    }
    for (const auto& e : loop) candidates.push_back(e.front());
  }
  for (const Vec2& apex : candidates) {
    VolumeRule r;
    r.degree = degree;
    bool ok = true;
    for (const auto& e : loop) {
      if (detail::is_degenerate_with_apex(e, apex)) continue;
      if (!detail::fan_rule(e, apex, degree, r)) {
        ok = false;
        break;
      }
    }
    if (ok && !r.points.empty()) return r;
  }
  VolumeRule r;
  r.degree = degree;
  if (detail::ruled_rule(loop, degree, r)) return r;
  throw TriangulationError("polygon_rule: polygon is not star-shaped from any candidate apex");
}

}  // namespace srdg
