#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "srdg/core.hpp"
#include "srdg/geometry.hpp"
#include "srdg/quadrature.hpp"

namespace srdg {

enum class CellKind { whole, cut };
enum class EdgeKind { interior, domain, embedded };

/// One edge of a cell polygon, oriented counterclockwise around the cell.
struct MeshEdge {
  std::vector<Vec2> nodes;  // Lagrange nodes; 2 for straight edges
  EdgeKind kind = EdgeKind::interior;
  int neighbor = -1;        // cell id across an interior edge
  int neighbor_edge = -1;   // index of the mirrored edge in the neighbor
  int side = -1;            // 0 bottom, 1 right, 2 top, 3 left for grid-aligned edges
  std::string tag;          // domain side name or embedded boundary tag
  int curve = -1;           // embedded edges: curve / segment / parameters of each node
  int segment = -1;
  std::vector<double> params;

  [[nodiscard]] bool straight() const noexcept { return nodes.size() == 2; }
};

struct Cell {
  int i = 0;
  int j = 0;
  CellKind kind = CellKind::whole;
  std::vector<Vec2> vertices;
  std::vector<MeshEdge> edges;
  double volume = 0.0;
  Vec2 centroid = Vec2::Zero();
  Vec2 bbox_min = Vec2::Zero();
  Vec2 bbox_size = Vec2::Zero();

  [[nodiscard]] int embedded_edge_count() const {
    return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const MeshEdge& e) {
      return e.kind == EdgeKind::embedded;
    }));
  }
  /// Edge node lists in loop order, the input expected by polygon_rule.
  [[nodiscard]] std::vector<std::vector<Vec2>> loop() const {
    std::vector<std::vector<Vec2>> l;
    l.reserve(edges.size());
    for (const auto& e : edges) l.push_back(e.nodes);
    return l;
  }
};

struct CutCellMesh {
  int nx = 0;
  int ny = 0;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();
  double dx = 1.0;
  double dy = 1.0;
  int q = 1;
  std::string boundary_name = "none";
  std::vector<Cell> cells;
  std::vector<int> index;  // (i,j) -> cell id or -1 for solid
  std::vector<int> cut_cells;
  double min_volume_fraction = 1.0;

  [[nodiscard]] double xline(int i) const { return i == nx ? hi.x() : lo.x() + (hi.x() - lo.x()) * i / nx; }
  [[nodiscard]] double yline(int j) const { return j == ny ? hi.y() : lo.y() + (hi.y() - lo.y()) * j / ny; }
  [[nodiscard]] int cell_id(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
    return index[static_cast<std::size_t>(j) * nx + i];
  }
  [[nodiscard]] double cell_area() const { return dx * dy; }
  [[nodiscard]] double fluid_area() const {
    double a = 0.0;
    for (const auto& c : cells) a += c.volume;
    return a;
  }
  /// Background column index with x in [xline(i), xline(i+1)).
  [[nodiscard]] int locate_x(double x) const {
    int i = static_cast<int>(std::floor((x - lo.x()) / dx));
    i = std::clamp(i, 0, nx - 1);
    while (i > 0 && x < xline(i)) --i;
    while (i < nx - 1 && x >= xline(i + 1)) ++i;
    return i;
  }
  [[nodiscard]] int locate_y(double y) const {
    int j = static_cast<int>(std::floor((y - lo.y()) / dy));
    j = std::clamp(j, 0, ny - 1);
    while (j > 0 && y < yline(j)) --j;
    while (j < ny - 1 && y >= yline(j + 1)) ++j;
    return j;
  }
  /// Fluid cell containing x, or -1. Cut cells are tested against their curved polygon.
  [[nodiscard]] int locate(const Vec2& x) const;
};

namespace detail {

// Winding test of x against a cell loop with curved edges sampled at their nodes plus midpoints.
inline bool point_in_cell(const Cell& c, const Vec2& x) {
  std::vector<Vec2> poly;
  for (const auto& e : c.edges) {
    if (e.straight()) {
      poly.push_back(e.nodes.front());
    } else {
      constexpr int kSub = 16;
      for (int s = 0; s < kSub; ++s) {
        Vec2 v;
        Vec2 d;
        lagrange_equispaced(e.nodes, static_cast<double>(s) / kSub, v, d);
        poly.push_back(v);
      }
    }
  }
  bool in = false;
  for (std::size_t a = 0, b = poly.size() - 1; a < poly.size(); b = a++) {
    if ((poly[a].y() > x.y()) != (poly[b].y() > x.y())) {
      const double xc = poly[b].x() + (x.y() - poly[b].y()) * (poly[a].x() - poly[b].x()) /
                                          (poly[a].y() - poly[b].y());
      if (x.x() < xc) in = !in;
    }
  }
  return in;
}

}  // namespace detail

inline int CutCellMesh::locate(const Vec2& x) const {
  if (x.x() < lo.x() || x.y() < lo.y() || x.x() > hi.x() || x.y() > hi.y()) return -1;
  const int id = cell_id(locate_x(x.x()), locate_y(x.y()));
  if (id < 0) return -1;
  if (cells[id].kind == CellKind::whole) return id;
  return detail::point_in_cell(cells[id], x) ? id : -1;
}

struct MeshOptions {
  double snap_rel = 1e-10;  // vertex-snap tolerance relative to min(dx, dy)
};

namespace detail {

struct CurvePos {
  int seg = 0;
  double s = 0.0;
  Vec2 pt = Vec2::Zero();
};

struct SubArc {
  int seg;
  double s0;
  double s1;
  Vec2 p0;
  Vec2 p1;
};

struct Piece {
  int curve;
  std::vector<SubArc> arcs;
};

inline const char* domain_side_tag(int side) {
  static constexpr std::array<const char*, 4> names{"ymin", "xmax", "ymax", "xmin"};
  return names[side];
}

class MeshBuilder {
 public:
  MeshBuilder(const Boundary& b, Vec2 lo, Vec2 hi, int nx, int ny, int q, MeshOptions opt)
      : b_(b), opt_(opt) {
    if (nx < 1 || ny < 1) throw ConfigError("generate_mesh: N must be positive");
    if (q < 1) throw ConfigError("generate_mesh: q must be >= 1");
    if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw ConfigError("generate_mesh: empty domain");
    m_.nx = nx;
    m_.ny = ny;
    m_.lo = lo;
    m_.hi = hi;
    m_.dx = (hi.x() - lo.x()) / nx;
    m_.dy = (hi.y() - lo.y()) / ny;
    m_.q = q;
    m_.boundary_name = b.name;
    snap_ = opt_.snap_rel * std::min(m_.dx, m_.dy);
  }

  CutCellMesh build() {
    std::vector<std::vector<Piece>> cell_pieces(static_cast<std::size_t>(m_.nx) * m_.ny);
    for (int c = 0; c < static_cast<int>(b_.curves.size()); ++c) {
      for (Piece& p : pieces_of_curve(c)) {
        const int cid = piece_cell(p);
        cell_pieces[cid].push_back(std::move(p));
      }
    }

    m_.index.assign(static_cast<std::size_t>(m_.nx) * m_.ny, -1);
    for (int j = 0; j < m_.ny; ++j) {
      for (int i = 0; i < m_.nx; ++i) {
        auto& pieces = cell_pieces[static_cast<std::size_t>(j) * m_.nx + i];
        if (pieces.empty()) {
          const Vec2 center(0.5 * (m_.xline(i) + m_.xline(i + 1)),
                            0.5 * (m_.yline(j) + m_.yline(j + 1)));
          if (classify_point(b_, center) == Side::fluid) add_whole_cell(i, j);
          continue;
        }
        if (pieces.size() > 1) {
          std::ostringstream os;
          os << "cell (" << i << "," << j << ") is cut by " << pieces.size()
             << " boundary arcs (split or tunneled cell)";
          if (pieces[0].curve != pieces[1].curve) throw TunnelError(os.str());
          throw SplitCellError(os.str());
        }
        add_cut_cell(i, j, pieces[0]);
      }
    }
    link_edges();
    finalize();
    return std::move(m_);
  }

 private:
  const Boundary& b_;
  MeshOptions opt_;
  CutCellMesh m_;
  double snap_ = 0.0;

  [[nodiscard]] double snap_x(double x) const {
    for (int i : {m_.locate_x(x), m_.locate_x(x) + 1}) {
      if (std::abs(x - m_.xline(i)) <= snap_) return m_.xline(i);
    }
    return x;
  }
  [[nodiscard]] double snap_y(double y) const {
    for (int j : {m_.locate_y(y), m_.locate_y(y) + 1}) {
      if (std::abs(y - m_.yline(j)) <= snap_) return m_.yline(j);
    }
    return y;
  }

  // Crossings of one segment with interior grid lines, in parameter order.
  std::vector<CurvePos> crossings(const BoundaryCurve& curve, int k) const {
    const CurveSegment& seg = curve.segments[k];
    constexpr int kCoarse = 256;
    double len = 0.0;
    Vec2 prev = seg(seg.s_lo);
    for (int i = 1; i <= kCoarse; ++i) {
      const Vec2 p = seg(seg.s_lo + (seg.s_hi - seg.s_lo) * i / kCoarse);
      len += (p - prev).norm();
      prev = p;
    }
    const int samples =
        std::max(kCoarse, static_cast<int>(std::ceil(len / (std::min(m_.dx, m_.dy) / 16.0))));
    std::vector<CurvePos> out;
    auto bisect = [&](double sa, double sb, auto&& side) {
      const bool side_a = side(seg(sa));
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (sa + sb);
        if (mid <= sa || mid >= sb) break;
        if (side(seg(mid)) == side_a) {
          sa = mid;
        } else {
          sb = mid;
        }
      }
      return 0.5 * (sa + sb);
    };
    // sample parameters plus the local extrema of x and y, so a near-tangent excursion across
    // a grid line narrower than the sample spacing still yields both crossings
    std::vector<double> ss(samples + 1);
    for (int n = 0; n <= samples; ++n) ss[n] = seg.s_lo + (seg.s_hi - seg.s_lo) * n / samples;
    std::vector<double> extra;
    std::vector<double> tt = ss;
    const double period = seg.s_hi - seg.s_lo;
    if (seg.periodic) tt.push_back(seg.s_hi + (ss[1] - seg.s_lo));  // look across the seam
    for (int axis = 0; axis < 2; ++axis) {
      auto f = [&](double s) { return seg(s)[axis]; };
      // sign changes of consecutive nonzero differences; equal neighbors (an extremum exactly
      // between two samples) are skipped rather than hiding the change
      std::size_t start = 0;  // first sample of the last nonzero difference
      double dlast = 0.0;
      for (std::size_t n = 1; n < tt.size(); ++n) {
        const double d = f(tt[n]) - f(tt[n - 1]);
        if (d == 0.0) continue;
        if (dlast * d < 0.0) {
          const double sign = dlast > 0.0 ? 1.0 : -1.0;  // maximum or minimum
          double a = tt[start];
          double b = tt[n];
          for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
            const double m1 = a + (b - a) / 3.0;
            const double m2 = b - (b - a) / 3.0;
            if (sign * f(m1) < sign * f(m2)) {
              a = m1;
            } else {
              b = m2;
            }
          }
          double e = 0.5 * (a + b);
          if (seg.periodic && e >= seg.s_hi) e -= period;
          if (e > seg.s_lo && e < seg.s_hi) extra.push_back(e);
        }
        start = n - 1;
        dlast = d;
      }
    }
    ss.insert(ss.end(), extra.begin(), extra.end());
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
    double sa = ss.front();
    Vec2 pa = seg(sa);
    for (std::size_t n = 1; n < ss.size(); ++n) {
      const double sb = ss[n];
      // a periodic segment closes on its start point; evaluating s_hi separately can round
      // to the other side of a grid line through the seam and lose that crossing
      const Vec2 pb = seg.periodic && n + 1 == ss.size() ? seg(seg.s_lo) : seg(sb);
      const int ia = m_.locate_x(pa.x());
      const int ib = m_.locate_x(pb.x());
      const int ja = m_.locate_y(pa.y());
      const int jb = m_.locate_y(pb.y());
      std::vector<CurvePos> local;
      for (int line = std::min(ia, ib) + 1; line <= std::max(ia, ib); ++line) {
        const double xl = m_.xline(line);
        const double s = bisect(sa, sb, [xl](const Vec2& p) { return p.x() >= xl; });
        local.push_back({k, s, Vec2(xl, snap_y(seg(s).y()))});
      }
      for (int line = std::min(ja, jb) + 1; line <= std::max(ja, jb); ++line) {
        const double yl = m_.yline(line);
        const double s = bisect(sa, sb, [yl](const Vec2& p) { return p.y() >= yl; });
        local.push_back({k, s, Vec2(snap_x(seg(s).x()), yl)});
      }
      std::sort(local.begin(), local.end(),
                [](const CurvePos& a, const CurvePos& b) { return a.s < b.s; });
      out.insert(out.end(), local.begin(), local.end());
      sa = sb;
      pa = pb;
    }
    return out;
  }

  [[nodiscard]] Vec2 snap_to_domain(Vec2 p) const {
    if (std::abs(p.x() - m_.lo.x()) <= snap_) p.x() = m_.lo.x();
    if (std::abs(p.x() - m_.hi.x()) <= snap_) p.x() = m_.hi.x();
    if (std::abs(p.y() - m_.lo.y()) <= snap_) p.y() = m_.lo.y();
    if (std::abs(p.y() - m_.hi.y()) <= snap_) p.y() = m_.hi.y();
    return Vec2(snap_x(p.x()), snap_y(p.y()));
  }

  [[nodiscard]] bool on_domain_boundary(const Vec2& p) const {
    return p.x() == m_.lo.x() || p.x() == m_.hi.x() || p.y() == m_.lo.y() || p.y() == m_.hi.y();
  }

  std::vector<Piece> pieces_of_curve(int c) {
    const BoundaryCurve& curve = b_.curves[c];
    if (curve.segments.empty()) return {};
    const int nseg = static_cast<int>(curve.segments.size());
    // validate containment
    for (const auto& seg : curve.segments) {
      for (int i = 0; i <= 64; ++i) {
        const Vec2 p = seg(seg.s_lo + (seg.s_hi - seg.s_lo) * i / 64.0);
        if (p.x() < m_.lo.x() - snap_ || p.x() > m_.hi.x() + snap_ || p.y() < m_.lo.y() - snap_ ||
            p.y() > m_.hi.y() + snap_)
          throw MeshError("boundary curve leaves the domain rectangle");
      }
    }

    std::vector<CurvePos> events;
    for (int k = 0; k < nseg; ++k) {
      auto ck = crossings(curve, k);
      events.insert(events.end(), ck.begin(), ck.end());
    }
    // merge events that snapped to the same location
    std::vector<CurvePos> merged;
    for (const auto& e : events) {
      if (!merged.empty() && (merged.back().pt - e.pt).norm() <= snap_) continue;
      merged.push_back(e);
    }
    if (curve.closed && merged.size() > 1 && (merged.back().pt - merged.front().pt).norm() <= snap_)
      merged.pop_back();

    std::vector<CurvePos> marks;
    if (!curve.closed) {
      const CurveSegment& first = curve.segments.front();
      const CurveSegment& last = curve.segments.back();
      const CurvePos start{0, first.s_lo, snap_to_domain(first(first.s_lo))};
      const CurvePos end{nseg - 1, last.s_hi, snap_to_domain(last(last.s_hi))};
      if (!on_domain_boundary(start.pt) || !on_domain_boundary(end.pt))
        throw MeshError("open boundary curve must start and end on the domain boundary");
      marks.push_back(start);
      for (const auto& e : merged) {
        if ((e.pt - start.pt).norm() <= snap_ || (e.pt - end.pt).norm() <= snap_) continue;
        marks.push_back(e);
      }
      marks.push_back(end);
    } else {
      if (merged.size() < 2)
        throw SplitCellError("closed boundary curve lies inside a single cell (unresolved)");
      marks = merged;
      marks.push_back(merged.front());  // wrap
    }

    std::vector<Piece> pieces;
    for (std::size_t n = 0; n + 1 < marks.size(); ++n) {
      const bool wraps = curve.closed && n + 2 == marks.size();
      Piece p{c, arcs_between(curve, marks[n], marks[n + 1], wraps)};
      if (p.arcs.empty()) continue;
      pieces.push_back(std::move(p));
    }
    return pieces;
  }

  // Sub-arcs from a to b along the curve, split at segment junctions.
  std::vector<SubArc> arcs_between(const BoundaryCurve& curve, const CurvePos& a,
                                   const CurvePos& b, bool wraps) const {
    const int nseg = static_cast<int>(curve.segments.size());
    std::vector<SubArc> arcs;
    if ((a.pt - b.pt).norm() <= snap_) return arcs;  // degenerate piece through a snapped node
    if (wraps && nseg == 1 && curve.segments[0].periodic) {
      const auto& seg = curve.segments[0];
      arcs.push_back({0, a.s, b.s + (seg.s_hi - seg.s_lo), a.pt, b.pt});
      return arcs;
    }
    int seg = a.seg;
    double s = a.s;
    Vec2 p = a.pt;
    bool past_seam = !wraps;
    for (int guard = 0; guard <= nseg + 1; ++guard) {
      if (past_seam && seg == b.seg) {
        if ((p - b.pt).norm() > snap_) {
          arcs.push_back({seg, s, b.s, p, b.pt});
        } else if (!arcs.empty()) {
          arcs.back().p1 = b.pt;
        }
        return arcs;
      }
      const auto& cs = curve.segments[seg];
      const Vec2 junction = snap_to_domain(cs(cs.s_hi));
      if (cs.s_hi > s && (junction - p).norm() > snap_) {
        arcs.push_back({seg, s, cs.s_hi, p, junction});
        p = junction;
      }
      seg = (seg + 1) % nseg;
      if (seg == 0) past_seam = true;
      s = curve.segments[seg].s_lo;
    }
    throw MeshError("failed to walk boundary curve between crossings");
  }

  // Candidate cells of a point lying on grid lines.
  std::set<int> candidate_cells(const Vec2& p) const {
    std::vector<int> is{m_.locate_x(p.x())};
    std::vector<int> js{m_.locate_y(p.y())};
    if (p.x() == m_.xline(is[0]) && is[0] > 0) is.push_back(is[0] - 1);
    if (p.y() == m_.yline(js[0]) && js[0] > 0) js.push_back(js[0] - 1);
    if (p.x() == m_.hi.x()) is = {m_.nx - 1};
    if (p.y() == m_.hi.y()) js = {m_.ny - 1};
    std::set<int> out;
    for (int i : is)
      for (int j : js) out.insert(j * m_.nx + i);
    return out;
  }

  int piece_cell(const Piece& p) const {
    const auto ca = candidate_cells(p.arcs.front().p0);
    const auto cb = candidate_cells(p.arcs.back().p1);
    std::vector<int> common;
    std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(common));
    const auto& a0 = p.arcs.front();
    const Vec2 mid = b_.curves[p.curve].segments[a0.seg](0.5 * (a0.s0 + a0.s1));
    const int mid_cell = m_.locate_y(mid.y()) * m_.nx + m_.locate_x(mid.x());
    if (common.size() == 1) return common[0];
    if (std::find(common.begin(), common.end(), mid_cell) != common.end() || common.empty())
      return mid_cell;
    return common[0];
  }

  void add_whole_cell(int i, int j) {
    Cell c;
    c.i = i;
    c.j = j;
    c.kind = CellKind::whole;
    const std::array<Vec2, 4> v{Vec2(m_.xline(i), m_.yline(j)), Vec2(m_.xline(i + 1), m_.yline(j)),
                                Vec2(m_.xline(i + 1), m_.yline(j + 1)),
                                Vec2(m_.xline(i), m_.yline(j + 1))};
    for (int s = 0; s < 4; ++s) {
      MeshEdge e;
      e.nodes = {v[s], v[(s + 1) % 4]};
      e.side = s;
      c.edges.push_back(std::move(e));
    }
    push_cell(std::move(c));
  }

  [[nodiscard]] double perimeter_coord(int i, int j, const Vec2& p) const {
    const double x0 = m_.xline(i);
    const double x1 = m_.xline(i + 1);
    const double y0 = m_.yline(j);
    const double y1 = m_.yline(j + 1);
    if (p.y() == y0 && p.x() >= x0 && p.x() <= x1) return (p.x() - x0) / (x1 - x0);
    if (p.x() == x1 && p.y() >= y0 && p.y() <= y1) return 1.0 + (p.y() - y0) / (y1 - y0);
    if (p.y() == y1 && p.x() >= x0 && p.x() <= x1) return 2.0 + (x1 - p.x()) / (x1 - x0);
    if (p.x() == x0 && p.y() >= y0 && p.y() <= y1) return 3.0 + (y1 - p.y()) / (y1 - y0);
    std::ostringstream os;
    os << "boundary arc endpoint (" << p.x() << "," << p.y() << ") is not on the boundary of cell ("
       << i << "," << j << ")";
    throw DegenerateCut(os.str());
  }

  [[nodiscard]] Vec2 perimeter_point(int i, int j, int corner) const {
    switch (((corner % 4) + 4) % 4) {
      case 0: return Vec2(m_.xline(i), m_.yline(j));
      case 1: return Vec2(m_.xline(i + 1), m_.yline(j));
      case 2: return Vec2(m_.xline(i + 1), m_.yline(j + 1));
      default: return Vec2(m_.xline(i), m_.yline(j + 1));
    }
  }

  void add_arcs(Cell& c, const Piece& piece) const {
    const auto& curve = b_.curves[piece.curve];
    for (const SubArc& a : piece.arcs) {
      const CurveSegment& seg = curve.segments[a.seg];
      CurvedEdge ce = edge_interpolation_points(seg, a.s0, a.s1, m_.q, a.p0, a.p1);
      MeshEdge e;
      e.nodes = std::move(ce.points);
      e.params = std::move(ce.params);
      e.kind = EdgeKind::embedded;
      e.tag = seg.tag;
      e.curve = piece.curve;
      e.segment = a.seg;
      c.edges.push_back(std::move(e));
    }
  }

  // Straight edges counterclockwise along the cell perimeter from t_out to t_in.
  void add_walk(Cell& c, double t_out, const Vec2& p_out, double t_in, const Vec2& p_in) const {
    if (t_in <= t_out) t_in += 4.0;
    std::vector<std::pair<double, Vec2>> walk{{t_out, p_out}};
    for (int corner = static_cast<int>(std::floor(t_out)) + 1; corner < t_in; ++corner)
      walk.emplace_back(static_cast<double>(corner), perimeter_point(c.i, c.j, corner));
    walk.emplace_back(t_in, p_in);
    for (std::size_t n = 0; n + 1 < walk.size(); ++n) {
      if (walk[n].second == walk[n + 1].second) continue;
      MeshEdge e;
      e.nodes = {walk[n].second, walk[n + 1].second};
      e.side = static_cast<int>(std::floor(0.5 * (walk[n].first + walk[n + 1].first))) % 4;
      c.edges.push_back(std::move(e));
    }
  }

  void add_cut_cell(int i, int j, const Piece& piece) {
    Cell c;
    c.i = i;
    c.j = j;
    c.kind = CellKind::cut;
    add_arcs(c, piece);
    if (c.embedded_edge_count() > 2) {
      std::ostringstream os;
      os << "cell (" << i << "," << j << ") has more than two irregular edges";
      throw DegenerateCut(os.str());
    }
    const Vec2 p_in = piece.arcs.front().p0;
    const Vec2 p_out = piece.arcs.back().p1;
    add_walk(c, perimeter_coord(i, j, p_out), p_out, perimeter_coord(i, j, p_in), p_in);
    push_cell(std::move(c));
  }

  void push_cell(Cell c) {
    for (const auto& e : c.edges) c.vertices.push_back(e.nodes.front());
    const int id = static_cast<int>(m_.cells.size());
    m_.index[static_cast<std::size_t>(c.j) * m_.nx + c.i] = id;
    m_.cells.push_back(std::move(c));
  }

  void link_edges() {
    static constexpr std::array<std::array<int, 2>, 4> offs{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
    for (int id = 0; id < static_cast<int>(m_.cells.size()); ++id) {
      Cell& c = m_.cells[id];
      for (auto& e : c.edges) {
        if (e.kind == EdgeKind::embedded) continue;
        const int ni = c.i + offs[e.side][0];
        const int nj = c.j + offs[e.side][1];
        if (ni < 0 || nj < 0 || ni >= m_.nx || nj >= m_.ny) {
          e.kind = EdgeKind::domain;
          e.tag = domain_side_tag(e.side);
          continue;
        }
        const int nid = m_.cell_id(ni, nj);
        std::ostringstream os;
        os << "edge of cell (" << c.i << "," << c.j << ") on side " << e.side
           << " has no matching fluid neighbor";
        if (nid < 0) throw DegenerateCut(os.str());
        const Cell& n = m_.cells[nid];
        int match = -1;
        for (int k = 0; k < static_cast<int>(n.edges.size()); ++k) {
          const auto& ne = n.edges[k];
          if (ne.kind != EdgeKind::embedded && ne.side == (e.side + 2) % 4 &&
              ne.nodes.front() == e.nodes.back() && ne.nodes.back() == e.nodes.front())
            match = k;
        }
        if (match < 0) throw DegenerateCut(os.str());
        e.kind = EdgeKind::interior;
        e.neighbor = nid;
        e.neighbor_edge = match;
      }
    }
  }

  void finalize() {
    m_.min_volume_fraction = 1.0;
    for (int id = 0; id < static_cast<int>(m_.cells.size()); ++id) {
      Cell& c = m_.cells[id];
      Vec2 mn = c.edges.front().nodes.front();
      Vec2 mx = mn;
      for (const auto& e : c.edges) {
        for (const auto& v : e.nodes) {
          mn = mn.cwiseMin(v);
          mx = mx.cwiseMax(v);
        }
      }
      c.bbox_min = mn;
      c.bbox_size = mx - mn;
      if (c.kind == CellKind::whole) {
        c.volume = m_.dx * m_.dy;
        c.centroid = mn + 0.5 * c.bbox_size;
      } else {
        const auto loop = c.loop();
        VolumeRule r;
        try {
          r = polygon_rule(loop, 1);
        } catch (const TriangulationError& e) {
          std::ostringstream os;
          os << e.what() << " (cell " << c.i << "," << c.j << ":";
          for (const auto& edge : loop)
            for (const auto& v : edge) os << " (" << v.x() << "," << v.y() << ")";
          os << ")";
          throw TriangulationError(os.str());
        }
        c.volume = r.measure();
        Vec2 cen = Vec2::Zero();
        for (std::size_t k = 0; k < r.size(); ++k) cen += r.weights[k] * r.points[k];
        c.centroid = cen / c.volume;
        if (!(c.volume > 0.0) || c.volume > m_.dx * m_.dy * (1.0 + 1e-12)) {
          std::ostringstream os;
          os << "cut cell (" << c.i << "," << c.j << ") has invalid volume " << c.volume;
          throw DegenerateCut(os.str());
        }
        m_.cut_cells.push_back(id);
      }
      m_.min_volume_fraction = std::min(m_.min_volume_fraction, c.volume / (m_.dx * m_.dy));
    }
  }
};

}  // namespace detail

/// Superimpose the boundary on an nx-by-ny background grid over [lo, hi], delete the solid
/// part, and build whole and cut cells with degree-q curved boundary edges.
[[nodiscard]] inline CutCellMesh generate_mesh(const Boundary& b, const Vec2& lo, const Vec2& hi,
                                               int nx, int ny, int q, MeshOptions opt = {}) {
  return detail::MeshBuilder(b, lo, hi, nx, ny, q, opt).build();
}

struct MeshReport {
  int cells = 0;
  int whole = 0;
  int cut = 0;
  double min_fraction = 1.0;
  double max_fraction = 0.0;
  double fluid_area = 0.0;
  // decades: [1e-1,1], [1e-2,1e-1), ..., last bin collects everything smaller
  std::vector<int> histogram;
};

/// Cell counts and the distribution of cut-cell volume fractions |K| / (dx dy).
[[nodiscard]] inline MeshReport mesh_report(const CutCellMesh& m, int decades = 12) {
  MeshReport r;
  r.cells = static_cast<int>(m.cells.size());
  r.histogram.assign(decades, 0);
  for (const auto& c : m.cells) {
    const double f = c.volume / m.cell_area();
    r.min_fraction = std::min(r.min_fraction, f);
    r.max_fraction = std::max(r.max_fraction, f);
    r.fluid_area += c.volume;
    if (c.kind == CellKind::whole) {
      ++r.whole;
      continue;
    }
    ++r.cut;
    const int bin = f >= 1.0 ? 0 : std::min(decades - 1, static_cast<int>(std::floor(-std::log10(f))));
    ++r.histogram[bin];
  }
  return r;
}

}  // namespace srdg
