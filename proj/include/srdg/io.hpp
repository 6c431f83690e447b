#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "srdg/core.hpp"
#include "srdg/discretization.hpp"
#include "srdg/mesh.hpp"
#include "srdg/srd.hpp"

// Mesh JSON, legacy VTK and CSV writers.
namespace srdg::io {

inline constexpr int kMeshFormatVersion = 1;

[[nodiscard]] inline const char* kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::interior: return "interior";
    case EdgeKind::domain: return "domain";
    default: return "embedded";
  }
}

[[nodiscard]] inline nlohmann::json mesh_json(const CutCellMesh& m) {
  nlohmann::json j;
  j["format"] = "srdg-mesh";
  j["version"] = kMeshFormatVersion;
  j["boundary"] = m.boundary_name;
  j["nx"] = m.nx;
  j["ny"] = m.ny;
  j["lo"] = {m.lo.x(), m.lo.y()};
  j["hi"] = {m.hi.x(), m.hi.y()};
  j["q"] = m.q;
  j["min_volume_fraction"] = m.min_volume_fraction;
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const Cell& c : m.cells) {
    nlohmann::json jc;
    jc["i"] = c.i;
    jc["j"] = c.j;
    jc["kind"] = c.kind == CellKind::whole ? "whole" : "cut";
    jc["volume"] = c.volume;
    jc["centroid"] = {c.centroid.x(), c.centroid.y()};
    if (c.kind == CellKind::cut) {
      auto& edges = jc["edges"] = nlohmann::json::array();
      for (const MeshEdge& e : c.edges) {
        nlohmann::json je;
        je["kind"] = kind_name(e.kind);
        if (!e.tag.empty()) je["tag"] = e.tag;
        if (e.neighbor >= 0) je["neighbor"] = e.neighbor;
        auto& nodes = je["nodes"] = nlohmann::json::array();
        for (const Vec2& v : e.nodes) nodes.push_back({v.x(), v.y()});
        edges.push_back(std::move(je));
      }
    }
    cells.push_back(std::move(jc));
  }
  return j;
}

/// 64-bit FNV-1a of the mesh JSON text, printed as hex; identifies the mesh in run manifests.
[[nodiscard]] inline std::string mesh_hash(const CutCellMesh& m) {
  const std::string s = mesh_json(m).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text(path, j.dump(1) + "\n");
}

/// Named per-cell scalar for VTK output.
struct CellField {
  std::string name;
  std::vector<double> values;
};

/// Legacy ASCII unstructured grid of cell polygons; curved edges contribute all their nodes.
[[nodiscard]] inline std::string vtk_cells(const CutCellMesh& m, const std::vector<CellField>& fields,
                                           const std::string& title = "srdg") {
  std::ostringstream os;
  os << std::setprecision(17);
  std::vector<std::vector<Vec2>> polys;
  std::size_t npts = 0;
  for (const Cell& c : m.cells) {
    std::vector<Vec2> poly;
    for (const MeshEdge& e : c.edges) poly.insert(poly.end(), e.nodes.begin(), e.nodes.end() - 1);
    npts += poly.size();
    polys.push_back(std::move(poly));
  }
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << npts << " double\n";
  for (const auto& poly : polys)
    for (const Vec2& v : poly) os << v.x() << ' ' << v.y() << " 0\n";
  os << "CELLS " << polys.size() << ' ' << npts + polys.size() << '\n';
  std::size_t base = 0;
  for (const auto& poly : polys) {
    os << poly.size();
    for (std::size_t k = 0; k < poly.size(); ++k) os << ' ' << base + k;
    os << '\n';
    base += poly.size();
  }
  os << "CELL_TYPES " << polys.size() << '\n';
  for (std::size_t k = 0; k < polys.size(); ++k) os << "7\n";
  if (!fields.empty()) {
    os << "CELL_DATA " << polys.size() << '\n';
    for (const CellField& f : fields) {
      if (f.values.size() != polys.size()) throw ConfigError("vtk field '" + f.name + "' has the wrong size");
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) os << v << '\n';
    }
  }
  return os.str();
}

/// Volume fraction, cut flag and overlap count per cell.
[[nodiscard]] inline std::vector<CellField> mesh_fields(const CutCellMesh& m, const MergePlan* plan = nullptr) {
  CellField frac{"volume_fraction", {}};
  CellField cut{"cut", {}};
  for (const Cell& c : m.cells) {
    frac.values.push_back(c.volume / (m.dx * m.dy));
    cut.values.push_back(c.kind == CellKind::cut ? 1.0 : 0.0);
  }
  std::vector<CellField> out{frac, cut};
  if (plan) out.push_back({"overlap", std::vector<double>(plan->overlap.begin(), plan->overlap.end())});
  return out;
}

/// Cell averages of each column of c.
[[nodiscard]] inline std::vector<CellField> average_fields(const Discretization& d, const Matrix& c,
                                                           const std::vector<std::string>& names) {
  std::vector<CellField> out;
  for (Eigen::Index v = 0; v < c.cols(); ++v) {
    CellField f{v < static_cast<Eigen::Index>(names.size()) ? names[v] : "u" + std::to_string(v), {}};
    for (int id = 0; id < d.ncells(); ++id) f.values.push_back(c(static_cast<Eigen::Index>(id) * d.np(), v));
    out.push_back(std::move(f));
  }
  return out;
}

/// Legacy ASCII point cloud of the solution at every volume quadrature point.
[[nodiscard]] inline std::string vtk_quadrature_points(const Discretization& d, const Matrix& c,
                                                       const std::vector<std::string>& names) {
  std::vector<Vec2> pts;
  Matrix vals(0, c.cols());
  std::vector<Matrix> blocks;
  for (int id = 0; id < d.ncells(); ++id) {
    pts.insert(pts.end(), d.rules[id].points.begin(), d.rules[id].points.end());
    blocks.push_back(d.values(c, id));
  }
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# vtk DataFile Version 3.0\nsrdg quadrature points\nASCII\nDATASET POLYDATA\n";
  os << "POINTS " << pts.size() << " double\n";
  for (const Vec2& p : pts) os << p.x() << ' ' << p.y() << " 0\n";
  os << "VERTICES " << pts.size() << ' ' << 2 * pts.size() << '\n';
  for (std::size_t k = 0; k < pts.size(); ++k) os << "1 " << k << '\n';
  os << "POINT_DATA " << pts.size() << '\n';
  for (Eigen::Index v = 0; v < c.cols(); ++v) {
    os << "SCALARS " << (v < static_cast<Eigen::Index>(names.size()) ? names[v] : "u" + std::to_string(v))
       << " double 1\nLOOKUP_TABLE default\n";
    for (const Matrix& b : blocks)
      for (Eigen::Index q = 0; q < b.rows(); ++q) os << b(q, v) << '\n';
  }
  return os.str();
}

/// Minimal CSV table: header plus rows of numbers at full precision.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

  void row(const std::vector<double>& r) {
    if (r.size() != header_.size()) throw ConfigError("csv row has the wrong width");
    rows_.push_back(r);
  }

  [[nodiscard]] std::string str() const {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t k = 0; k < header_.size(); ++k) os << (k ? "," : "") << header_[k];
    os << '\n';
    for (const auto& r : rows_) {
      for (std::size_t k = 0; k < r.size(); ++k) os << (k ? "," : "") << r[k];
      os << '\n';
    }
    return os.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace srdg::io
