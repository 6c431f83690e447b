#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "srdg/discretization.hpp"
#include "srdg/laws.hpp"
#include "srdg/srd.hpp"

namespace srdg {

enum class BCKind { exact, prescribed, extrapolate, reflect, zero_flux };

[[nodiscard]] inline const char* bc_kind_name(BCKind k) {
  switch (k) {
    case BCKind::exact: return "exact";
    case BCKind::prescribed: return "prescribed";
    case BCKind::extrapolate: return "extrapolate";
    case BCKind::reflect: return "reflect";
    case BCKind::zero_flux: return "zero_flux";
  }
  return "?";
}

template <class Law>
struct BoundaryCondition {
  using State = typename Law::State;
  BCKind kind = BCKind::zero_flux;
  std::function<State(const Vec2&, double)> state;  // ghost state for exact / prescribed
};

/// Boundary conditions by edge tag; "*" is the fallback for unlisted tags.
template <class Law>
using BCMap = std::map<std::string, BoundaryCondition<Law>>;

namespace detail {

// u = phi.row(q) * cb without temporaries.
template <class State, class Block>
inline void eval_point(const Matrix& phi, Eigen::Index q, const Block& cb, State& u) {
  for (Eigen::Index v = 0; v < u.size(); ++v) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < phi.cols(); ++k) s += phi(q, k) * cb(k, v);
    u[v] = s;
  }
}

}  // namespace detail

/// Modal DG right-hand side dc/dt = -(1/|K|) [ surface(phi F*.n) - volume(F . grad phi) ].
template <class Law>
class DGOperator {
 public:
  using State = typename Law::State;
  static constexpr int M = Law::M;

  DGOperator(const Discretization& d, Law law, BCMap<Law> bcs)
      : d_(d), law_(std::move(law)), bcs_(std::move(bcs)) {
    for (const auto& f : d_.bfaces) {
      auto it = bcs_.find(f.tag);
      if (it == bcs_.end()) it = bcs_.find("*");
      if (it == bcs_.end()) throw ConfigError("no boundary condition for tag '" + f.tag + "'");
      bc_of_face_.push_back(&it->second);
    }
  }

  [[nodiscard]] const Discretization& disc() const { return d_; }
  [[nodiscard]] const Law& law() const { return law_; }
  [[nodiscard]] Law& law() { return law_; }

  void rhs(const Matrix& c, double t, Matrix& r) const {
    const int np = d_.np();
    r.setZero(c.rows(), c.cols());
    const int nc = d_.ncells();
    // volume terms touch only their own cell; face terms below stay serial
#pragma omp parallel for schedule(static)
    for (int id = 0; id < nc; ++id) {
      State u;
      State fx;
      State fy;
      const CellBasis& b = d_.bases[id];
      const VolumeRule& rule = d_.rules[id];
      const auto cb = c.middleRows(static_cast<Eigen::Index>(id) * np, np);
      auto rb = r.middleRows(static_cast<Eigen::Index>(id) * np, np);
      const double inv = 1.0 / d_.volume(id);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto qi = static_cast<Eigen::Index>(q);
        detail::eval_point(b.phi, qi, cb, u);
        law_.flux(u, rule.points[q], fx, fy);
        const double w = rule.weights[q] * inv;
        for (int k = 0; k < np; ++k)
          rb.row(k) += (w * b.dphidx(qi, k)) * fx.transpose() + (w * b.dphidy(qi, k)) * fy.transpose();
      }
    }
    State ul;
    State ur;
    for (const InteriorFace& f : d_.faces) {
      const auto ca = c.middleRows(static_cast<Eigen::Index>(f.a) * np, np);
      const auto cbn = c.middleRows(static_cast<Eigen::Index>(f.b) * np, np);
      auto ra = r.middleRows(static_cast<Eigen::Index>(f.a) * np, np);
      auto rb = r.middleRows(static_cast<Eigen::Index>(f.b) * np, np);
      const double ia = 1.0 / d_.volume(f.a);
      const double ib = 1.0 / d_.volume(f.b);
      for (std::size_t q = 0; q < f.rule.size(); ++q) {
        const auto qi = static_cast<Eigen::Index>(q);
        detail::eval_point(f.phi_a, qi, ca, ul);
        detail::eval_point(f.phi_b, qi, cbn, ur);
        const State fn = law_.num_flux(ul, ur, f.rule.points[q], f.rule.normals[q]);
        const double w = f.rule.weights[q];
        for (int k = 0; k < np; ++k) {
          ra.row(k) -= (w * ia * f.phi_a(qi, k)) * fn.transpose();
          rb.row(k) += (w * ib * f.phi_b(qi, k)) * fn.transpose();
        }
      }
    }
    for (std::size_t fi = 0; fi < d_.bfaces.size(); ++fi) {
      const BoundaryFace& f = d_.bfaces[fi];
      const BoundaryCondition<Law>& bc = *bc_of_face_[fi];
      const auto ca = c.middleRows(static_cast<Eigen::Index>(f.cell) * np, np);
      auto ra = r.middleRows(static_cast<Eigen::Index>(f.cell) * np, np);
      const double ia = 1.0 / d_.volume(f.cell);
      for (std::size_t q = 0; q < f.rule.size(); ++q) {
        const auto qi = static_cast<Eigen::Index>(q);
        detail::eval_point(f.phi, qi, ca, ul);
        const Vec2& x = f.rule.points[q];
        const Vec2& n = f.rule.normals[q];
        State fn;
        switch (bc.kind) {
          case BCKind::exact:
          case BCKind::prescribed: fn = law_.num_flux(ul, bc.state(x, t), x, n); break;
          case BCKind::extrapolate: fn = law_.num_flux(ul, ul, x, n); break;
          case BCKind::reflect: fn = law_.wall_flux(ul, n); break;
          case BCKind::zero_flux: fn.setZero(); break;
        }
        const double w = f.rule.weights[q] * ia;
        for (int k = 0; k < np; ++k) ra.row(k) -= (w * f.phi(qi, k)) * fn.transpose();
      }
    }
  }

  /// Max |a|, |b| over cell averages evaluated at the cell centroids.
  [[nodiscard]] Vec2 wavespeeds(const Matrix& c) const {
    Vec2 s = Vec2::Zero();
    const int np = d_.np();
    for (int id = 0; id < d_.ncells(); ++id) {
      const State u = c.row(static_cast<Eigen::Index>(id) * np).transpose();
      s = s.cwiseMax(law_.wavespeeds(u, d_.mesh->cells[id].centroid));
    }
    return s;
  }

 private:
  const Discretization& d_;
  Law law_;
  BCMap<Law> bcs_;
  std::vector<const BoundaryCondition<Law>*> bc_of_face_;
};

/// dt = cfl / ((2p+1)(|a|/dx + |b|/dy)) on the background grid spacing.
[[nodiscard]] inline double stable_dt(double dx, double dy, const Vec2& speeds, int p, double cfl = 0.9) {
  const double s = speeds.x() / dx + speeds.y() / dy;
  if (!(s > 0.0)) throw ConfigError("stable_dt: zero wave speed");
  return cfl / ((2.0 * p + 1.0) * s);
}

enum class RKKind { ssp2, ssp3, rk4, lsrk54 };

struct RKScheme {
  RKKind kind = RKKind::ssp2;
  std::string name;
  int stages = 2;
  int order = 2;
  bool ssp = true;
};

/// p=1 SSP-RK2, p=2 SSP-RK3, p=3 classical RK4, p>=4 five-stage fourth-order low-storage RK.
[[nodiscard]] inline RKScheme scheme_for_degree(int p) {
  if (p <= 1) return {RKKind::ssp2, "ssp-rk2", 2, 2, true};
  if (p == 2) return {RKKind::ssp3, "ssp-rk3", 3, 3, true};
  if (p == 3) return {RKKind::rk4, "rk4", 4, 4, false};
  return {RKKind::lsrk54, "lsrk54", 5, 4, false};
}

/// Post-stage processing: SRD, limiters, positivity.
using StageHook = std::function<void(Matrix&)>;

namespace detail {

inline void check_finite(const Matrix& c, double t) {
  if (!c.allFinite()) {
    std::ostringstream os;
    os << "non-finite coefficients at t = " << t;
    throw SolverBlowup(os.str());
  }
}

}  // namespace detail

/// One time step; the hook runs on every intermediate and final stage solution.
template <class Op>
void rk_step(const Op& op, Matrix& c, double t, double dt, const RKScheme& s, const StageHook& post) {
  auto finish = [&](Matrix& u, double tt) {
    if (post) post(u);
    detail::check_finite(u, tt);
  };
  Matrix k;
  switch (s.kind) {
    case RKKind::ssp2: {
      op.rhs(c, t, k);
      Matrix u1 = c + dt * k;
      finish(u1, t + dt);
      op.rhs(u1, t + dt, k);
      c = 0.5 * c + 0.5 * (u1 + dt * k);
      finish(c, t + dt);
      break;
    }
    case RKKind::ssp3: {
      op.rhs(c, t, k);
      Matrix u1 = c + dt * k;
      finish(u1, t + dt);
      op.rhs(u1, t + dt, k);
      Matrix u2 = 0.75 * c + 0.25 * (u1 + dt * k);
      finish(u2, t + 0.5 * dt);
      op.rhs(u2, t + 0.5 * dt, k);
      c = c / 3.0 + 2.0 / 3.0 * (u2 + dt * k);
      finish(c, t + dt);
      break;
    }
    case RKKind::rk4: {
      Matrix k1;
      Matrix k2;
      Matrix k3;
      Matrix k4;
      op.rhs(c, t, k1);
      Matrix u = c + 0.5 * dt * k1;
      finish(u, t + 0.5 * dt);
      op.rhs(u, t + 0.5 * dt, k2);
      u = c + 0.5 * dt * k2;
      finish(u, t + 0.5 * dt);
      op.rhs(u, t + 0.5 * dt, k3);
      u = c + dt * k3;
      finish(u, t + dt);
      op.rhs(u, t + dt, k4);
      c += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      finish(c, t + dt);
      break;
    }
    case RKKind::lsrk54: {
      // Carpenter-Kennedy 2N-storage coefficients
      static constexpr double A[5] = {0.0, -567301805773.0 / 1357537059087.0,
                                      -2404267990393.0 / 2016746695238.0,
                                      -3550918686646.0 / 2091501179385.0,
                                      -1275806237668.0 / 842570457699.0};
      static constexpr double B[5] = {1432997174477.0 / 9575080441755.0,
                                      5161836677717.0 / 13612068292357.0,
                                      1720146321549.0 / 2090206949498.0,
                                      3134564353537.0 / 4481467310338.0,
                                      2277821191437.0 / 14882151754819.0};
      static constexpr double C[5] = {0.0, 1432997174477.0 / 9575080441755.0,
                                      2526269341429.0 / 6820363962896.0,
                                      2006345519317.0 / 3224310063776.0,
                                      2802321613138.0 / 2924317926251.0};
      Matrix du = Matrix::Zero(c.rows(), c.cols());
      for (int st = 0; st < 5; ++st) {
        op.rhs(c, t + C[st] * dt, k);
        du = A[st] * du + dt * k;
        c += B[st] * du;
        finish(c, t + (st < 4 ? C[st + 1] : 1.0) * dt);
      }
      break;
    }
  }
}

struct RunOptions {
  double t_final = 0.0;
  bool steady = false;
  double steady_tol = 1e-13;
  double cfl = 0.9;
  long max_steps = 10000000;
  bool fixed_speeds = false;  // compute wave speeds once (linear problems)
  bool step_budget = false;   // max_steps ends the run quietly instead of throwing
  std::function<void(long step, double t, const Matrix& c)> on_step;
};

struct RunResult {
  double t = 0.0;
  long steps = 0;
  double last_change = 0.0;
  bool converged = false;
  std::vector<double> change_history;
};

/// Advance to t_final (last step truncated to land on it) or, for steady runs, until the
/// largest coefficient change of a step falls below steady_tol.
template <class Op>
RunResult run(const Op& op, Matrix& c, int p, const RunOptions& opt, const StageHook& post,
              double t0 = 0.0) {
  RunResult res;
  res.t = t0;
  const RKScheme scheme = scheme_for_degree(p);
  const CutCellMesh& m = *op.disc().mesh;
  Vec2 speeds = op.wavespeeds(c);
  while (true) {
    if (!opt.steady && res.t >= opt.t_final) break;
    if (res.steps >= opt.max_steps) {
      if (!opt.step_budget && (opt.steady || res.t < opt.t_final))
        throw MaxStepsExceeded("run: reached " + std::to_string(opt.max_steps) + " steps at t = " +
                               std::to_string(res.t));
      break;
    }
    if (!opt.fixed_speeds) speeds = op.wavespeeds(c);
    double dt = stable_dt(m.dx, m.dy, speeds, p, opt.cfl);
    bool last = false;
    if (!opt.steady && res.t + dt >= opt.t_final) {
      dt = opt.t_final - res.t;
      last = true;
    }
    Matrix prev;
    if (opt.steady) prev = c;
    rk_step(op, c, res.t, dt, scheme, post);
    res.t = last ? opt.t_final : res.t + dt;
    ++res.steps;
    if (opt.on_step) opt.on_step(res.steps, res.t, c);
    if (opt.steady) {
      res.last_change = (c - prev).cwiseAbs().maxCoeff();
      res.change_history.push_back(res.last_change);
      if (res.last_change < opt.steady_tol) {
        res.converged = true;
        break;
      }
    }
  }
  return res;
}

/// Total sum |K| c_0 per conserved variable.
[[nodiscard]] inline Eigen::VectorXd mass_audit(const Discretization& d, const Matrix& c) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(c.cols());
  for (int id = 0; id < d.ncells(); ++id)
    s += d.volume(id) * c.row(static_cast<Eigen::Index>(id) * d.np()).transpose();
  return s;
}

/// Versioned JSON checkpoint of a solution field.
[[nodiscard]] inline nlohmann::json checkpoint_json(const Matrix& c, int p, double t) {
  nlohmann::json j;
  j["format"] = "srdg-solution";
  j["version"] = 1;
  j["p"] = p;
  j["t"] = t;
  j["rows"] = c.rows();
  j["cols"] = c.cols();
  std::vector<double> v(c.data(), c.data() + c.size());
  j["data"] = v;
  return j;
}

[[nodiscard]] inline Matrix checkpoint_read(const nlohmann::json& j, int& p, double& t) {
  if (j.value("format", "") != "srdg-solution" || j.value("version", 0) != 1)
    throw ConfigError("checkpoint: unsupported format or version");
  p = j.at("p");
  t = j.at("t");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto v = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(v.size()) != rows * cols) throw ConfigError("checkpoint: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace srdg
