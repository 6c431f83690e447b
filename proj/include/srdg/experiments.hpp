#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "srdg/boundaries.hpp"
#include "srdg/diagnostics.hpp"
#include "srdg/discretization.hpp"
#include "srdg/limiters.hpp"
#include "srdg/mesh.hpp"
#include "srdg/problems.hpp"
#include "srdg/solver.hpp"
#include "srdg/srd.hpp"

// Problem drivers shared by the command-line tool and the acceptance checks.
namespace srdg {

/// Boundary interpolation degree paired with p: quadratic boundaries for p = 1.
[[nodiscard]] inline int default_q(int p) { return p == 1 ? 2 : p; }

/// Background grid of N cells across the longer side, square cells where the box allows.
[[nodiscard]] inline std::pair<int, int> grid_dims(const Vec2& lo, const Vec2& hi, int n) {
  const Vec2 s = hi - lo;
  if (s.x() >= s.y()) return {n, std::max(1, static_cast<int>(std::lround(n * s.y() / s.x())))};
  return {std::max(1, static_cast<int>(std::lround(n * s.x() / s.y()))), n};
}

/// Mesh, discretization and merge plan for one problem instance.
struct Setup {
  CutCellMesh mesh;
  Discretization disc;
  MergePlan plan;
};

[[nodiscard]] inline std::unique_ptr<Setup> make_setup(const Boundary& b, const Vec2& lo, const Vec2& hi, int nx,
                                                       int ny, int p, int q) {
  auto s = std::make_unique<Setup>();
  s->mesh = generate_mesh(b, lo, hi, nx, ny, q);
  s->disc = build_discretization(s->mesh, p);
  s->plan = build_merge_plan(s->disc);
  return s;
}

struct AdvectionOutcome {
  int n = 0;
  int p = 0;
  int q = 0;
  double t = 0.0;
  long steps = 0;
  double min_fraction = 1.0;
  NormPair err;
  FvErrors fv;
  double mass0 = 0.0;
  double mass1 = 0.0;
  double l2_0 = 0.0;
  double l2_max = 0.0;
};

struct AdvectionOptions {
  double t_final = -1.0;  // < 0: problem default
  long max_steps = 10000000;
  bool step_budget = false;
  double cfl = 0.9;
  bool srd = true;
  std::function<void(const Setup&, long step, double t, const Matrix&)> on_step;  // step 0 is the initial state
  std::function<void(const Setup&, const Matrix&, double)> on_finish;
};

/// Run an advection problem on an n-by-n (or aspect-matched) grid and report errors.
[[nodiscard]] inline AdvectionOutcome run_advection(const AdvectionProblem& pr, int n, int p, int q,
                                                    const AdvectionOptions& o = {}) {
  const auto [nx, ny] = grid_dims(pr.lo, pr.hi, n);
  const auto s = make_setup(pr.boundary, pr.lo, pr.hi, nx, ny, p, q);
  const Discretization& d = s->disc;
  const DGOperator<Advection> op(d, pr.law, pr.bcs);
  Matrix c = d.project([&](const Vec2& x) { return Eigen::VectorXd::Constant(1, pr.exact(x, 0.0)); }, 1);
  AdvectionOutcome out;
  out.n = n;
  out.p = p;
  out.q = q;
  out.min_fraction = s->mesh.min_volume_fraction;
  out.mass0 = mass_audit(d, c)[0];
  out.l2_0 = l2_norm(d, c);
  out.l2_max = out.l2_0;
  RunOptions opt;
  opt.t_final = o.t_final < 0.0 ? pr.t_final : o.t_final;
  opt.fixed_speeds = true;
  opt.cfl = o.cfl;
  opt.max_steps = o.max_steps;
  opt.step_budget = o.step_budget;
  if (o.on_step) o.on_step(*s, 0, 0.0, c);
  opt.on_step = [&](long step, double t, const Matrix& u) {
    out.l2_max = std::max(out.l2_max, l2_norm(d, u));
    if (o.on_step) o.on_step(*s, step, t, u);
  };
  StageHook hook;
  if (o.srd) hook = [&](Matrix& u) { u = s->plan.apply(u); };
  const RunResult res = run(op, c, p, opt, hook);
  out.t = res.t;
  out.steps = res.steps;
  out.mass1 = mass_audit(d, c)[0];
  auto exact = [&](const Vec2& x) { return pr.exact(x, res.t); };
  out.err = l1_linf(d, c, exact);
  out.fv = fv_style_errors(d, c, exact);
  if (o.on_finish) o.on_finish(*s, c, res.t);
  return out;
}

/// Solid body rotation on an annulus whose outer circle rises 1e-6 above a horizontal grid line,
/// with a vertical grid line 5e-4 left of the tangent point. The excursion is split between two
/// cells, each cut by a single arc, and the narrower one keeps a volume fraction near 1e-7.
[[nodiscard]] inline AdvectionProblem sliver_rotation(int n = 25) {
  AdvectionProblem pr = solid_body_rotation();
  pr.name = "sliver-rotation";
  const Vec2 top(1.5, 2.75);
  const int k = static_cast<int>(std::ceil(top.y() / (3.0001 / n)));  // keeps the inner circle clear of the lines
  const double h = (top.y() - 1e-6) / k;
  const int i = static_cast<int>(std::ceil((top.x() - 0.25) / h));
  pr.lo = Vec2(top.x() - 5e-4 - i * h, 0.0);
  pr.hi = pr.lo + Vec2(h * n, h * n);
  return pr;
}

[[nodiscard]] inline bool is_advection_problem(const std::string& name) {
  return name == "rotation" || name == "sliver-rotation" || name.rfind("advection-", 0) == 0;
}

[[nodiscard]] inline AdvectionProblem advection_problem(const std::string& name) {
  if (name == "rotation") return solid_body_rotation();
  if (name == "sliver-rotation") return sliver_rotation();
  if (name.rfind("advection-", 0) == 0) return manufactured_advection(Vec2(1.0, 0.5), name.substr(10));
  throw ConfigError("unknown advection problem '" + name + "'");
}

[[nodiscard]] inline EulerProblem euler_problem(const std::string& name) {
  if (name == "ringleb") return ringleb_problem();
  if (name == "pulse") return pressure_pulse();
  if (name == "dmr") return double_mach();
  throw ConfigError("unknown problem '" + name +
                    "' (expected rotation, sliver-rotation, advection-{gaussian,sin,constant}, ringleb, pulse, dmr)");
}

/// Geometry and domain of a named problem, or of the plain geometries annulus, five-discs,
/// wedge and all-fluid (unit square).
[[nodiscard]] inline std::tuple<Boundary, Vec2, Vec2> problem_geometry(const std::string& name) {
  if (name == "annulus") return {annulus(), Vec2(0, 0), Vec2(3.0001, 3.0001)};
  if (name == "five-discs") return {five_discs(), Vec2(0, 0), Vec2(20, 20)};
  if (name == "wedge") {
    const Vec2 lo(0, 0);
    const Vec2 hi(2.5, 1.75);
    return {wedge(1.0 / 6.0, kPi / 6.0, lo, hi), lo, hi};
  }
  if (name == "all-fluid") return {Boundary{}, Vec2(0, 0), Vec2(1, 1)};
  if (is_advection_problem(name)) {
    AdvectionProblem pr = advection_problem(name);
    return {pr.boundary, pr.lo, pr.hi};
  }
  EulerProblem pr = euler_problem(name);
  return {pr.boundary, pr.lo, pr.hi};
}

/// Euler problem instance with its operator and post-stage processing.
class EulerRun {
 public:
  EulerRun(EulerProblem pr, int nx, int ny, int p, int q)
      : pr_(std::move(pr)), p_(p), s_(make_setup(pr_.boundary, pr_.lo, pr_.hi, nx, ny, p, q)),
        op_(s_->disc, pr_.law, pr_.bcs) {
    if (pr_.limit) limiter_.emplace(s_->disc, pr_.law, pr_.bj_direction);
  }

  [[nodiscard]] const EulerProblem& problem() const { return pr_; }
  [[nodiscard]] const Setup& setup() const { return *s_; }
  [[nodiscard]] const Discretization& disc() const { return s_->disc; }
  [[nodiscard]] const DGOperator<Euler>& op() const { return op_; }
  [[nodiscard]] int p() const { return p_; }

  [[nodiscard]] Matrix initial() const {
    Matrix c = s_->disc.project([&](const Vec2& x) { return Eigen::VectorXd(pr_.initial(x)); }, 4);
    if (pr_.limit) post(c);
    return c;
  }

  /// SRD (with neighborhood positivity when limiting), slope limiter, base-grid positivity.
  void post(Matrix& c) const {
    if (pr_.limit) {
      c = s_->plan.apply(c, neighborhood_positivity(pr_.law));
      limiter_->apply(c);
      positivity_limit(s_->disc, pr_.law, c);
    } else {
      c = s_->plan.apply(c);
    }
  }

  RunResult advance(Matrix& c, RunOptions opt) const {
    if (opt.t_final <= 0.0 && !opt.steady) opt.t_final = pr_.t_final;
    opt.steady = opt.steady || pr_.steady;
    return run(op_, c, p_, opt, [this](Matrix& u) { post(u); });
  }

 private:
  EulerProblem pr_;
  int p_;
  std::unique_ptr<Setup> s_;
  DGOperator<Euler> op_;
  std::optional<SlopeLimiter> limiter_;
};

/// Points where the solution is checked for positivity: all volume and edge quadrature points.
[[nodiscard]] inline bool all_admissible(const Discretization& d, const Euler& law, const Matrix& c,
                                         double* rho_min = nullptr, double* p_min = nullptr) {
  double rmin = 1e300;
  double pmin = 1e300;
  bool ok = c.allFinite();
  for (int id = 0; id < d.ncells(); ++id) {
    const auto cb = c.middleRows(static_cast<Eigen::Index>(id) * d.np(), d.np());
    const Matrix v = d.bases[id].phi * cb;
    const Matrix w = d.surf_phi[id] * cb;
    for (const Matrix* m : {&v, &w})
      for (Eigen::Index q = 0; q < m->rows(); ++q) {
        const Euler::State u = m->row(q).transpose();
        rmin = std::min(rmin, u[0]);
        pmin = std::min(pmin, law.pressure(u));
      }
  }
  if (rho_min) *rho_min = rmin;
  if (p_min) *p_min = pmin;
  return ok && rmin > 0.0 && pmin > 0.0;
}

/// One sample of the solution along the wedge wall of the double Mach problem.
struct WallSample {
  double s;  // arclength from the domain origin along y = 0 then up the wedge
  Vec2 x;
  Euler::State u;
};

[[nodiscard]] inline std::vector<WallSample> wall_trace(const Discretization& d, const Matrix& c, double x0) {
  std::vector<WallSample> out;
  for (const BoundaryFace& f : d.bfaces) {
    if (f.tag != "wall" && f.tag != "ymin") continue;
    const auto cb = c.middleRows(static_cast<Eigen::Index>(f.cell) * d.np(), d.np());
    for (std::size_t q = 0; q < f.rule.size(); ++q) {
      const Vec2 x = f.rule.points[q];
      if (f.tag == "ymin" && x.x() > x0) continue;
      WallSample w;
      w.x = x;
      w.s = f.tag == "ymin" ? x.x() - d.mesh->lo.x() : x0 - d.mesh->lo.x() + (x - Vec2(x0, d.mesh->lo.y())).norm();
      w.u = (f.phi.row(static_cast<Eigen::Index>(q)) * cb).transpose();
      out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end(), [](const WallSample& a, const WallSample& b) { return a.s < b.s; });
  return out;
}

/// Entropy error norms against the constant entropy 1/gamma of the Ringleb flow.
[[nodiscard]] inline NormPair ringleb_entropy_error(const Discretization& d, const Euler& law, const Matrix& c) {
  const double s0 = 1.0 / law.gamma;
  return l1_linf(d, c, [&](const Eigen::RowVectorXd& u, const Vec2&) {
    return entropy(law, Euler::State(u.transpose())) - s0;
  });
}

/// Five probe points related by 72 degree rotations about the centre of the five-disc array.
[[nodiscard]] inline std::vector<Vec2> pulse_probes(double offset = 1.0) {
  const auto centers = five_disc_centers();
  const Vec2 mid(10.0, 10.0);
  // radially inward of the first disc, between it and the pulse origin
  const Vec2 base = centers[0] + (mid - centers[0]).normalized() * (2.0 + offset);
  std::vector<Vec2> pts;
  for (int k = 0; k < 5; ++k) {
    const double a = 2.0 * kPi * k / 5.0;
    const Vec2 r = base - mid;
    pts.push_back(mid + Vec2(std::cos(a) * r.x() - std::sin(a) * r.y(), std::sin(a) * r.x() + std::cos(a) * r.y()));
  }
  return pts;
}

}  // namespace srdg
