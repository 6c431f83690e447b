// Batch driver: mesh | run | converge | oned.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "srdg/boundaries.hpp"
#include "srdg/config.hpp"
#include "srdg/experiments.hpp"
#include "srdg/io.hpp"
#include "srdg/oned.hpp"

namespace fs = std::filesystem;
using namespace srdg;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Flags {
  std::string config;
  RunConfig cfg;
  std::vector<CLI::Option*> opts;
  std::map<std::string, CLI::Option*> by_name;
};

void add_flags(CLI::App* sub, Flags& f) {
  RunConfig& c = f.cfg;
  auto add = [&](const std::string& name, CLI::Option* o) { f.by_name[name] = o; };
  sub->add_option("-c,--config", f.config, "JSON config file; flags override its keys");
  add("problem", sub->add_option("--problem", c.problem, "problem or geometry name"));
  add("n", sub->add_option("-n,--n", c.n, "cells across the longer side; several for converge")->delimiter(','));
  add("p", sub->add_option("-p,--p", c.p, "polynomial degree"));
  add("q", sub->add_option("-q,--q", c.q, "boundary interpolation degree (p = 1 uses at least 2)"));
  add("cfl", sub->add_option("--cfl", c.cfl, "CFL factor in dt = cfl / ((2p+1)(|a|/dx + |b|/dy))"));
  add("flux", sub->add_option("--flux", c.flux, "Euler numerical flux: roe or llf"));
  add("limit", sub->add_option("--limit", c.limit, "1 enables slope and positivity limiting, 0 disables"));
  add("t_final", sub->add_option("--t-final", c.t_final, "final time (problem default if omitted)"));
  add("max_steps", sub->add_option("--max-steps", c.max_steps, "step limit"));
  add("output_every", sub->add_option("--output-every", c.output_every, "steps between snapshots, 0 for final only"));
  add("vtk", sub->add_option("--vtk", c.vtk, "write VTK files (true/false)"));
  add("output", sub->add_option("-o,--output", c.output, "output directory"));
  add("seed", sub->add_option("--seed", c.seed, "random seed"));
  add("threads", sub->add_option("--threads", c.threads, "OpenMP threads"));
  add("boundary_file", sub->add_option("--boundary", c.boundary_file, "JSON boundary description (mesh command)"));
  add("lo", sub->add_option("--lo", c.lo, "domain lower corner x,y")->delimiter(','));
  add("hi", sub->add_option("--hi", c.hi, "domain upper corner x,y")->delimiter(','));
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) c = load_config(f.config);
  // re-apply explicitly given flags on top of the file
  nlohmann::json over;
  const nlohmann::json given = to_json(f.cfg);
  for (const auto& [name, opt] : f.by_name) {
    if (opt->count() == 0) continue;
    if (name == "q") over["q"] = f.cfg.q;
    else if (name == "n") over["n"] = f.cfg.n;
    else over[name] = given.at(name);
  }
  apply_json(over, c);
  c.validate();
  return c;
}

fs::path output_dir(const RunConfig& c, const std::string& cmd) {
  if (!c.output.empty()) return c.output;
  const char* root = std::getenv("SRDG_OUTPUT_ROOT");
  return fs::path(root && *root ? root : "srdg-output") / (cmd + "-" + c.problem);
}

nlohmann::json manifest(const std::string& cmd, const RunConfig& c) {
  nlohmann::json j;
  j["tool"] = "srdg";
  j["version"] = kVersion;
  j["command"] = cmd;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
#ifdef __VERSION__
  j["compiler"] = __VERSION__;
#endif
  j["config"] = to_json(c);
  j["meshes"] = nlohmann::json::array();
  return j;
}

nlohmann::json mesh_entry(const CutCellMesh& m) {
  const MeshReport r = mesh_report(m);
  return {{"nx", m.nx}, {"ny", m.ny}, {"q", m.q},       {"hash", io::mesh_hash(m)},
          {"cells", r.cells}, {"cut", r.cut}, {"min_volume_fraction", r.min_fraction}};
}

std::string step_name(const std::string& stem, long step) {
  std::ostringstream os;
  os << stem << '_' << std::setw(6) << std::setfill('0') << step << ".vtk";
  return os.str();
}

std::vector<std::string> euler_names() { return {"rho", "rho_u", "rho_v", "E"}; }

// ---- mesh ----

int cmd_mesh(const RunConfig& c) {
  Boundary b;
  Vec2 lo;
  Vec2 hi;
  if (!c.boundary_file.empty()) {
    if (c.lo.empty() || c.hi.empty()) throw ConfigError("--boundary needs --lo and --hi");
    lo = Vec2(c.lo[0], c.lo[1]);
    hi = Vec2(c.hi[0], c.hi[1]);
    b = boundary_from_json_file(c.boundary_file, lo, hi);
  } else {
    std::tie(b, lo, hi) = problem_geometry(c.problem);
    if (!c.lo.empty()) lo = Vec2(c.lo[0], c.lo[1]);
    if (!c.hi.empty()) hi = Vec2(c.hi[0], c.hi[1]);
  }
  const fs::path out = output_dir(c, "mesh");
  nlohmann::json man = manifest("mesh", c);
  for (int n : c.n) {
    const auto [nx, ny] = grid_dims(lo, hi, n);
    const int p = std::max(c.p, 0);
    const auto s = make_setup(b, lo, hi, nx, ny, p, c.effective_q());
    const MeshReport r = mesh_report(s->mesh);
    const std::string tag = "N" + std::to_string(n);
    io::write_json(out / ("mesh_" + tag + ".json"), io::mesh_json(s->mesh));
    io::write_text(out / ("mesh_" + tag + ".vtk"), io::vtk_cells(s->mesh, io::mesh_fields(s->mesh, &s->plan)));
    nlohmann::json jr = mesh_entry(s->mesh);
    jr["whole"] = r.whole;
    jr["fluid_area"] = r.fluid_area;
    jr["max_cut_fraction"] = r.max_fraction;
    jr["fraction_histogram_decades"] = r.histogram;
    int merged = 0;
    int max_overlap = 0;
    for (const auto& nb : s->plan.nbhds) merged += !nb.identity;
    for (int o : s->plan.overlap) max_overlap = std::max(max_overlap, o);
    jr["merged_neighborhoods"] = merged;
    jr["max_overlap"] = max_overlap;
    io::write_json(out / ("report_" + tag + ".json"), jr);
    man["meshes"].push_back(mesh_entry(s->mesh));
    std::cout << "N=" << n << " grid " << nx << "x" << ny << ": " << r.cells << " cells (" << r.whole << " whole, "
              << r.cut << " cut), min volume fraction " << r.min_fraction << ", fluid area " << std::setprecision(12)
              << r.fluid_area << std::setprecision(6) << "\n";
  }
  io::write_json(out / "manifest.json", man);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// ---- run / converge, advection ----

struct AdvectionRow {
  AdvectionOutcome r;
  std::string hash;
};

AdvectionRow advection_once(const RunConfig& c, int n, const fs::path& out, bool snapshots) {
  const AdvectionProblem pr = advection_problem(c.problem);
  AdvectionOptions o;
  o.t_final = c.t_final;
  o.cfl = c.cfl;
  o.max_steps = c.max_steps;
  AdvectionRow row;
  io::Csv mass({"step", "t", "mass"});
  const std::string tag = "N" + std::to_string(n);
  o.on_step = [&](const Setup& s, long step, double t, const Matrix& u) {
    const bool snap = step == 0 || (c.output_every > 0 && step % c.output_every == 0);
    if (!snap) return;
    mass.row({static_cast<double>(step), t, mass_audit(s.disc, u)[0]});
    if (snapshots && c.vtk)
      io::write_text(out / step_name("solution_" + tag, step),
                     io::vtk_cells(s.mesh, io::average_fields(s.disc, u, {"u"})));
  };
  o.on_finish = [&](const Setup& s, const Matrix& u, double t) {
    row.hash = io::mesh_hash(s.mesh);
    mass.row({-1.0, t, mass_audit(s.disc, u)[0]});
    io::write_text(out / ("mass_" + tag + ".csv"), mass.str());
    if (!snapshots || !c.vtk) return;
    auto fields = io::mesh_fields(s.mesh, &s.plan);
    const auto avg = io::average_fields(s.disc, u, {"u"});
    fields.insert(fields.end(), avg.begin(), avg.end());
    io::write_text(out / ("solution_" + tag + "_final.vtk"), io::vtk_cells(s.mesh, fields));
    io::write_text(out / ("quadrature_" + tag + "_final.vtk"), io::vtk_quadrature_points(s.disc, u, {"u"}));
  };
  row.r = run_advection(pr, n, c.p, c.effective_q(), o);
  return row;
}

int run_advection_cmd(const RunConfig& c, bool converge) {
  const fs::path out = output_dir(c, converge ? "converge" : "run");
  nlohmann::json man = manifest(converge ? "converge" : "run", c);
  std::vector<AdvectionRow> rows;
  const std::vector<int> ns = converge ? c.n : std::vector<int>{c.n.front()};
  for (int n : ns) {
    rows.push_back(advection_once(c, n, out, !converge));
    const auto& r = rows.back().r;
    man["meshes"].push_back({{"n", n}, {"hash", rows.back().hash}, {"min_volume_fraction", r.min_fraction}});
    std::cout << "N=" << n << " p=" << r.p << " q=" << r.q << " t=" << r.t << " steps=" << r.steps
              << " L1=" << r.err.l1 << " Linf=" << r.err.linf << " E_d=" << r.fv.domain
              << " mass change=" << (r.mass1 - r.mass0) / std::max(std::abs(r.mass0), 1e-300) << "\n";
  }
  std::set<std::string> tags;
  for (const auto& row : rows)
    for (const auto& [tag, v] : row.r.fv.boundary) tags.insert(tag);
  std::vector<std::string> header{"N", "L1", "L1_rate", "Linf", "Linf_rate", "E_d"};
  for (const auto& t : tags) header.push_back("E_b_" + t);
  io::Csv csv(header);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k].r;
    auto rate = [&](double e1, double e0) {
      return k == 0 ? nan : std::log(e0 / e1) / std::log(static_cast<double>(r.n) / rows[k - 1].r.n);
    };
    std::vector<double> v{static_cast<double>(r.n), r.err.l1,
                          rate(r.err.l1, k ? rows[k - 1].r.err.l1 : 0.0), r.err.linf,
                          rate(r.err.linf, k ? rows[k - 1].r.err.linf : 0.0), r.fv.domain};
    for (const auto& t : tags) v.push_back(r.fv.boundary.count(t) ? r.fv.boundary.at(t) : nan);
    csv.row(v);
  }
  io::write_text(out / (converge ? "convergence.csv" : "errors.csv"), csv.str());
  if (converge && rows.size() >= 2) {
    std::vector<double> n;
    std::vector<double> l1;
    std::vector<double> li;
    for (const auto& row : rows) {
      n.push_back(row.r.n);
      l1.push_back(row.r.err.l1);
      li.push_back(row.r.err.linf);
    }
    const double r1 = convergence_rate(n, l1);
    const double ri = convergence_rate(n, li);
    io::write_json(out / "rates.json", {{"L1", r1}, {"Linf", ri}});
    std::cout << "least-squares rates: L1 " << r1 << ", Linf " << ri << "\n";
  }
  io::write_json(out / "manifest.json", man);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// ---- run / converge, Euler ----

struct EulerRow {
  int n = 0;
  NormPair entropy;
  bool has_entropy = false;
  RunResult res;
};

EulerRow euler_once(const RunConfig& c, int n, const fs::path& out, nlohmann::json& man, bool snapshots) {
  EulerProblem pr = euler_problem(c.problem);
  if (!c.flux.empty()) pr.law.choice = euler_flux_from_name(c.flux);
  if (c.limit >= 0) pr.limit = c.limit == 1;
  const auto [nx, ny] = grid_dims(pr.lo, pr.hi, n);
  const EulerRun er(pr, nx, ny, c.p, c.effective_q());
  const Discretization& d = er.disc();
  const Euler& law = er.problem().law;
  const std::string tag = "N" + std::to_string(n);
  man["meshes"].push_back(mesh_entry(er.setup().mesh));
  Matrix u = er.initial();

  io::Csv mass({"step", "t", "rho", "rho_u", "rho_v", "E", "rho_min", "p_min"});
  auto log_mass = [&](long step, double t, const Matrix& v) {
    const Eigen::VectorXd m = mass_audit(d, v);
    double rmin = 0.0;
    double pmin = 0.0;
    (void)all_admissible(d, law, v, &rmin, &pmin);
    mass.row({static_cast<double>(step), t, m[0], m[1], m[2], m[3], rmin, pmin});
  };
  std::vector<Vec2> probes;
  if (pr.name == "pressure-pulse") probes = pulse_probes();
  io::Csv probe_csv({"t", "p0", "p1", "p2", "p3", "p4"});
  auto log_probes = [&](double t, const Matrix& v) {
    if (probes.empty()) return;
    std::vector<double> row{t};
    for (const Vec2& x : probes) row.push_back(law.pressure(point_value(d, v, x).transpose()) - 1.0 / law.gamma);
    probe_csv.row(row);
  };
  auto snapshot = [&](long step, const Matrix& v) {
    if (!snapshots || !c.vtk) return;
    auto fields = io::average_fields(d, v, euler_names());
    io::CellField pf{"pressure", {}};
    for (int id = 0; id < d.ncells(); ++id)
      pf.values.push_back(law.pressure(v.row(static_cast<Eigen::Index>(id) * d.np()).transpose()));
    fields.push_back(pf);
    io::write_text(out / step_name("solution_" + tag, step), io::vtk_cells(er.setup().mesh, fields));
  };
  log_mass(0, 0.0, u);
  log_probes(0.0, u);
  snapshot(0, u);

  RunOptions opt;
  opt.t_final = c.t_final > 0.0 ? c.t_final : pr.t_final;
  opt.cfl = c.cfl;
  opt.max_steps = c.max_steps;
  opt.on_step = [&](long step, double t, const Matrix& v) {
    log_probes(t, v);
    if (c.output_every > 0 && step % c.output_every == 0) {
      log_mass(step, t, v);
      snapshot(step, v);
    }
  };
  EulerRow row;
  row.n = n;
  if (c.t_final == 0.0 && !pr.steady) {
    row.res.t = 0.0;
  } else {
    row.res = er.advance(u, opt);
  }
  log_mass(row.res.steps, row.res.t, u);
  io::write_text(out / ("mass_" + tag + ".csv"), mass.str());
  if (!probes.empty()) io::write_text(out / ("probes_" + tag + ".csv"), probe_csv.str());
  if (pr.steady) {
    io::Csv hist({"step", "max_change"});
    for (std::size_t k = 0; k < row.res.change_history.size(); ++k)
      hist.row({static_cast<double>(k + 1), row.res.change_history[k]});
    io::write_text(out / ("steady_" + tag + ".csv"), hist.str());
  }
  if (pr.name == "ringleb") {
    row.entropy = ringleb_entropy_error(d, law, u);
    row.has_entropy = true;
  }
  if (pr.name == "double-mach") {
    io::Csv trace({"s", "x", "y", "rho", "u", "v", "p"});
    for (const WallSample& w : wall_trace(d, u, 1.0 / 6.0))
      trace.row({w.s, w.x.x(), w.x.y(), w.u[0], w.u[1] / w.u[0], w.u[2] / w.u[0], law.pressure(w.u)});
    io::write_text(out / ("wall_trace_" + tag + ".csv"), trace.str());
  }
  if (snapshots && c.vtk) {
    auto fields = io::mesh_fields(er.setup().mesh, &er.setup().plan);
    const auto avg = io::average_fields(d, u, euler_names());
    fields.insert(fields.end(), avg.begin(), avg.end());
    io::write_text(out / ("solution_" + tag + "_final.vtk"), io::vtk_cells(er.setup().mesh, fields));
    io::write_text(out / ("quadrature_" + tag + "_final.vtk"), io::vtk_quadrature_points(d, u, euler_names()));
  }
  double rmin = 0.0;
  double pmin = 0.0;
  const bool ok = all_admissible(d, law, u, &rmin, &pmin);
  std::cout << pr.name << " N=" << n << " (" << nx << "x" << ny << ") p=" << c.p << " t=" << row.res.t
            << " steps=" << row.res.steps << " min rho=" << rmin << " min p=" << pmin
            << (ok ? "" : " NOT ADMISSIBLE");
  if (pr.steady) std::cout << " converged=" << row.res.converged << " last change=" << row.res.last_change;
  if (row.has_entropy) std::cout << " entropy L1=" << row.entropy.l1 << " Linf=" << row.entropy.linf;
  std::cout << "\n";
  return row;
}

int run_euler_cmd(const RunConfig& c, bool converge) {
  const fs::path out = output_dir(c, converge ? "converge" : "run");
  nlohmann::json man = manifest(converge ? "converge" : "run", c);
  const std::vector<int> ns = converge ? c.n : std::vector<int>{c.n.front()};
  std::vector<EulerRow> rows;
  for (int n : ns) rows.push_back(euler_once(c, n, out, man, !converge));
  if (rows.front().has_entropy) {
    io::Csv csv({"N", "entropy_L1", "L1_rate", "entropy_Linf", "Linf_rate", "steps", "converged"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      auto rate = [&](double e1, double e0) {
        return k == 0 ? nan : std::log(e0 / e1) / std::log(static_cast<double>(r.n) / rows[k - 1].n);
      };
      csv.row({static_cast<double>(r.n), r.entropy.l1, rate(r.entropy.l1, k ? rows[k - 1].entropy.l1 : 0.0),
               r.entropy.linf, rate(r.entropy.linf, k ? rows[k - 1].entropy.linf : 0.0),
               static_cast<double>(r.res.steps), r.res.converged ? 1.0 : 0.0});
    }
    io::write_text(out / (converge ? "convergence.csv" : "errors.csv"), csv.str());
  }
  io::write_json(out / "manifest.json", man);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

// ---- oned ----

int cmd_oned(const RunConfig& c) {
  const fs::path out = output_dir(c, "oned");
  auto f = [](double x) { return std::sin(2.0 * kPi * x); };
  const double t_final = c.t_final > 0.0 ? c.t_final : 1.0;
  std::vector<double> ns;
  std::vector<double> l1;
  std::vector<double> li;
  io::Csv csv({"N", "cells", "min_fraction", "L1", "L1_rate", "Linf", "Linf_rate"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int n : c.n) {
    const oned::Grid1D g = oned::random_split_grid(n, static_cast<std::uint32_t>(c.seed + static_cast<std::uint64_t>(n)));
    const oned::Plan1D pl = oned::build_1d_plan(g, c.p);
    Matrix u = pl.project(f);
    oned::advance(pl, u, t_final, 1.0, c.cfl);
    const NormPair e = oned::errors(pl, u, f);
    double hmin = 1e300;
    for (int i = 0; i < g.ncells(); ++i) hmin = std::min(hmin, g.size(i));
    const bool first = ns.empty();
    const double r1 = first ? nan : std::log(l1.back() / e.l1) / std::log(n / ns.back());
    const double ri = first ? nan : std::log(li.back() / e.linf) / std::log(n / ns.back());
    ns.push_back(n);
    l1.push_back(e.l1);
    li.push_back(e.linf);
    csv.row({static_cast<double>(n), static_cast<double>(g.ncells()), hmin / g.h, e.l1, r1, e.linf, ri});
    std::cout << "N=" << n << " p=" << c.p << " L1=" << e.l1 << " Linf=" << e.linf << "\n";
  }
  io::write_text(out / "convergence.csv", csv.str());
  if (ns.size() >= 2) {
    const double r1 = convergence_rate(ns, l1);
    const double ri = convergence_rate(ns, li);
    io::write_json(out / "rates.json", {{"L1", r1}, {"Linf", ri}});
    std::cout << "least-squares rates: L1 " << r1 << ", Linf " << ri << "\n";
  }
  io::write_json(out / "manifest.json", manifest("oned", c));
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cut-cell modal DG with state redistribution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Flags fm;
  Flags fr;
  Flags fc;
  Flags fo;
  auto* mesh = app.add_subcommand("mesh", "generate a cut-cell mesh, write JSON/VTK and a report");
  auto* run = app.add_subcommand("run", "run one problem at one resolution");
  auto* conv = app.add_subcommand("converge", "run over a list of N and fit convergence rates");
  auto* oned = app.add_subcommand("oned", "1D SRD advection convergence on random split grids");
  add_flags(mesh, fm);
  add_flags(run, fr);
  add_flags(conv, fc);
  add_flags(oned, fo);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    const Flags& f = mesh->parsed() ? fm : run->parsed() ? fr : conv->parsed() ? fc : fo;
    const RunConfig c = resolve(f);
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, c.threads));
#endif
    if (mesh->parsed()) return cmd_mesh(c);
    if (oned->parsed()) return cmd_oned(c);
    if (c.p < 1) throw ConfigError("2D runs need p >= 1");
    const bool converge = conv->parsed();
    if (is_advection_problem(c.problem)) return run_advection_cmd(c, converge);
    return run_euler_cmd(c, converge);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
