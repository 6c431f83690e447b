#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "srdg/boundaries.hpp"
#include "srdg/laws.hpp"
#include "srdg/ringleb.hpp"
#include "srdg/solver.hpp"

namespace srdg {

struct AdvectionProblem {
  std::string name;
  Boundary boundary;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();
  Advection law;
  BCMap<Advection> bcs;
  std::function<double(const Vec2&, double)> exact;  // exact(x, 0) is the initial condition
  double t_final = 1.0;
};

/// Gradient-limiting direction for the irregular-stencil limiter, by cell centroid.
using LimiterDirection = std::function<Vec2(const Vec2&)>;

struct EulerProblem {
  std::string name;
  Boundary boundary;
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();
  Euler law;
  BCMap<Euler> bcs;
  std::function<Euler::State(const Vec2&)> initial;
  std::function<Euler::State(const Vec2&)> exact;  // steady exact solution, if any
  double t_final = 0.0;
  bool steady = false;
  bool limit = false;
  LimiterDirection bj_direction = [](const Vec2&) { return Vec2(1.0, 0.0); };
};

/// Pulse profile w(theta) = [erf(5(pi/6 - theta)) + erf(5(pi/6 + theta))] / 2.
[[nodiscard]] inline double rotation_profile(double theta) {
  return 0.5 * (std::erf(5.0 * (kPi / 6.0 - theta)) + std::erf(5.0 * (kPi / 6.0 + theta)));
}

/// Angle wrapped into (-pi, pi].
[[nodiscard]] inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;
}

/// Pulse rotating once around the annulus in T = 5 with zero boundary flux.
[[nodiscard]] inline AdvectionProblem solid_body_rotation() {
  AdvectionProblem pr;
  pr.name = "solid-body-rotation";
  pr.boundary = annulus();
  pr.lo = Vec2(0, 0);
  pr.hi = Vec2(3.0001, 3.0001);
  const double w = 0.4 * kPi;
  pr.law.A << 0.0, -w, w, 0.0;
  pr.law.b = Vec2(1.5 * w, -1.5 * w);
  pr.bcs["*"] = {BCKind::zero_flux, {}};
  pr.exact = [w](const Vec2& x, double t) {
    const double th = std::atan2(x.y() - 1.5, x.x() - 1.5) - w * t;
    return rotation_profile(wrap_angle(th - kPi / 2.0));
  };
  pr.t_final = 5.0;
  return pr;
}

/// Constant-velocity transport of a smooth profile on the open unit square with exact
/// inflow states. Profiles: gaussian, sin, constant.
[[nodiscard]] inline AdvectionProblem manufactured_advection(Vec2 velocity = Vec2(1.0, 0.5),
                                                             const std::string& profile = "gaussian") {
  AdvectionProblem pr;
  pr.name = "advection-" + profile;
  pr.lo = Vec2(0, 0);
  pr.hi = Vec2(1, 1);
  pr.law.b = velocity;
  std::function<double(const Vec2&)> u0;
  if (profile == "gaussian") {
    u0 = [](const Vec2& x) { return std::exp(-20.0 * (x - Vec2(0.3, 0.4)).squaredNorm()); };
  } else if (profile == "sin") {
    u0 = [](const Vec2& x) { return std::sin(2.0 * kPi * x.x()) * std::sin(2.0 * kPi * x.y()); };
  } else if (profile == "constant") {
    u0 = [](const Vec2&) { return 1.0; };
  } else {
    throw ConfigError("unknown advection profile '" + profile + "'");
  }
  pr.exact = [u0, velocity](const Vec2& x, double t) { return u0(x - t * velocity); };
  auto ex = pr.exact;
  pr.bcs["*"] = {BCKind::exact, [ex](const Vec2& x, double t) { return Advection::State(ex(x, t)); }};
  pr.t_final = 0.5;
  return pr;
}

/// Conserved Ringleb state at x.
[[nodiscard]] inline Euler::State ringleb_state(const Euler& law, const Vec2& x) {
  const auto w = ringleb::primitive(x);
  return law.from_primitive(w[0], w[1], w[2], w[3]);
}

/// Steady transonic flow through the Ringleb channel; walls reflect, exact ghost states on
/// the top (q = 0.5) and bottom boundaries.
[[nodiscard]] inline EulerProblem ringleb_problem() {
  EulerProblem pr;
  pr.name = "ringleb";
  pr.boundary = ringleb_channel();
  pr.lo = Vec2(0, 0);
  pr.hi = Vec2(2.75, 2.75);
  pr.law.gamma = ringleb::kGamma;
  pr.law.choice = EulerFlux::roe;
  const Euler law = pr.law;
  pr.exact = [law](const Vec2& x) { return ringleb_state(law, x); };
  pr.initial = pr.exact;
  // ghost states are evaluated at fixed quadrature points every stage: memoize the bisection
  auto cache = std::make_shared<std::map<std::pair<double, double>, Euler::State>>();
  BoundaryCondition<Euler> ghost{BCKind::exact, [law, cache](const Vec2& x, double) {
                                   const auto key = std::make_pair(x.x(), x.y());
                                   auto it = cache->find(key);
                                   if (it == cache->end()) it = cache->emplace(key, ringleb_state(law, x)).first;
                                   return it->second;
                                 }};
  pr.bcs["top"] = ghost;
  pr.bcs["ymin"] = ghost;
  pr.bcs["*"] = {BCKind::reflect, {}};
  pr.steady = true;
  return pr;
}

/// Entropy P / rho^gamma; the Ringleb flow is isentropic with entropy 1/gamma.
[[nodiscard]] inline double entropy(const Euler& law, const Euler::State& u) {
  return law.pressure(u) / std::pow(u[0], law.gamma);
}

/// Gaussian pressure pulse at (10,10) among five reflecting discs, quiescent far field, T = 6.
[[nodiscard]] inline EulerProblem pressure_pulse(double radius = 2.0) {
  EulerProblem pr;
  pr.name = "pressure-pulse";
  pr.boundary = five_discs(radius);
  pr.lo = Vec2(0, 0);
  pr.hi = Vec2(20, 20);
  pr.law.gamma = 1.4;
  pr.law.choice = EulerFlux::roe;
  const Euler law = pr.law;
  const double g = law.gamma;
  const double b = std::log(2.0) / (0.2 * 0.2);
  pr.initial = [law, g, b](const Vec2& x) {
    const double p = 1.0 / g + 1e-4 * std::exp(-b * (x - Vec2(10, 10)).squaredNorm());
    return law.from_primitive(1.0 - 1.0 / g + p, 0.0, 0.0, p);
  };
  const Euler::State quiet = law.from_primitive(1.0, 0.0, 0.0, 1.0 / g);
  BoundaryCondition<Euler> far{BCKind::prescribed, [quiet](const Vec2&, double) { return quiet; }};
  for (const char* side : {"xmin", "xmax", "ymin", "ymax"}) pr.bcs[side] = far;
  pr.bcs["*"] = {BCKind::reflect, {}};
  pr.t_final = 6.0;
  return pr;
}

/// Mach 10 shock hitting a 30 degree wedge that starts at (1/6, 0); T = 0.2, limited p = 1.
[[nodiscard]] inline EulerProblem double_mach() {
  EulerProblem pr;
  pr.name = "double-mach";
  pr.lo = Vec2(0, 0);
  pr.hi = Vec2(2.5, 1.75);
  const double x0 = 1.0 / 6.0;
  pr.boundary = wedge(x0, kPi / 6.0, pr.lo, pr.hi);
  pr.law.gamma = 1.4;
  pr.law.choice = EulerFlux::llf;
  const Euler law = pr.law;
  const Euler::State left = law.from_primitive(8.0, 8.25, 0.0, 116.5);
  const Euler::State right = law.from_primitive(1.4, 0.0, 0.0, 1.0);
  pr.initial = [left, right, x0](const Vec2& x) { return x.x() < x0 ? left : right; };
  pr.bcs["xmin"] = {BCKind::prescribed, [left](const Vec2&, double) { return left; }};
  pr.bcs["xmax"] = {BCKind::prescribed, [right](const Vec2&, double) { return right; }};
  pr.bcs["ymax"] = {BCKind::extrapolate, {}};
  pr.bcs["*"] = {BCKind::reflect, {}};
  pr.t_final = 0.2;
  pr.limit = true;
  pr.bj_direction = [x0](const Vec2& c) {
    return c.x() > x0 ? Vec2(std::sqrt(3.0) / 2.0, 0.5) : Vec2(1.0, 0.0);
  };
  return pr;
}

}  // namespace srdg
