#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "srdg/core.hpp"

namespace srdg {

/// Scalar advection u_t + div(a(x) u) = 0 with an affine velocity a(x) = A x + b.
struct Advection {
  static constexpr int M = 1;
  using State = Eigen::Matrix<double, 1, 1>;

  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Vec2 b = Vec2(1.0, 0.0);

  [[nodiscard]] Vec2 velocity(const Vec2& x) const { return A * x + b; }

  void flux(const State& u, const Vec2& x, State& fx, State& fy) const {
    const Vec2 a = velocity(x);
    fx[0] = a.x() * u[0];
    fy[0] = a.y() * u[0];
  }
  [[nodiscard]] State normal_flux(const State& u, const Vec2& x, const Vec2& n) const {
    return State(velocity(x).dot(n) * u[0]);
  }
  /// Upwind flux.
  [[nodiscard]] State num_flux(const State& ul, const State& ur, const Vec2& x, const Vec2& n) const {
    const double an = velocity(x).dot(n);
    return State(an > 0.0 ? an * ul[0] : an * ur[0]);
  }
  [[nodiscard]] State wall_flux(const State&, const Vec2&) const { return State::Zero(); }
  [[nodiscard]] Vec2 wavespeeds(const State&, const Vec2& x) const { return velocity(x).cwiseAbs(); }
  [[nodiscard]] bool admissible(const State& u) const { return std::isfinite(u[0]); }
};

enum class EulerFlux { roe, llf };

[[nodiscard]] inline EulerFlux euler_flux_from_name(const std::string& s) {
  if (s == "roe") return EulerFlux::roe;
  if (s == "llf") return EulerFlux::llf;
  throw ConfigError("unknown Euler flux '" + s + "' (expected roe or llf)");
}

/// Compressible Euler equations in conserved variables (rho, rho u, rho v, E).
struct Euler {
  static constexpr int M = 4;
  using State = Eigen::Vector4d;
  using Frame = Eigen::Matrix4d;

  double gamma = 1.4;
  EulerFlux choice = EulerFlux::llf;
  mutable long roe_fallbacks = 0;

  [[nodiscard]] double pressure(const State& u) const {
    return (gamma - 1.0) * (u[3] - 0.5 * (u[1] * u[1] + u[2] * u[2]) / u[0]);
  }
  [[nodiscard]] double sound_speed(const State& u) const { return std::sqrt(gamma * pressure(u) / u[0]); }
  [[nodiscard]] State from_primitive(double rho, double vx, double vy, double p) const {
    return State(rho, rho * vx, rho * vy, p / (gamma - 1.0) + 0.5 * rho * (vx * vx + vy * vy));
  }
  [[nodiscard]] bool admissible(const State& u) const {
    return u.allFinite() && u[0] > 0.0 && pressure(u) > 0.0;
  }

  void flux(const State& u, const Vec2&, State& fx, State& fy) const {
    const double vx = u[1] / u[0];
    const double vy = u[2] / u[0];
    const double p = pressure(u);
    fx << u[1], u[1] * vx + p, u[2] * vx, (u[3] + p) * vx;
    fy << u[2], u[1] * vy, u[2] * vy + p, (u[3] + p) * vy;
  }
  [[nodiscard]] State normal_flux(const State& u, const Vec2&, const Vec2& n) const {
    const double un = (u[1] * n.x() + u[2] * n.y()) / u[0];
    const double p = pressure(u);
    return State(u[0] * un, u[1] * un + p * n.x(), u[2] * un + p * n.y(), (u[3] + p) * un);
  }

  [[nodiscard]] State llf(const State& ul, const State& ur, const Vec2& n) const {
    const double sl = std::abs((ul[1] * n.x() + ul[2] * n.y()) / ul[0]) + sound_speed(ul);
    const double sr = std::abs((ur[1] * n.x() + ur[2] * n.y()) / ur[0]) + sound_speed(ur);
    const double lam = std::max(sl, sr);
    return 0.5 * (normal_flux(ul, Vec2(), n) + normal_flux(ur, Vec2(), n)) - 0.5 * lam * (ur - ul);
  }

  /// Roe flux with Harten's entropy fix; falls back to llf when the Roe average is not admissible.
  [[nodiscard]] State roe(const State& ul, const State& ur, const Vec2& n) const {
    if (!(ul[0] > 0.0 && ur[0] > 0.0)) return fallback(ul, ur, n);
    const double pl = pressure(ul);
    const double pr = pressure(ur);
    const double sl = std::sqrt(ul[0]);
    const double sr = std::sqrt(ur[0]);
    const double w = 1.0 / (sl + sr);
    const double vx = (ul[1] / sl + ur[1] / sr) * w;
    const double vy = (ul[2] / sl + ur[2] / sr) * w;
    const double h = ((ul[3] + pl) / sl + (ur[3] + pr) / sr) * w;
    const double c2 = (gamma - 1.0) * (h - 0.5 * (vx * vx + vy * vy));
    if (!(c2 > 0.0) || !std::isfinite(c2)) return fallback(ul, ur, n);
    const double c = std::sqrt(c2);
    const double rho = sl * sr;
    const double un = vx * n.x() + vy * n.y();
    const State du = ur - ul;
    const double drho = du[0];
    const double dp = pr - pl;
    const double dun = (ur[1] * n.x() + ur[2] * n.y()) / ur[0] - (ul[1] * n.x() + ul[2] * n.y()) / ul[0];
    const double dvx = ur[1] / ur[0] - ul[1] / ul[0];
    const double dvy = ur[2] / ur[0] - ul[2] / ul[0];
    auto fix = [&](double lam) {
      const double d = 0.1 * (std::abs(un) + c);
      const double a = std::abs(lam);
      return a < d ? 0.5 * (a * a / d + d) : a;
    };
    const double a1 = fix(un - c) * (dp - rho * c * dun) / (2.0 * c2);
    const double a2 = fix(un) * (drho - dp / c2);
    const double a3 = fix(un) * rho;
    const double a4 = fix(un + c) * (dp + rho * c * dun) / (2.0 * c2);
    const double dvt_x = dvx - dun * n.x();
    const double dvt_y = dvy - dun * n.y();
    State diss;
    diss[0] = a1 + a2 + a4;
    diss[1] = a1 * (vx - c * n.x()) + a2 * vx + a3 * dvt_x + a4 * (vx + c * n.x());
    diss[2] = a1 * (vy - c * n.y()) + a2 * vy + a3 * dvt_y + a4 * (vy + c * n.y());
    diss[3] = a1 * (h - c * un) + a2 * 0.5 * (vx * vx + vy * vy) + a3 * (vx * dvt_x + vy * dvt_y) +
              a4 * (h + c * un);
    return 0.5 * (normal_flux(ul, Vec2(), n) + normal_flux(ur, Vec2(), n)) - 0.5 * diss;
  }

  [[nodiscard]] State num_flux(const State& ul, const State& ur, const Vec2&, const Vec2& n) const {
    return choice == EulerFlux::roe ? roe(ul, ur, n) : llf(ul, ur, n);
  }
  /// Reflecting wall: only the interior pressure acts.
  [[nodiscard]] State wall_flux(const State& u, const Vec2& n) const {
    const double p = pressure(u);
    return State(0.0, p * n.x(), p * n.y(), 0.0);
  }
  [[nodiscard]] Vec2 wavespeeds(const State& u, const Vec2&) const {
    const double c = sound_speed(u);
    return Vec2(std::abs(u[1] / u[0]) + c, std::abs(u[2] / u[0]) + c);
  }

  /// Right eigenvectors of dF/dU . d at state u, columns ordered by u.d - c, u.d, u.d, u.d + c.
  [[nodiscard]] Frame right_eigenvectors(const State& u, const Vec2& d) const {
    const double vx = u[1] / u[0];
    const double vy = u[2] / u[0];
    const double c = sound_speed(u);
    const double h = (u[3] + pressure(u)) / u[0];
    const double un = vx * d.x() + vy * d.y();
    const Vec2 t(-d.y(), d.x());
    const double ut = vx * t.x() + vy * t.y();
    Frame r;
    r << 1.0, 1.0, 0.0, 1.0,
        vx - c * d.x(), vx, t.x(), vx + c * d.x(),
        vy - c * d.y(), vy, t.y(), vy + c * d.y(),
        h - c * un, 0.5 * (vx * vx + vy * vy), ut, h + c * un;
    return r;
  }

 private:
  State fallback(const State& ul, const State& ur, const Vec2& n) const {
    ++roe_fallbacks;
    return llf(ul, ur, n);
  }
};

}  // namespace srdg
