#pragma once

#include <array>
#include <cmath>

#include "srdg/core.hpp"

// Ringleb's exact transonic Euler solution (gamma = 1.4), channel shifted by (1.5, 0).
namespace srdg::ringleb {

inline constexpr double kGamma = 1.4;
inline constexpr double kShiftX = 1.5;
inline constexpr double kShiftY = 0.0;

struct Hodograph {
  double c;
  double rho;
  double q;
  double J;
};

[[nodiscard]] inline Hodograph from_c(double c) {
  Hodograph h;
  h.c = c;
  h.rho = std::pow(c, 2.0 / (kGamma - 1.0));
  h.q = std::sqrt(2.0 * (1.0 - c * c) / (kGamma - 1.0));
  h.J = 1.0 / c + 1.0 / (3.0 * std::pow(c, 3)) + 1.0 / (5.0 * std::pow(c, 5)) -
        0.5 * std::log((1.0 + c) / (1.0 - c));
  return h;
}

[[nodiscard]] inline Hodograph from_q(double q) {
  return from_c(std::sqrt(1.0 - 0.5 * (kGamma - 1.0) * q * q));
}

/// Point on the streamline k at speed q.
[[nodiscard]] inline Vec2 point(double k, double q) {
  const Hodograph h = from_q(q);
  const double x = 0.5 / h.rho * (1.0 / (q * q) - 2.0 / (k * k)) + 0.5 * h.J + kShiftX;
  const double y = std::sqrt(std::max(0.0, 1.0 - q * q / (k * k))) / (k * q * h.rho) + kShiftY;
  return {x, y};
}

// Iso-speed circle residual: (x - J/2 - s_x)^2 + (y - s_y)^2 - 1/(4 rho^2 q^4).
[[nodiscard]] inline double circle_residual(const Hodograph& h, const Vec2& x) {
  const double dx = x.x() - 0.5 * h.J - kShiftX;
  const double dy = x.y() - kShiftY;
  return dx * dx + dy * dy - 1.0 / (4.0 * h.rho * h.rho * std::pow(h.q, 4));
}

/// Speed of sound at x by bisection on c in [0.01, 0.999999].
[[nodiscard]] inline Hodograph solve(const Vec2& x, double tol = 1e-13) {
  double lo = 0.01;
  double hi = 0.999999;
  double flo = circle_residual(from_c(lo), x);
  const double fhi = circle_residual(from_c(hi), x);
  if (!(flo * fhi <= 0.0)) throw BisectionFailure("ringleb: no sign change in speed-of-sound bracket");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = circle_residual(from_c(mid), x);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return from_c(0.5 * (lo + hi));
}

/// Primitive state (rho, u, v, P) at x.
[[nodiscard]] inline std::array<double, 4> primitive(const Vec2& x) {
  const Hodograph h = solve(x);
  const double denom = 1.0 / (h.q * h.q) - 2.0 * h.rho * (x.x() - 0.5 * h.J - kShiftX);
  const double k = std::sqrt(2.0 / denom);
  const double v = std::min(h.q * h.q / k, h.q);
  const double u = std::sqrt(std::max(0.0, h.q * h.q - v * v));
  return {h.rho, u, v, h.c * h.c * h.rho / kGamma};
}

}  // namespace srdg::ringleb
