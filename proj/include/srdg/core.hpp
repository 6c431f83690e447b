#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace srdg {

using Vec2 = Eigen::Vector2d;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Number of modal coefficients for total degree p in two dimensions, (p+1)(p+2)/2.
[[nodiscard]] constexpr int num_modes(int p) noexcept { return (p + 1) * (p + 2) / 2; }

[[nodiscard]] inline double cross(const Vec2& a, const Vec2& b) noexcept {
  return a.x() * b.y() - a.y() * b.x();
}

// Error hierarchy. Every failure mode named in the contracts maps to one type so callers
// (and the CLI exit-code mapping) can dispatch on it.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};
class NoRoot : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

class MeshError : public Error {
 public:
  using Error::Error;
};
class SplitCellError : public MeshError {
 public:
  using MeshError::MeshError;
};
class TunnelError : public MeshError {
 public:
  using MeshError::MeshError;
};
class DegenerateCut : public MeshError {
 public:
  using MeshError::MeshError;
};
class TriangulationError : public MeshError {
 public:
  using MeshError::MeshError;
};
class RankDeficient : public MeshError {
 public:
  using MeshError::MeshError;
};
class MergeFailure : public MeshError {
 public:
  using MeshError::MeshError;
};

class SolverError : public Error {
 public:
  using Error::Error;
};
class SolverBlowup : public SolverError {
 public:
  using SolverError::SolverError;
};
class NonAdmissibleState : public SolverError {
 public:
  using SolverError::SolverError;
};
class PositivityFailure : public SolverError {
 public:
  using SolverError::SolverError;
};
class MaxStepsExceeded : public SolverError {
 public:
  using SolverError::SolverError;
};
class BisectionFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace srdg
