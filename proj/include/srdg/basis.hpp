#pragma once

#include <cmath>
#include <vector>

#include "srdg/core.hpp"
#include "srdg/quadrature.hpp"

namespace srdg {

/// Orthonormal basis of total degree p on [0,1]^2, graded as {1, xi, eta, xi^2, xi eta, eta^2, ...}.
/// Gram-Schmidt of the graded monomials in this order yields products of normalized shifted
/// Legendre polynomials, P_k = L_a(xi) L_b(eta) with k running over a+b = n, b = 0..n.
class ReferenceBasis {
 public:
  explicit ReferenceBasis(int p) : p_(p) {
    if (p < 0) throw ConfigError("ReferenceBasis: p must be >= 0");
    for (int n = 0; n <= p; ++n)
      for (int b = 0; b <= n; ++b) idx_.push_back({n - b, b});
  }

  [[nodiscard]] int degree() const noexcept { return p_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(idx_.size()); }
  [[nodiscard]] std::pair<int, int> exponents(int k) const { return idx_[k]; }

  /// Values and (optionally) reference-coordinate derivatives of all P_k at (xi, eta).
  void eval(double xi, double eta, double* v, double* dxi = nullptr, double* deta = nullptr) const {
    double lx[kMaxDeg + 1];
    double dlx[kMaxDeg + 1];
    double ly[kMaxDeg + 1];
    double dly[kMaxDeg + 1];
    legendre(xi, lx, dlx);
    legendre(eta, ly, dly);
    for (int k = 0; k < size(); ++k) {
      const auto [a, b] = idx_[k];
      v[k] = lx[a] * ly[b];
      if (dxi) dxi[k] = dlx[a] * ly[b];
      if (deta) deta[k] = lx[a] * dly[b];
    }
  }

  static constexpr int kMaxDeg = 16;

 private:
  int p_;
  std::vector<std::pair<int, int>> idx_;

  // sqrt(2n+1) P_n(2t-1) and derivative in t
  void legendre(double t, double* l, double* dl) const {
    const double x = 2.0 * t - 1.0;
    double p0 = 1.0;
    double p1 = x;
    double d0 = 0.0;
    double d1 = 1.0;
    l[0] = 1.0;
    dl[0] = 0.0;
    if (p_ >= 1) {
      l[1] = std::sqrt(3.0) * x;
      dl[1] = 2.0 * std::sqrt(3.0);
    }
    for (int n = 2; n <= p_; ++n) {
      const double pn = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
      const double dn = d0 + (2.0 * n - 1.0) * p1;  // P_n' = P_{n-2}' + (2n-1) P_{n-1}
      p0 = p1;
      p1 = pn;
      d0 = d1;
      d1 = dn;
      const double s = std::sqrt(2.0 * n + 1.0);
      l[n] = s * pn;
      dl[n] = 2.0 * s * dn;
    }
  }
};

/// Orthonormal basis of one cell (or neighborhood) built from a weighted Vandermonde QR.
/// phi = V R^{-1} where V holds reference polynomials composed with the bounding-box map.
struct CellBasis {
  Vec2 box_min = Vec2::Zero();
  Vec2 box_size = Vec2::Ones();
  Matrix Rinv;  // Np x Np, upper triangular
  Matrix phi;   // at volume points, nq x Np
  Matrix dphidx;
  Matrix dphidy;

  /// Row of basis values at an arbitrary point.
  [[nodiscard]] Eigen::RowVectorXd eval(const ReferenceBasis& ref, const Vec2& x) const {
    Eigen::RowVectorXd v(ref.size());
    ref.eval((x.x() - box_min.x()) / box_size.x(), (x.y() - box_min.y()) / box_size.y(), v.data());
    return v * Rinv;
  }
  /// Basis values at a list of points, one row per point.
  [[nodiscard]] Matrix eval(const ReferenceBasis& ref, const std::vector<Vec2>& pts) const {
    Matrix V(pts.size(), ref.size());
    Eigen::RowVectorXd v(ref.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ref.eval((pts[i].x() - box_min.x()) / box_size.x(), (pts[i].y() - box_min.y()) / box_size.y(),
               v.data());
      V.row(static_cast<Eigen::Index>(i)) = v;
    }
    return V * Rinv;
  }
};

/// QR construction over points with (already normalized) inner-product weights; the weights
/// must sum to one for the volume-normalized product. With_gradients fills dphidx/dphidy.
[[nodiscard]] inline CellBasis build_weighted_basis(const ReferenceBasis& ref,
                                                    const std::vector<Vec2>& pts,
                                                    const std::vector<double>& weights,
                                                    const Vec2& box_min, const Vec2& box_size,
                                                    bool with_gradients = true) {
  const int np = ref.size();
  const auto nq = static_cast<Eigen::Index>(pts.size());
  if (nq < np) throw RankDeficient("basis: fewer quadrature points than basis functions");
  CellBasis b;
  b.box_min = box_min;
  b.box_size = box_size;
  Matrix V(nq, np);
  Matrix Vx(with_gradients ? nq : 0, np);
  Matrix Vy(with_gradients ? nq : 0, np);
  Eigen::RowVectorXd v(np);
  Eigen::RowVectorXd vx(np);
  Eigen::RowVectorXd vy(np);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double xi = (pts[q].x() - box_min.x()) / box_size.x();
    const double eta = (pts[q].y() - box_min.y()) / box_size.y();
    ref.eval(xi, eta, v.data(), vx.data(), vy.data());
    V.row(q) = v;
    if (with_gradients) {
      Vx.row(q) = vx / box_size.x();
      Vy.row(q) = vy / box_size.y();
    }
  }
  Matrix A(nq, np);
  for (Eigen::Index q = 0; q < nq; ++q) A.row(q) = std::sqrt(weights[q]) * V.row(q);
  Eigen::HouseholderQR<Matrix> qr(A);
  Matrix R = qr.matrixQR().topRows(np).triangularView<Eigen::Upper>();
  double rmax = 0.0;
  for (int k = 0; k < np; ++k) rmax = std::max(rmax, std::abs(R(k, k)));
  for (int k = 0; k < np; ++k) {
    if (std::abs(R(k, k)) < 1e-12 * rmax) throw RankDeficient("basis: R has a vanishing diagonal entry");
    if (R(k, k) < 0.0) R.row(k) *= -1.0;  // positive diagonal
  }
  b.Rinv = R.triangularView<Eigen::Upper>().solve(Matrix::Identity(np, np));
  b.phi = V * b.Rinv;
  if (with_gradients) {
    b.dphidx = Vx * b.Rinv;
    b.dphidy = Vy * b.Rinv;
  }
  return b;
}

/// Cell basis orthonormal under <f,g>_K = (1/|K|) sum_q w_q f(x_q) g(x_q), mapped through the
/// cell's bounding box.
[[nodiscard]] inline CellBasis build_cell_basis(const ReferenceBasis& ref, const VolumeRule& rule,
                                                const Vec2& box_min, const Vec2& box_size) {
  const double vol = rule.measure();
  std::vector<double> w(rule.weights);
  for (double& x : w) x /= vol;
  return build_weighted_basis(ref, rule.points, w, box_min, box_size);
}

/// U at the rows of a basis matrix: values = Phi * coeffs (coeffs is Np x m).
[[nodiscard]] inline Matrix evaluate_solution(const Matrix& phi, const Matrix& coeffs) {
  return phi * coeffs;
}

/// Discrete Gram matrix (1/|K|) Phi^T W Phi.
[[nodiscard]] inline Matrix gram(const Matrix& phi, const std::vector<double>& weights) {
  double vol = 0.0;
  for (double w : weights) vol += w;
  Matrix g = Matrix::Zero(phi.cols(), phi.cols());
  for (Eigen::Index q = 0; q < phi.rows(); ++q)
    g.noalias() += (weights[q] / vol) * phi.row(q).transpose() * phi.row(q);
  return g;
}

}  // namespace srdg
