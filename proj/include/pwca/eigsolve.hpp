#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "pwca/errors.hpp"

namespace pwca {

using Eigen::Index;

// Dense symmetric matrix. Storage is mirrored from the upper triangle, so
// entries(i,j) == entries(j,i) holds exactly, not just up to round-off.
class SymMatrix {
 public:
  SymMatrix() = default;

  // Validating constructor: requires exact symmetry and finite entries.
  explicit SymMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("SymMatrix: matrix not square");
    for (Index i = 0; i < m_.rows(); ++i)
      for (Index j = 0; j <= i; ++j) {
        if (!std::isfinite(m_(i, j))) throw DataError("SymMatrix: non-finite entry");
        if (m_(i, j) != m_(j, i)) throw DataError("SymMatrix: entries not exactly symmetric");
      }
  }

  // Builds from the upper triangle (diagonal included); lower is mirrored.
  static SymMatrix mirror_upper(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("SymMatrix: matrix not square");
    Eigen::MatrixXd r = m;
    for (Index i = 0; i < r.rows(); ++i)
      for (Index j = i + 1; j < r.cols(); ++j) r(j, i) = r(i, j);
    SymMatrix out;
    out.m_ = std::move(r);
    return out;
  }

  Index n() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

// Cholesky factor; diagonal entries are strictly positive by construction.
struct LowerTriangular {
  Eigen::MatrixXd m;
  Index n() const { return m.rows(); }
};

// Result of a generalized symmetric-definite eigensolve. Values are sorted
// descending; each vector has unit Euclidean norm and its largest-magnitude
// entry is positive (first such entry on ties). residuals(j) is the
// normalized residual of pair j.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors; // one column per value
  Eigen::VectorXd residuals;
};

struct SolveOptions {
  double residual_tol = 1e-8;  // accept an eigenpair only below this
  double chol_pivot_rel = 1e-14; // pivot threshold factor, scaled by n*max diag
};

// Lower Cholesky factorization M = L L'. Fails with NotPositiveDefinite when
// a pivot falls at or below n * chol_pivot_rel * max(diag M).
inline LowerTriangular cholesky(const SymMatrix& M, const SolveOptions& opts = {}) {
  const Index n = M.n();
  const Eigen::MatrixXd& A = M.mat();
  double max_diag = 0.0;
  for (Index i = 0; i < n; ++i) max_diag = std::max(max_diag, A(i, i));
  const double pivot_floor = static_cast<double>(n) * opts.chol_pivot_rel * max_diag;

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = A(j, j);
    for (Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (d <= pivot_floor) throw NotPositiveDefinite("cholesky: pivot " + std::to_string(d) +
                                                    " at column " + std::to_string(j));
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (Index i = j + 1; i < n; ++i) {
      double s = A(i, j);
      for (Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
  return LowerTriangular{std::move(L)};
}

// Normalized residual ||A x - g B x||_inf / ((||A||_inf + |g| ||B||_inf) ||x||_inf),
// matrix norms being the induced max-absolute-row-sum norm.
inline double residual(const SymMatrix& A, const SymMatrix& B, double gamma,
                       const Eigen::VectorXd& x) {
  if (A.n() != B.n() || A.n() != x.size())
    throw DimensionMismatch("residual: dimension mismatch");
  const double xinf = x.cwiseAbs().maxCoeff();
  if (xinf == 0.0) throw InvalidArgument("residual: x must be nonzero");
  const Eigen::VectorXd r = A.mat() * x - gamma * (B.mat() * x);
  const double a_inf = A.mat().cwiseAbs().rowwise().sum().maxCoeff();
  const double b_inf = B.mat().cwiseAbs().rowwise().sum().maxCoeff();
  return r.cwiseAbs().maxCoeff() / ((a_inf + std::abs(gamma) * b_inf) * xinf);
}

namespace detail {

// Sign convention: make the first entry of largest magnitude positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Index imax = 0;
  double best = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  if (v(imax) < 0.0) v = -v;
}

} // namespace detail

// Top-k eigenpairs of A x = gamma B x (A symmetric, B SPD), descending gamma.
// Route: B = L L', standard symmetric solve of L^-1 A L^-T, back-transform
// x = L^-T y, unit-normalize, fix signs. Deterministic for identical inputs.
inline EigenPairs solve_gsym_eig(const SymMatrix& A, const SymMatrix& B, Index k,
                                 const SolveOptions& opts = {}) {
  const Index n = A.n();
  if (B.n() != n) throw DimensionMismatch("solve_gsym_eig: A and B differ in size");
  if (k < 1 || k > n) throw DimensionMismatch("solve_gsym_eig: k out of range");

  const LowerTriangular L = cholesky(B, opts);
  const auto Lview = L.m.triangularView<Eigen::Lower>();
  // W = L^-1 A L^-T, symmetrized to kill the asymmetry of two triangular solves.
  Eigen::MatrixXd T1 = Lview.solve(A.mat());
  Eigen::MatrixXd W = Lview.solve(T1.transpose());
  W = 0.5 * (W + W.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  if (es.info() != Eigen::Success)
    throw NumericalError("solve_gsym_eig: symmetric eigensolver failed");

  EigenPairs out;
  out.values.resize(k);
  out.vectors.resize(n, k);
  out.residuals.resize(k);
  for (Index j = 0; j < k; ++j) {
    const Index src = n - 1 - j; // Eigen sorts ascending
    out.values(j) = es.eigenvalues()(src);
    Eigen::VectorXd x = L.m.transpose().triangularView<Eigen::Upper>().solve(
        es.eigenvectors().col(src));
    x /= x.norm();
    detail::fix_sign(x);
    out.vectors.col(j) = x;
    out.residuals(j) = residual(A, B, out.values(j), x);
    if (!(out.residuals(j) <= opts.residual_tol))
      throw NumericalError("solve_gsym_eig: eigenpair " + std::to_string(j) +
                           " residual " + std::to_string(out.residuals(j)) +
                           " exceeds tolerance");
  }
  return out;
}

} // namespace pwca
