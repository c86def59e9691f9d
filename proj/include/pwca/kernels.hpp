#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "pwca/eigsolve.hpp"
#include "pwca/errors.hpp"
#include "pwca/parallel.hpp"

namespace pwca {

// One view's sample-by-feature data matrix; row i is aligned across views.
using ViewMatrix = Eigen::MatrixXd;

// A kernel matrix is symmetric and PSD up to round-off.
using KernelMatrix = SymMatrix;

enum class KernelKind { linear, rbf };

struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double bandwidth = 1.0; // rbf only
  bool center = false;

  void validate() const {
    if (kind == KernelKind::rbf && !(bandwidth > 0.0))
      throw InvalidArgument("KernelSpec: rbf bandwidth must be > 0");
  }
};

inline std::string kernel_kind_name(KernelKind k) {
  return k == KernelKind::linear ? "linear" : "rbf";
}

inline KernelKind kernel_kind_from_name(const std::string& s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "rbf") return KernelKind::rbf;
  throw InvalidArgument("unknown kernel kind: " + s);
}

namespace detail {

inline double kernel_entry(const KernelSpec& spec, const Eigen::MatrixXd& X, Index i,
                           const Eigen::MatrixXd& Y, Index j) {
  if (spec.kind == KernelKind::linear) {
    // fixed feature-order accumulation keeps parallel fills bit-identical
    double s = 0.0;
    for (Index f = 0; f < X.cols(); ++f) s += X(i, f) * Y(j, f);
    return s;
  }
  double d2 = 0.0;
  for (Index f = 0; f < X.cols(); ++f) {
    const double d = X(i, f) - Y(j, f);
    d2 += d * d;
  }
  return std::exp(-d2 / (2.0 * spec.bandwidth * spec.bandwidth));
}

} // namespace detail

// Gram matrix of one view: linear K = X X', or rbf with the given bandwidth.
// With spec.center, applies double-centering K <- H K H, H = I - ones/l.
inline KernelMatrix gram(const ViewMatrix& X, const KernelSpec& spec) {
  spec.validate();
  const Index l = X.rows();
  if (l < 1 || X.cols() < 1) throw DimensionMismatch("gram: empty view");
  Eigen::MatrixXd K(l, l);
  detail::parallel_for(static_cast<std::size_t>(l), [&](std::size_t ii) {
    const Index i = static_cast<Index>(ii);
    for (Index j = i; j < l; ++j) K(i, j) = detail::kernel_entry(spec, X, i, X, j);
  });
  if (spec.center) {
    // Centered entry: K_ij - rowmean_i - colmean_j + totalmean, evaluated on
    // the upper triangle so symmetry stays exact.
    Eigen::VectorXd rowmean(l);
    for (Index i = 0; i < l; ++i) {
      double s = 0.0;
      for (Index j = 0; j < i; ++j) s += K(j, i);
      for (Index j = i; j < l; ++j) s += K(i, j);
      rowmean(i) = s / static_cast<double>(l);
    }
    const double total = rowmean.sum() / static_cast<double>(l);
    for (Index i = 0; i < l; ++i)
      for (Index j = i; j < l; ++j) K(i, j) += total - rowmean(i) - rowmean(j);
  }
  return SymMatrix::mirror_upper(K);
}

// Cross-kernel block, entry (i,j) = kernel(new_i, train_j). Under centering
// the training-set statistics are applied to the cross block.
inline Eigen::MatrixXd cross_gram(const ViewMatrix& X_train, const ViewMatrix& X_new,
                                  const KernelSpec& spec) {
  spec.validate();
  if (X_train.cols() != X_new.cols())
    throw DimensionMismatch("cross_gram: feature dimensions differ");
  const Index lt = X_train.rows();
  const Index ln = X_new.rows();
  Eigen::MatrixXd C(ln, lt);
  detail::parallel_for(static_cast<std::size_t>(ln), [&](std::size_t ii) {
    const Index i = static_cast<Index>(ii);
    for (Index j = 0; j < lt; ++j) C(i, j) = detail::kernel_entry(spec, X_new, i, X_train, j);
  });
  if (spec.center) {
    KernelSpec raw = spec;
    raw.center = false;
    const Eigen::MatrixXd K = gram(X_train, raw).mat();
    const Eigen::VectorXd colmean = K.colwise().mean();
    const double total = colmean.mean();
    const Eigen::VectorXd crossrow = C.rowwise().mean();
    for (Index i = 0; i < ln; ++i)
      for (Index j = 0; j < lt; ++j) C(i, j) += total - crossrow(i) - colmean(j);
  }
  return C;
}

} // namespace pwca
