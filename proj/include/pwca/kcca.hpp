#pragma once

#include <utility>
#include <vector>

#include "pwca/pwca.hpp"

namespace pwca {

// Regularized multi-view KCCA generalized eigenproblem C x = rho D x with
// C_ij = K_i K_j for i != j, C_ii = 0, and D = blockdiag((K_i + tau I)^2).
inline std::pair<SymMatrix, SymMatrix> assemble_kcca_system(
    const std::vector<KernelMatrix>& kernels, double tau) {
  if (kernels.size() < 2) throw TooFewViews("assemble_kcca_system: need s >= 2 views");
  if (!(tau > 0.0)) throw InvalidArgument("assemble_kcca_system: tau must be > 0");
  const Index l = kernels.front().n();
  for (const auto& K : kernels)
    if (K.n() != l) throw DimensionMismatch("assemble_kcca_system: kernel sizes differ");
  const Index s = static_cast<Index>(kernels.size());
  const Index n = s * l;

  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < s; ++i) {
    for (Index j = i + 1; j < s; ++j) {
      const Eigen::MatrixXd P =
          kernels[static_cast<std::size_t>(i)].mat() * kernels[static_cast<std::size_t>(j)].mat();
      C.block(i * l, j * l, l, l) = P;
      C.block(j * l, i * l, l, l) = P.transpose();
    }
    const Eigen::MatrixXd R =
        kernels[static_cast<std::size_t>(i)].mat() + tau * Eigen::MatrixXd::Identity(l, l);
    D.block(i * l, i * l, l, l) = R * R;
  }
  SymMatrix Dsym = SymMatrix::mirror_upper(D);
  cholesky(Dsym); // (K + tau I)^2 must be SPD; fail loudly at assembly otherwise
  return {SymMatrix::mirror_upper(C), std::move(Dsym)};
}

// KCCA baseline trained through the same model type and solver contract; the
// gammas field stores the correlations rho.
inline PwcaModel train_kcca(const std::vector<ViewMatrix>& views, const KernelSpec& spec,
                            double tau, Index k, const SolveOptions& opts = {}) {
  if (views.size() < 2) throw TooFewViews("train_kcca: need s >= 2 views");
  if (!(tau > 0.0)) throw InvalidArgument("train_kcca: tau must be > 0");
  const auto kernels = detail::grams(views, spec);
  auto [C, D] = assemble_kcca_system(kernels, tau);
  return detail::train_from_system(Method::kcca, C, D, views, spec, tau, k,
                                   {/*require_cluster_mass=*/false}, opts);
}

} // namespace pwca
