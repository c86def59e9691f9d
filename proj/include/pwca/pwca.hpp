#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "pwca/eigsolve.hpp"
#include "pwca/errors.hpp"
#include "pwca/kernels.hpp"

namespace pwca {

enum class Method { pwca, kcca };

inline std::string method_name(Method m) { return m == Method::pwca ? "pwca" : "kcca"; }
inline Method method_from_name(const std::string& s) {
  if (s == "pwca") return Method::pwca;
  if (s == "kcca") return Method::kcca;
  throw InvalidArgument("unknown method: " + s);
}

// One projected sample: k semantic factors.
using Embedding = Eigen::VectorXd;

// Trained model. duals[v] is l x k: column j holds view v's dual coefficients
// for component j; the stacked column over all views is a unit-norm eigenvector
// of the method's block system, with eigenvalue gammas(j).
struct PwcaModel {
  Method method = Method::pwca;
  int s = 0;
  Index l = 0;
  double tau = 0.0;
  Index k = 0;
  Eigen::VectorXd gammas;
  std::vector<Eigen::MatrixXd> duals;
  KernelSpec kernel_spec;
  std::vector<ViewMatrix> train_views;
  std::vector<std::string> train_view_paths; // may be empty when trained in memory
};

// Relative threshold below which trailing components are dropped.
inline constexpr double kComponentDropRel = 1e-10;
// A component whose summed dual blocks vanish cannot be rescaled to satisfy
// the unit cluster-weight normalization c'c = 1; such eigenpairs are
// artifacts of the tau-regularized right-hand side and are excluded.
inline constexpr double kClusterMassTol = 1e-8;

// Block system of the pairwise analysis: A = blockdiag(K_1..K_s),
// B = ones(s,s) (x) I_l + tau I_{sl}.
inline std::pair<SymMatrix, SymMatrix> assemble_pwca_system(
    const std::vector<KernelMatrix>& kernels, double tau) {
  if (kernels.size() < 2) throw TooFewViews("assemble_pwca_system: need s >= 2 views");
  if (tau < 0.0) throw InvalidArgument("assemble_pwca_system: tau must be >= 0");
  const Index l = kernels.front().n();
  for (const auto& K : kernels)
    if (K.n() != l) throw DimensionMismatch("assemble_pwca_system: kernel sizes differ");
  const Index s = static_cast<Index>(kernels.size());
  const Index n = s * l;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (Index v = 0; v < s; ++v) {
    A.block(v * l, v * l, l, l) = kernels[static_cast<std::size_t>(v)].mat();
    for (Index w = 0; w < s; ++w)
      B.block(v * l, w * l, l, l) =
          (v == w) ? ((1.0 + tau) * Eigen::MatrixXd::Identity(l, l)).eval()
                   : Eigen::MatrixXd::Identity(l, l).eval();
  }
  return {SymMatrix::mirror_upper(A), SymMatrix::mirror_upper(B)};
}

namespace detail {

struct ComponentFilter {
  bool require_cluster_mass = false; // pwca: exclude vanishing c = sum of blocks
};

// Shared selection: solve the full spectrum, filter, keep the leading k.
inline PwcaModel train_from_system(Method method, const SymMatrix& A, const SymMatrix& B,
                                   const std::vector<ViewMatrix>& views,
                                   const KernelSpec& spec, double tau, Index k,
                                   const ComponentFilter& filter, const SolveOptions& opts) {
  const Index s = static_cast<Index>(views.size());
  const Index l = views.front().rows();
  const Index n = s * l;
  if (k < 1 || k > n) throw InvalidArgument("train: k must lie in [1, s*l]");

  const EigenPairs full = solve_gsym_eig(A, B, n, opts);

  std::vector<Index> keep;
  keep.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    if (filter.require_cluster_mass) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(l);
      for (Index v = 0; v < s; ++v) c += full.vectors.col(j).segment(v * l, l);
      if (c.norm() <= kClusterMassTol) continue;
    }
    keep.push_back(j);
  }
  if (keep.empty()) throw NumericalError("train: no feasible components");

  const double gamma_top = full.values(keep.front());
  std::vector<Index> retained;
  for (Index j : keep) {
    if (full.values(j) <= kComponentDropRel * gamma_top) break; // sorted descending
    retained.push_back(j);
  }
  if (retained.empty()) throw NumericalError("train: all components below drop threshold");
  if (static_cast<Index>(retained.size()) > k) retained.resize(static_cast<std::size_t>(k));

  PwcaModel model;
  model.method = method;
  model.s = static_cast<int>(s);
  model.l = l;
  model.tau = tau;
  model.k = static_cast<Index>(retained.size());
  model.gammas.resize(model.k);
  model.duals.assign(static_cast<std::size_t>(s), Eigen::MatrixXd(l, model.k));
  for (Index jj = 0; jj < model.k; ++jj) {
    const Index j = retained[static_cast<std::size_t>(jj)];
    model.gammas(jj) = full.values(j);
    for (Index v = 0; v < s; ++v)
      model.duals[static_cast<std::size_t>(v)].col(jj) = full.vectors.col(j).segment(v * l, l);
  }
  model.kernel_spec = spec;
  model.train_views = views;
  return model;
}

inline std::vector<KernelMatrix> grams(const std::vector<ViewMatrix>& views,
                                       const KernelSpec& spec) {
  const Index l = views.front().rows();
  std::vector<KernelMatrix> kernels;
  kernels.reserve(views.size());
  for (const auto& X : views) {
    if (X.rows() != l) throw DimensionMismatch("train: views are not aligned");
    kernels.push_back(gram(X, spec));
  }
  return kernels;
}

} // namespace detail

// Trains the pairwise model: top-k feasible eigenpairs of the block system.
inline PwcaModel train_pwca(const std::vector<ViewMatrix>& views, const KernelSpec& spec,
                            double tau, Index k, const SolveOptions& opts = {}) {
  if (views.size() < 2) throw TooFewViews("train_pwca: need s >= 2 views");
  if (!(tau > 0.0)) throw InvalidArgument("train_pwca: tau must be > 0");
  const auto kernels = detail::grams(views, spec);
  auto [A, B] = assemble_pwca_system(kernels, tau);
  return detail::train_from_system(Method::pwca, A, B, views, spec, tau, k,
                                   {/*require_cluster_mass=*/true}, opts);
}

// Stationarity residuals, one per (view, component):
// ||K_v a_v - gamma (sum_m a_m + tau a_v)||_inf over the block-system scale.
inline Eigen::MatrixXd validate_stationarity(const PwcaModel& model,
                                             const std::vector<KernelMatrix>& kernels) {
  const Index s = model.s;
  const Index l = model.l;
  if (static_cast<Index>(kernels.size()) != s)
    throw DimensionMismatch("validate_stationarity: kernel count != s");
  for (const auto& K : kernels)
    if (K.n() != l) throw DimensionMismatch("validate_stationarity: kernel size != l");

  double a_inf = 0.0;
  for (const auto& K : kernels)
    a_inf = std::max(a_inf, K.mat().cwiseAbs().rowwise().sum().maxCoeff());
  const double b_inf = static_cast<double>(s) + model.tau;

  Eigen::MatrixXd res(s, model.k);
  for (Index j = 0; j < model.k; ++j) {
    Eigen::VectorXd csum = Eigen::VectorXd::Zero(l);
    double xinf = 0.0;
    for (Index v = 0; v < s; ++v) {
      csum += model.duals[static_cast<std::size_t>(v)].col(j);
      xinf = std::max(xinf, model.duals[static_cast<std::size_t>(v)].col(j).cwiseAbs().maxCoeff());
    }
    const double gamma = model.gammas(j);
    const double denom = (a_inf + std::abs(gamma) * b_inf) * xinf;
    for (Index v = 0; v < s; ++v) {
      const Eigen::VectorXd& av = model.duals[static_cast<std::size_t>(v)].col(j);
      const Eigen::VectorXd r =
          kernels[static_cast<std::size_t>(v)].mat() * av - gamma * (csum + model.tau * av);
      res(v, j) = r.cwiseAbs().maxCoeff() / denom;
    }
  }
  return res;
}

// Projects queries into the learnt space. PWCA scales component j by
// 1/gamma_j; KCCA uses the plain dual contraction.
inline Eigen::MatrixXd project(const PwcaModel& model, int view_index,
                               const ViewMatrix& queries) {
  if (view_index < 0 || view_index >= model.s)
    throw DimensionMismatch("project: view index out of range");
  if (model.train_views.empty())
    throw DataError("project: model carries no training views");
  const ViewMatrix& train = model.train_views[static_cast<std::size_t>(view_index)];
  if (queries.cols() != train.cols())
    throw DimensionMismatch("project: query feature dimension mismatch");
  const Eigen::MatrixXd C = cross_gram(train, queries, model.kernel_spec);
  Eigen::MatrixXd E = C * model.duals[static_cast<std::size_t>(view_index)];
  if (model.method == Method::pwca)
    for (Index j = 0; j < model.k; ++j) E.col(j) /= model.gammas(j);
  return E; // one row per query
}

// Absolute inner product of two factor vectors.
inline double similarity(const Embedding& e1, const Embedding& e2) {
  if (e1.size() != e2.size()) throw DimensionMismatch("similarity: sizes differ");
  return std::abs(e1.dot(e2));
}

// 1-based index of the largest-magnitude factor (first index on ties).
inline Index assign_cluster(const Embedding& e) {
  if (e.size() == 0) throw EmptyEmbedding("assign_cluster: empty embedding");
  Index best = 0;
  double bestv = std::abs(e(0));
  for (Index j = 1; j < e.size(); ++j) {
    const double a = std::abs(e(j));
    if (a > bestv) {
      bestv = a;
      best = j;
    }
  }
  return best + 1;
}

} // namespace pwca
