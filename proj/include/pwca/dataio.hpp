#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pwca/errors.hpp"
#include "pwca/kernels.hpp"
#include "pwca/numfmt.hpp"
#include "pwca/rng.hpp"

namespace pwca {

// Aligned multi-view dataset: row i of every view is one paired observation.
struct AlignedDataset {
  std::vector<ViewMatrix> views;
  std::vector<std::string> names;
  std::string provenance;

  Index rows() const { return views.empty() ? 0 : views.front().rows(); }
};

// View file format:
//   %%PWCA-VIEW <rows> <cols> <nnz>
//   <row> <col> <value>        (nnz lines, 0-based, duplicates forbidden)
inline ViewMatrix load_view(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty file");
  std::istringstream header(line);
  std::string magic;
  Index rows = 0, cols = 0;
  std::int64_t nnz = -1;
  header >> magic >> rows >> cols >> nnz;
  if (magic != "%%PWCA-VIEW" || header.fail())
    throw ParseError(path + ":1: expected '%%PWCA-VIEW <rows> <cols> <nnz>'");
  if (rows < 1 || cols < 1 || nnz < 0)
    throw DimensionMismatch(path + ":1: invalid dimensions");

  ViewMatrix X = ViewMatrix::Zero(rows, cols);
  std::set<std::pair<Index, Index>> seen;
  std::int64_t read = 0;
  for (std::int64_t t = 0; t < nnz; ++t) {
    if (!std::getline(in, line))
      throw ParseError(path + ":" + std::to_string(t + 2) + ": expected " +
                       std::to_string(nnz) + " triplets, got " + std::to_string(read));
    const std::string where = path + ":" + std::to_string(t + 2) + ": ";
    std::istringstream ls(line);
    Index r = -1, c = -1;
    double v = 0.0;
    ls >> r >> c >> v;
    if (ls.fail()) throw ParseError(where + "malformed triplet '" + line + "'");
    if (r < 0 || r >= rows || c < 0 || c >= cols)
      throw ParseError(where + "index out of range");
    if (!std::isfinite(v)) throw ParseError(where + "non-finite value");
    if (!seen.insert({r, c}).second) throw ParseError(where + "duplicate (row,col) triplet");
    X(r, c) = v;
    ++read;
  }
  return X;
}

// Round-trip exact: nonzeros written row-major with 17 significant digits.
inline void save_view(const ViewMatrix& X, const std::string& path) {
  std::ostringstream os;
  std::int64_t nnz = 0;
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j)
      if (X(i, j) != 0.0) ++nnz;
  os << "%%PWCA-VIEW " << X.rows() << " " << X.cols() << " " << nnz << "\n";
  for (Index i = 0; i < X.rows(); ++i)
    for (Index j = 0; j < X.cols(); ++j)
      if (X(i, j) != 0.0) os << i << " " << j << " " << fmt17(X(i, j)) << "\n";
  write_text_file(path, os.str());
}

// Synthetic aligned corpus: latent t_i in R^p, view v row i = t_i M_v' + sigma*noise,
// M_v having orthonormal columns. Sub-streams are derived with mix_seed:
// latent = (seed, 0), map of view v = (seed, 1+2v), noise of view v = (seed, 2+2v).
struct SyntheticConfig {
  Index l_total = 0;
  int s = 2;
  Index latent_dim = 0;
  std::vector<Index> dims;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> map_seeds; // optional per-view override

  void validate() const {
    if (l_total < 1) throw InvalidConfig("SyntheticConfig: l_total must be >= 1");
    if (s < 2) throw InvalidConfig("SyntheticConfig: need s >= 2 views");
    if (static_cast<int>(dims.size()) != s)
      throw InvalidConfig("SyntheticConfig: dims must list one dimension per view");
    if (latent_dim < 1) throw InvalidConfig("SyntheticConfig: latent_dim must be >= 1");
    for (Index d : dims)
      if (d < latent_dim) throw InvalidConfig("SyntheticConfig: latent_dim exceeds a view dim");
    if (!(sigma >= 0.0)) throw InvalidConfig("SyntheticConfig: sigma must be >= 0");
    if (!map_seeds.empty() && static_cast<int>(map_seeds.size()) != s)
      throw InvalidConfig("SyntheticConfig: map_seeds must be empty or one per view");
  }
};

namespace detail {

// Random d x p matrix with orthonormal columns: Gaussian fill, then modified
// Gram-Schmidt applied twice.
inline Eigen::MatrixXd orthonormal_map(Index d, Index p, std::uint64_t seed) {
  NormalSampler normal(seed);
  Eigen::MatrixXd M(d, p);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < p; ++j) M(i, j) = normal();
  for (int pass = 0; pass < 2; ++pass) {
    for (Index j = 0; j < p; ++j) {
      for (Index k = 0; k < j; ++k) M.col(j) -= M.col(k).dot(M.col(j)) * M.col(k);
      const double norm = M.col(j).norm();
      if (norm < 1e-12) throw NumericalError("orthonormal_map: degenerate column");
      M.col(j) /= norm;
    }
  }
  return M;
}

} // namespace detail

inline AlignedDataset synth_generate(const SyntheticConfig& cfg) {
  cfg.validate();
  AlignedDataset ds;
  ds.provenance = "synth seed=" + std::to_string(cfg.seed);

  NormalSampler latent(mix_seed(cfg.seed, 0));
  Eigen::MatrixXd T(cfg.l_total, cfg.latent_dim);
  for (Index i = 0; i < cfg.l_total; ++i)
    for (Index j = 0; j < cfg.latent_dim; ++j) T(i, j) = latent();

  for (int v = 0; v < cfg.s; ++v) {
    const Index d = cfg.dims[static_cast<std::size_t>(v)];
    const std::uint64_t map_seed = cfg.map_seeds.empty()
                                       ? mix_seed(cfg.seed, 1 + 2 * static_cast<std::uint64_t>(v))
                                       : cfg.map_seeds[static_cast<std::size_t>(v)];
    const Eigen::MatrixXd M = detail::orthonormal_map(d, cfg.latent_dim, map_seed);
    ViewMatrix X = T * M.transpose();
    if (cfg.sigma > 0.0) {
      NormalSampler noise(mix_seed(cfg.seed, 2 + 2 * static_cast<std::uint64_t>(v)));
      for (Index i = 0; i < cfg.l_total; ++i)
        for (Index j = 0; j < d; ++j) X(i, j) += cfg.sigma * noise();
    }
    ds.views.push_back(std::move(X));
    ds.names.push_back("view" + std::to_string(v));
  }
  return ds;
}

// Seeded train/test split; one permutation applied to every view.
struct SplitSpec {
  Index n_train = 0;
  Index n_test = 0;
  std::uint64_t seed = 0;
};

inline std::pair<AlignedDataset, AlignedDataset> split(const AlignedDataset& ds,
                                                       const SplitSpec& spec) {
  const Index l = ds.rows();
  if (spec.n_train < 1 || spec.n_test < 1 || spec.n_train + spec.n_test > l)
    throw InvalidSplit("split: need n_train + n_test <= rows with both positive");
  const auto perm = seeded_permutation(static_cast<std::size_t>(l), spec.seed);

  AlignedDataset train, test;
  train.names = ds.names;
  test.names = ds.names;
  train.provenance = ds.provenance + " train";
  test.provenance = ds.provenance + " test";
  for (const auto& X : ds.views) {
    ViewMatrix tr(spec.n_train, X.cols());
    ViewMatrix te(spec.n_test, X.cols());
    for (Index i = 0; i < spec.n_train; ++i) tr.row(i) = X.row(static_cast<Index>(perm[static_cast<std::size_t>(i)]));
    for (Index i = 0; i < spec.n_test; ++i)
      te.row(i) = X.row(static_cast<Index>(perm[static_cast<std::size_t>(spec.n_train + i)]));
    train.views.push_back(std::move(tr));
    test.views.push_back(std::move(te));
  }
  return {std::move(train), std::move(test)};
}

// TF-IDF reweighting: entry <- tf * max(0, ln(l / (1 + df_col))).
inline ViewMatrix tfidf(const ViewMatrix& X) {
  const Index l = X.rows();
  ViewMatrix out(l, X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    Index df = 0;
    for (Index i = 0; i < l; ++i) {
      if (X(i, j) < 0.0) throw NegativeEntry("tfidf: negative entry");
      if (X(i, j) > 0.0) ++df;
    }
    const double w =
        std::max(0.0, std::log(static_cast<double>(l) / (1.0 + static_cast<double>(df))));
    for (Index i = 0; i < l; ++i) out(i, j) = X(i, j) * w;
  }
  return out;
}

// Dataset manifest: {"views": [paths], "names": [labels], "seed": n}.
inline std::string manifest_to_json(const std::vector<std::string>& view_paths,
                                    const std::vector<std::string>& names,
                                    std::uint64_t seed) {
  nlohmann::json j;
  j["views"] = view_paths;
  j["names"] = names;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

struct Manifest {
  std::vector<std::string> views;
  std::vector<std::string> names;
  std::uint64_t seed = 0;
};

inline Manifest load_manifest(const std::string& path) {
  Manifest m;
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    for (const auto& p : j.at("views")) m.views.push_back(p.get<std::string>());
    if (j.contains("names"))
      for (const auto& p : j.at("names")) m.names.push_back(p.get<std::string>());
    if (j.contains("seed")) m.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest " + path + ": " + e.what());
  }
  return m;
}

} // namespace pwca
