#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pwca/errors.hpp"
#include "pwca/numfmt.hpp"
#include "pwca/parallel.hpp"
#include "pwca/pwca.hpp"

namespace pwca {

// Mate-retrieval outcome for one query-view/target-view direction.
struct RetrievalReport {
  int query_view = 0;
  int target_view = 0;
  Index n_queries = 0;
  std::vector<Index> ranks; // 1-based mate rank per query
  double ap = 0.0;
  Method method = Method::pwca;
  Index k = 0;
  double tau = 0.0;
  std::uint64_t seed = 0; // provenance passthrough
};

// Rank of the mate among all scores under the pessimistic-stable tie rule:
// 1 + #{strictly better} + #{equal with smaller index}.
inline Index rank_of_mate(const Eigen::VectorXd& scores, Index mate_index) {
  const Index n = scores.size();
  if (mate_index < 0 || mate_index >= n)
    throw IndexOutOfRange("rank_of_mate: mate index out of range");
  const double m = scores(mate_index);
  Index rank = 1;
  for (Index j = 0; j < n; ++j) {
    if (j == mate_index) continue;
    if (scores(j) > m || (scores(j) == m && j < mate_index)) ++rank;
  }
  return rank;
}

// Mean reciprocal rank, summed in index order with Kahan compensation.
inline double average_precision(const std::vector<Index>& ranks) {
  if (ranks.empty()) throw EmptyInput("average_precision: no ranks");
  double sum = 0.0, comp = 0.0;
  for (Index r : ranks) {
    if (r < 1) throw OutOfRange("average_precision: rank < 1");
    const double y = 1.0 / static_cast<double>(r) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(ranks.size());
}

// Expected AP of uniformly random ranking: H_n / n.
inline double expected_random_ap(Index n) {
  if (n < 1) throw OutOfRange("expected_random_ap: n must be >= 1");
  double h = 0.0;
  for (Index i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
  return h / static_cast<double>(n);
}

namespace detail {

// Retrieval scores factor vectors by direction: embeddings are length-
// normalized before the absolute inner product, so a candidate whose factors
// are a scaled copy of the query's ranks first. Zero embeddings are left
// as-is and score 0 against everything.
inline void normalize_rows(Eigen::MatrixXd& E) {
  for (Index i = 0; i < E.rows(); ++i) {
    const double n = E.row(i).norm();
    if (n > 0.0) E.row(i) /= n;
  }
}

} // namespace detail

// Ranks, for each query in test_views[query_view], every candidate in
// test_views[target_view]; row i of the two views is the true mate pair.
inline RetrievalReport mate_retrieval(const PwcaModel& model,
                                      const std::vector<ViewMatrix>& test_views,
                                      int query_view, int target_view,
                                      std::uint64_t seed = 0) {
  if (query_view == target_view)
    throw InvalidArgument("mate_retrieval: query and target views must differ");
  if (query_view < 0 || target_view < 0 || query_view >= model.s || target_view >= model.s)
    throw DimensionMismatch("mate_retrieval: view index out of range");
  if (static_cast<int>(test_views.size()) != model.s)
    throw DimensionMismatch("mate_retrieval: test view count != s");
  const Index n = test_views[static_cast<std::size_t>(query_view)].rows();
  if (test_views[static_cast<std::size_t>(target_view)].rows() != n)
    throw DimensionMismatch("mate_retrieval: test views are not aligned");
  if (n < 1) throw EmptyInput("mate_retrieval: empty test set");

  Eigen::MatrixXd Q = project(model, query_view, test_views[static_cast<std::size_t>(query_view)]);
  Eigen::MatrixXd T = project(model, target_view, test_views[static_cast<std::size_t>(target_view)]);
  detail::normalize_rows(Q);
  detail::normalize_rows(T);

  RetrievalReport rep;
  rep.query_view = query_view;
  rep.target_view = target_view;
  rep.n_queries = n;
  rep.ranks.assign(static_cast<std::size_t>(n), 0);
  detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const Eigen::VectorXd scores = (T * Q.row(static_cast<Index>(i)).transpose()).cwiseAbs();
    rep.ranks[i] = rank_of_mate(scores, static_cast<Index>(i));
  });
  rep.ap = average_precision(rep.ranks);
  rep.method = model.method;
  rep.k = model.k;
  rep.tau = model.tau;
  rep.seed = seed;
  return rep;
}

inline std::string report_to_json(const RetrievalReport& r) {
  std::ostringstream os;
  os << "{\"ap\": " << fmt17(r.ap) << ", \"n_queries\": " << r.n_queries
     << ", \"method\": \"" << method_name(r.method) << "\", \"k\": " << r.k
     << ", \"tau\": " << fmt17(r.tau) << ", \"seed\": " << r.seed
     << ", \"query_view\": " << r.query_view << ", \"target_view\": " << r.target_view
     << "}\n";
  return os.str();
}

inline std::string ranks_to_csv(const RetrievalReport& r) {
  std::ostringstream os;
  os << "query_index,rank\n";
  for (std::size_t i = 0; i < r.ranks.size(); ++i) os << i << "," << r.ranks[i] << "\n";
  return os.str();
}

} // namespace pwca
