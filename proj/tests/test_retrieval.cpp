#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pwca/dataio.hpp"
#include "pwca/report_table.hpp"
#include "pwca/retrieval.hpp"
#include "pwca/rng.hpp"

using namespace pwca;

namespace {

ViewMatrix random_view(Index l, Index d, std::uint64_t seed) {
  NormalSampler normal(seed);
  ViewMatrix X(l, d);
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < d; ++j) X(i, j) = normal();
  return X;
}

} // namespace

TEST_CASE("rank_of_mate") {
  SECTION("strictly highest score ranks first") {
    Eigen::Vector3d s(0.2, 0.9, 0.5);
    REQUIRE(rank_of_mate(s, 1) == 1);
  }
  SECTION("tie with an earlier index counts against the mate") {
    Eigen::Vector3d s(0.9, 0.9, 0.1);
    REQUIRE(rank_of_mate(s, 1) == 2);
    REQUIRE(rank_of_mate(s, 0) == 1);
  }
  SECTION("all equal, mate last") {
    Eigen::VectorXd s = Eigen::VectorXd::Constant(6, 0.4);
    REQUIRE(rank_of_mate(s, 5) == 6);
  }
  SECTION("index bounds") {
    Eigen::Vector2d s(0.1, 0.2);
    REQUIRE_THROWS_AS(rank_of_mate(s, -1), IndexOutOfRange);
    REQUIRE_THROWS_AS(rank_of_mate(s, 2), IndexOutOfRange);
  }
}

TEST_CASE("average_precision") {
  REQUIRE(average_precision({2, 2, 2, 2}) == 0.5);
  REQUIRE(average_precision({1, 2, 3}) == Catch::Approx(11.0 / 18.0).margin(1e-15));
  REQUIRE(average_precision({1, 1, 1}) == 1.0);
  REQUIRE_THROWS_AS(average_precision({}), EmptyInput);
  REQUIRE_THROWS_AS(average_precision({0}), OutOfRange);
}

TEST_CASE("expected_random_ap") {
  REQUIRE(expected_random_ap(1) == 1.0);
  REQUIRE(expected_random_ap(2) == 0.75);
  REQUIRE(expected_random_ap(200) == Catch::Approx(0.029390154740607223).margin(1e-12));
  REQUIRE_THROWS_AS(expected_random_ap(0), OutOfRange);
}

TEST_CASE("monotonicity: improving the mate's score never worsens its rank") {
  std::mt19937_64 gen(5);
  Eigen::VectorXd s(20);
  for (Index i = 0; i < 20; ++i) s(i) = uniform01(gen);
  const Index mate = 7;
  Index prev = rank_of_mate(s, mate);
  for (int step = 0; step < 30; ++step) {
    s(mate) += 0.05;
    const Index r = rank_of_mate(s, mate);
    REQUIRE(r <= prev);
    prev = r;
  }
  REQUIRE(prev == 1);
}

TEST_CASE("permutation invariance of ranks under distinct scores") {
  std::mt19937_64 gen(6);
  const Index n = 15;
  Eigen::VectorXd s(n);
  for (Index i = 0; i < n; ++i) s(i) = static_cast<double>(i) + uniform01(gen) * 0.5;
  const auto perm = seeded_permutation(static_cast<std::size_t>(n), 9);
  Eigen::VectorXd sp(n);
  for (Index i = 0; i < n; ++i) sp(i) = s(static_cast<Index>(perm[static_cast<std::size_t>(i)]));
  for (Index i = 0; i < n; ++i) {
    Index where = 0;
    while (static_cast<Index>(perm[static_cast<std::size_t>(where)]) != i) ++where;
    REQUIRE(rank_of_mate(sp, where) == rank_of_mate(s, i));
  }
}

TEST_CASE("self-retrieval on identical views is perfect") {
  const auto X = random_view(10, 6, 11);
  const auto model = train_pwca({X, X}, KernelSpec{}, 0.01, 5);
  const auto Q = random_view(8, 6, 12);
  const auto rep = mate_retrieval(model, {Q, Q}, 0, 1);
  REQUIRE(rep.ap == 1.0);
  REQUIRE(rep.n_queries == 8);
  for (const Index r : rep.ranks) REQUIRE(r == 1);
}

TEST_CASE("single test pair gives AP 1 regardless of model") {
  const auto model =
      train_pwca({random_view(5, 3, 21), random_view(5, 3, 22)}, KernelSpec{}, 0.01, 3);
  const auto rep = mate_retrieval(model, {random_view(1, 3, 23), random_view(1, 3, 24)}, 0, 1);
  REQUIRE(rep.ap == 1.0);
}

TEST_CASE("report invariants: recomputability and bounds") {
  const auto model =
      train_pwca({random_view(30, 5, 31), random_view(30, 5, 32)}, KernelSpec{}, 0.01, 10);
  const std::vector<ViewMatrix> test{random_view(25, 5, 33), random_view(25, 5, 34)};
  for (const auto& [q, t] : {std::pair{0, 1}, std::pair{1, 0}}) {
    const auto rep = mate_retrieval(model, test, q, t, 42);
    REQUIRE(rep.ap == average_precision(rep.ranks));
    REQUIRE(rep.ap >= 1.0 / static_cast<double>(rep.n_queries));
    REQUIRE(rep.ap <= 1.0);
    for (const Index r : rep.ranks) {
      REQUIRE(r >= 1);
      REQUIRE(r <= rep.n_queries);
    }
    REQUIRE(rep.seed == 42);
  }
}

TEST_CASE("random embeddings score near the harmonic baseline") {
  // Monte-Carlo oracle: with the model replaced by seeded random projections
  // the mate rank is uniform, so E[AP] = H_n/n. 50 trials, n = 200 candidates.
  const Index n = 200;
  const Index dim = 8;
  double mean_ap = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    NormalSampler normal(400 + seed);
    Eigen::MatrixXd Q(n, dim), T(n, dim);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < dim; ++j) Q(i, j) = normal();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < dim; ++j) T(i, j) = normal();
    std::vector<Index> ranks;
    for (Index i = 0; i < n; ++i) {
      Eigen::VectorXd scores(n);
      for (Index j = 0; j < n; ++j) scores(j) = similarity(Q.row(i), T.row(j));
      ranks.push_back(rank_of_mate(scores, i));
    }
    mean_ap += average_precision(ranks);
  }
  mean_ap /= 50.0;
  REQUIRE(mean_ap == Catch::Approx(expected_random_ap(n)).margin(0.01));
}

TEST_CASE("noiseless synthetic pairs with p = d retrieve perfectly") {
  SyntheticConfig cfg;
  cfg.l_total = 60;
  cfg.s = 2;
  cfg.latent_dim = 15;
  cfg.dims = {15, 15};
  cfg.sigma = 0.0;
  cfg.seed = 3;
  const auto ds = synth_generate(cfg);
  const auto [train, test] = split(ds, SplitSpec{40, 20, 3});
  const auto model = train_pwca(train.views, KernelSpec{}, 0.01, 20);
  REQUIRE(mate_retrieval(model, test.views, 0, 1).ap == 1.0);
  REQUIRE(mate_retrieval(model, test.views, 1, 0).ap == 1.0);
}

TEST_CASE("per-query scoring is identical across thread counts") {
  const auto model =
      train_pwca({random_view(20, 4, 41), random_view(20, 4, 42)}, KernelSpec{}, 0.01, 8);
  const std::vector<ViewMatrix> test{random_view(30, 4, 43), random_view(30, 4, 44)};
  setenv("PWCA_THREADS", "1", 1);
  const auto r1 = mate_retrieval(model, test, 0, 1);
  setenv("PWCA_THREADS", "7", 1);
  const auto r7 = mate_retrieval(model, test, 0, 1);
  unsetenv("PWCA_THREADS");
  REQUIRE(r1.ranks == r7.ranks);
  REQUIRE(r1.ap == r7.ap);
}

TEST_CASE("mate_retrieval input validation") {
  const auto model =
      train_pwca({random_view(6, 3, 51), random_view(6, 3, 52)}, KernelSpec{}, 0.01, 3);
  const std::vector<ViewMatrix> test{random_view(4, 3, 53), random_view(4, 3, 54)};
  REQUIRE_THROWS_AS(mate_retrieval(model, test, 0, 0), InvalidArgument);
  REQUIRE_THROWS_AS(mate_retrieval(model, test, 0, 2), DimensionMismatch);
  const std::vector<ViewMatrix> misaligned{random_view(4, 3, 55), random_view(5, 3, 56)};
  REQUIRE_THROWS_AS(mate_retrieval(model, misaligned, 0, 1), DimensionMismatch);
}

TEST_CASE("report serialization shapes") {
  RetrievalReport r;
  r.query_view = 0;
  r.target_view = 1;
  r.n_queries = 2;
  r.ranks = {1, 2};
  r.ap = 0.75;
  r.method = Method::pwca;
  r.k = 3;
  r.tau = 0.01;
  r.seed = 7;
  REQUIRE(report_to_json(r) ==
          "{\"ap\": 0.75, \"n_queries\": 2, \"method\": \"pwca\", \"k\": 3, \"tau\": 0.01, "
          "\"seed\": 7, \"query_view\": 0, \"target_view\": 1}\n");
  REQUIRE(ranks_to_csv(r) == "query_index,rank\n0,1\n1,2\n");
}

TEST_CASE("comparison table") {
  auto make = [](Method m, int q, int t, double ap) {
    RetrievalReport r;
    r.method = m;
    r.query_view = q;
    r.target_view = t;
    r.n_queries = 10;
    r.ranks.assign(10, 1);
    r.ap = ap;
    r.k = 5;
    r.tau = 0.01;
    return r;
  };

  SECTION("two methods, one direction pair") {
    const std::string csv = emit_comparison_table({make(Method::pwca, 0, 1, 0.9),
                                                   make(Method::pwca, 1, 0, 0.8),
                                                   make(Method::kcca, 0, 1, 0.7),
                                                   make(Method::kcca, 1, 0, 0.6)});
    REQUIRE(csv == "method,v0->v1,v1->v0,mean\n"
                   "kcca,0.69999999999999996,0.59999999999999998,0.64999999999999991\n"
                   "pwca,0.90000000000000002,0.80000000000000004,0.85000000000000009\n");
  }
  SECTION("mean column recomputes to the arithmetic mean") {
    std::vector<RetrievalReport> reps;
    std::mt19937_64 gen(3);
    double sum = 0.0;
    for (const auto& [q, t] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{0, 2}}) {
      const double ap = uniform01(gen);
      sum += ap;
      reps.push_back(make(Method::pwca, q, t, ap));
    }
    const std::string csv = emit_comparison_table(reps);
    const auto last_comma = csv.find_last_of(',');
    const double mean = std::stod(csv.substr(last_comma + 1));
    REQUIRE(std::abs(mean - sum / 3.0) <= 1e-12);
  }
  SECTION("missing direction rejected") {
    REQUIRE_THROWS_AS(emit_comparison_table({make(Method::pwca, 0, 1, 0.9),
                                             make(Method::pwca, 1, 0, 0.8),
                                             make(Method::kcca, 0, 1, 0.7)}),
                      InconsistentReports);
  }
  SECTION("empty input rejected") {
    REQUIRE_THROWS_AS(emit_comparison_table({}), EmptyInput);
  }
}
