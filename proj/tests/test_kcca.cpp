#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pwca/kcca.hpp"
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

TEST_CASE("kcca scalar hand case") {
  ViewMatrix x(1, 1);
  x << std::sqrt(2.0); // K = [2]
  const auto model = train_kcca({x, x}, KernelSpec{}, 0.01, 2);
  REQUIRE(model.k == 1); // the negative correlation is dropped
  REQUIRE(model.gammas(0) == Catch::Approx(4.0 / (2.01 * 2.01)).epsilon(1e-14));
}

TEST_CASE("kcca identical views: rho = lambda^2/(lambda+tau)^2 per eigenvalue") {
  const double tau = 0.05;
  const auto X = random_view(6, 6, 7);
  const auto K = gram(X, KernelSpec{});
  const Eigen::VectorXd lam =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K.mat(), Eigen::EigenvaluesOnly).eigenvalues();
  const auto model = train_kcca({X, X}, KernelSpec{}, tau, 6);
  std::vector<double> expected;
  for (Index i = 0; i < lam.size(); ++i)
    expected.push_back(lam(i) * lam(i) / ((lam(i) + tau) * (lam(i) + tau)));
  std::sort(expected.begin(), expected.end(), std::greater<double>());
  for (Index j = 0; j < model.k; ++j)
    REQUIRE(model.gammas(j) == Catch::Approx(expected[static_cast<std::size_t>(j)]).epsilon(1e-9));
}

TEST_CASE("kcca anti-symmetric mode is the most negative eigenvalue") {
  const double tau = 0.05;
  const auto X = random_view(5, 5, 9);
  const auto ks = std::vector<KernelMatrix>{gram(X, KernelSpec{}), gram(X, KernelSpec{})};
  const auto [C, D] = assemble_kcca_system(ks, tau);
  const auto all = solve_gsym_eig(C, D, C.n());
  const Eigen::VectorXd lam =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ks[0].mat(), Eigen::EigenvaluesOnly)
          .eigenvalues();
  const double lmax = lam.maxCoeff();
  REQUIRE(all.values(all.values.size() - 1) ==
          Catch::Approx(-lmax * lmax / ((lmax + tau) * (lmax + tau))).epsilon(1e-9));
}

TEST_CASE("kcca rho -> 1 from below as tau -> 0 on identical full-rank views") {
  const auto X = random_view(6, 6, 11);
  double prev = 0.0;
  for (const double tau : {1e-1, 1e-2, 1e-3}) {
    const auto model = train_kcca({X, X}, KernelSpec{}, tau, 1);
    REQUIRE(model.gammas(0) < 1.0);
    REQUIRE(model.gammas(0) > prev);
    prev = model.gammas(0);
  }
  REQUIRE(prev > 0.99);
}

TEST_CASE("kcca correlation bound |rho| <= s-1") {
  for (const int s : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      std::vector<ViewMatrix> views;
      for (int v = 0; v < s; ++v)
        views.push_back(random_view(6, 3 + v, 100 * static_cast<std::uint64_t>(s) + 10 * seed +
                                                   static_cast<std::uint64_t>(v)));
      const auto ks = [&] {
        std::vector<KernelMatrix> k;
        for (const auto& X : views) k.push_back(gram(X, KernelSpec{}));
        return k;
      }();
      const auto [C, D] = assemble_kcca_system(ks, 0.01);
      const auto all = solve_gsym_eig(C, D, C.n());
      for (Index j = 0; j < all.values.size(); ++j)
        REQUIRE(std::abs(all.values(j)) <= static_cast<double>(s - 1) + 1e-9);
    }
  }
}

TEST_CASE("kcca projections: no 1/rho scaling, zero query maps to zero") {
  const auto Xa = random_view(6, 4, 21);
  const auto Xb = random_view(6, 4, 22);
  const auto model = train_kcca({Xa, Xb}, KernelSpec{}, 0.01, 3);
  const auto K = gram(Xa, KernelSpec{});

  const Eigen::MatrixXd E = project(model, 0, Xa.row(1));
  for (Index j = 0; j < model.k; ++j)
    REQUIRE(E(0, j) == Catch::Approx(K.mat().row(1).dot(model.duals[0].col(j))).margin(1e-12));

  REQUIRE(project(model, 1, ViewMatrix::Zero(1, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("identical queries in both identical views score symmetrically") {
  const auto X = random_view(6, 4, 31);
  const auto model = train_kcca({X, X}, KernelSpec{}, 0.01, 3);
  const ViewMatrix q = random_view(2, 4, 32);
  const Eigen::MatrixXd e0 = project(model, 0, q);
  const Eigen::MatrixXd e1 = project(model, 1, q);
  REQUIRE(similarity(e0.row(0), e1.row(1)) == Catch::Approx(similarity(e1.row(0), e0.row(1))).margin(1e-12));
}

TEST_CASE("shared retrieval harness: method tag does not touch ranking code") {
  // Hand-built model with all gammas = 1 so the pwca 1/gamma scaling is a
  // no-op: swapping the tag must reproduce the identical report.
  const auto Xa = random_view(6, 4, 41);
  const auto Xb = random_view(6, 4, 42);
  auto model = train_pwca({Xa, Xb}, KernelSpec{}, 0.01, 3);
  model.gammas.setOnes();

  const std::vector<ViewMatrix> test{random_view(5, 4, 43), random_view(5, 4, 44)};
  auto rep_pwca = mate_retrieval(model, test, 0, 1);
  model.method = Method::kcca;
  auto rep_kcca = mate_retrieval(model, test, 0, 1);

  REQUIRE(rep_pwca.ranks == rep_kcca.ranks);
  REQUIRE(rep_pwca.ap == rep_kcca.ap);
  REQUIRE(method_name(rep_pwca.method) == "pwca");
  REQUIRE(method_name(rep_kcca.method) == "kcca");
}

TEST_CASE("kcca rejects tau <= 0") {
  const auto X = random_view(4, 3, 51);
  REQUIRE_THROWS_AS(train_kcca({X, X}, KernelSpec{}, 0.0, 2), InvalidArgument);
}
