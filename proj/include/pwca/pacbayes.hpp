#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "pwca/errors.hpp"

namespace pwca {

// Nonnegative weights over an enumerated hypothesis set, summing to 1.
struct DiscreteDistribution {
  Eigen::VectorXd w;

  void validate() const {
    if (w.size() == 0) throw EmptyInput("DiscreteDistribution: empty");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (!(w(i) >= 0.0)) throw OutOfRange("DiscreteDistribution: negative weight");
      sum += w(i);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw OutOfRange("DiscreteDistribution: weights sum to " + std::to_string(sum));
  }

  static DiscreteDistribution uniform(Eigen::Index m) {
    if (m < 1) throw EmptyInput("DiscreteDistribution::uniform: m < 1");
    DiscreteDistribution d;
    d.w = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    return d;
  }
};

// Binary KL divergence kl(q||p) with the conventions 0 log 0 = 0 and
// kl = +inf when p is 0 or 1 while q differs.
inline double bernoulli_kl(double q, double p) {
  if (!(q >= 0.0 && q <= 1.0 && p >= 0.0 && p <= 1.0))
    throw OutOfRange("bernoulli_kl: arguments must lie in [0,1]");
  const double inf = std::numeric_limits<double>::infinity();
  double kl = 0.0;
  if (q > 0.0) {
    if (p == 0.0) return inf;
    kl += q * std::log(q / p);
  }
  if (q < 1.0) {
    if (p == 1.0) return inf;
    kl += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  }
  return kl;
}

// Discrete KL divergence sum_i Q_i log(Q_i / P_i); +inf where Q puts mass
// outside P's support.
inline double discrete_kl(const DiscreteDistribution& Q, const DiscreteDistribution& P) {
  Q.validate();
  P.validate();
  if (Q.w.size() != P.w.size()) throw DimensionMismatch("discrete_kl: support sizes differ");
  double kl = 0.0;
  for (Eigen::Index i = 0; i < Q.w.size(); ++i) {
    if (Q.w(i) == 0.0) continue;
    if (P.w(i) == 0.0) return std::numeric_limits<double>::infinity();
    kl += Q.w(i) * std::log(Q.w(i) / P.w(i));
  }
  return kl;
}

// Right-hand side of the PAC-Bayes inequality:
// (KL(Q,P) + log(1/delta) + log(2 sqrt n)) / n, valid for n >= 8.
inline double pac_bound_rhs(std::int64_t n, double delta, double kl_qp) {
  if (n < 8) throw SampleSizeTooSmall("pac_bound_rhs: requires n >= 8, got " + std::to_string(n));
  if (!(delta > 0.0 && delta < 1.0)) throw OutOfRange("pac_bound_rhs: delta must lie in (0,1)");
  if (!(kl_qp >= 0.0)) throw OutOfRange("pac_bound_rhs: kl_qp must be >= 0");
  const double nn = static_cast<double>(n);
  return (kl_qp + std::log(1.0 / delta) + std::log(2.0 * std::sqrt(nn))) / nn;
}

// Largest p in [q_emp, 1] with bernoulli_kl(q_emp, p) <= c.
//
// The bisection runs in t = -log(1-p), where d kl/dt = (p-q)/p <= 1, so a
// t-interval of 1e-12 pins both p and the kl value. When the root lies
// closer to 1 than 1e-6 the function saturates to exactly 1.0: binary64
// spacing near 1 quantizes the kl there too coarsely for a meaningful
// inverse (the bound is vacuous at that point anyway).
inline double kl_inverse_upper(double q_emp, double c) {
  if (!(q_emp >= 0.0 && q_emp <= 1.0)) throw OutOfRange("kl_inverse_upper: q_emp not in [0,1]");
  if (!(c >= 0.0)) throw OutOfRange("kl_inverse_upper: c must be >= 0");
  if (q_emp >= 1.0) return 1.0;
  if (c == 0.0) return q_emp;

  const double t_sat = -std::log(1e-6); // p = 1 - 1e-6
  auto kl_at_t = [q_emp](double t) {
    const double p = -std::expm1(-t);
    double kl = 0.0;
    if (q_emp > 0.0) kl += q_emp * std::log(q_emp / p);
    // (1-q) log((1-q)/(1-p)) = (1-q)(log(1-q) + t), stable for huge t
    kl += (1.0 - q_emp) * (std::log1p(-q_emp) + t);
    return kl;
  };
  if (kl_at_t(t_sat) <= c) return 1.0;

  double lo = -std::log1p(-q_emp); // p = q_emp, kl = 0
  if (q_emp == 0.0) lo = 0.0;
  double hi = std::max(lo + 1.0, 1.0);
  while (kl_at_t(hi) <= c) hi = std::min(hi * 2.0, t_sat);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (kl_at_t(mid) <= c)
      lo = mid;
    else
      hi = mid;
  }
  double p = -std::expm1(-lo);
  if (p < q_emp) p = q_emp;
  while (p > q_emp && bernoulli_kl(q_emp, p) > c)
    p = std::nextafter(p, 0.0); // guard the final rounding step
  return p;
}

// Slack of the norm bound on KL against a uniform reference:
// log(sum Q^2) + log m - KL(Q, uniform_m). Nonnegative; zero exactly when Q
// is uniform on its support.
inline double prop1_gap(const DiscreteDistribution& Q) {
  Q.validate();
  const Eigen::Index m = Q.w.size();
  const double sum_sq = Q.w.squaredNorm();
  const double kl = discrete_kl(Q, DiscreteDistribution::uniform(m));
  return std::log(sum_sq) + std::log(static_cast<double>(m)) - kl;
}

// Product grid of interval hypotheses: one indicator interval per domain,
// a hypothesis being a (z-cell, y-cell) pair. Cells are half-open [a, b)
// with the last cell closed, so the edges partition [first, last] exactly.
struct GridHypothesisSpace {
  std::vector<double> edges_z;
  std::vector<double> edges_y;

  GridHypothesisSpace(std::vector<double> ez, std::vector<double> ey)
      : edges_z(std::move(ez)), edges_y(std::move(ey)) {
    check_edges(edges_z);
    check_edges(edges_y);
  }

  static GridHypothesisSpace uniform(Eigen::Index cells, double lo, double hi) {
    if (cells < 1 || !(hi > lo)) throw InvalidConfig("GridHypothesisSpace: bad uniform grid");
    std::vector<double> e(static_cast<std::size_t>(cells) + 1);
    for (std::size_t i = 0; i < e.size(); ++i)
      e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(cells);
    return GridHypothesisSpace(e, e);
  }

  Eigen::Index cells_z() const { return static_cast<Eigen::Index>(edges_z.size()) - 1; }
  Eigen::Index cells_y() const { return static_cast<Eigen::Index>(edges_y.size()) - 1; }
  Eigen::Index n_hypotheses() const { return cells_z() * cells_y(); }

  // hypothesis index of the pair (z-cell iz, y-cell iy)
  Eigen::Index hypothesis_index(Eigen::Index iz, Eigen::Index iy) const {
    return iz * cells_y() + iy;
  }

  static Eigen::Index locate(const std::vector<double>& edges, double v) {
    if (v < edges.front() || v > edges.back())
      throw SampleOutOfGrid("grid: sample coordinate " + std::to_string(v) +
                            " outside covered range");
    if (v == edges.back()) return static_cast<Eigen::Index>(edges.size()) - 2;
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    return static_cast<Eigen::Index>(it - edges.begin()) - 1;
  }

 private:
  static void check_edges(const std::vector<double>& e) {
    if (e.size() < 2) throw InvalidConfig("GridHypothesisSpace: need at least one cell");
    for (std::size_t i = 1; i < e.size(); ++i)
      if (!(e[i] > e[i - 1])) throw InvalidConfig("GridHypothesisSpace: edges not increasing");
  }
};

// Per-hypothesis empirical contradiction risk; risk * n is an integer count.
struct RiskVector {
  Eigen::VectorXd risk;
  std::int64_t n = 0;
};

// Contradiction counts over the grid: hypothesis (cz, cy) contradicts sample
// (z, y) when exactly one of z-in-cz, y-in-cy holds. Computed from the cell
// occupancy tables in O(samples + hypotheses).
inline RiskVector grid_risks(const GridHypothesisSpace& grid,
                             const std::vector<std::pair<double, double>>& samples) {
  if (samples.empty()) throw EmptyInput("grid_risks: no samples");
  const Eigen::Index nz = grid.cells_z();
  const Eigen::Index ny = grid.cells_y();
  std::vector<std::int64_t> count_z(static_cast<std::size_t>(nz), 0);
  std::vector<std::int64_t> count_y(static_cast<std::size_t>(ny), 0);
  std::vector<std::int64_t> count_zy(static_cast<std::size_t>(nz * ny), 0);
  for (const auto& [z, y] : samples) {
    const Eigen::Index iz = GridHypothesisSpace::locate(grid.edges_z, z);
    const Eigen::Index iy = GridHypothesisSpace::locate(grid.edges_y, y);
    ++count_z[static_cast<std::size_t>(iz)];
    ++count_y[static_cast<std::size_t>(iy)];
    ++count_zy[static_cast<std::size_t>(iz * ny + iy)];
  }
  RiskVector rv;
  rv.n = static_cast<std::int64_t>(samples.size());
  rv.risk.resize(grid.n_hypotheses());
  for (Eigen::Index iz = 0; iz < nz; ++iz)
    for (Eigen::Index iy = 0; iy < ny; ++iy) {
      const std::int64_t contradictions = count_z[static_cast<std::size_t>(iz)] +
                                          count_y[static_cast<std::size_t>(iy)] -
                                          2 * count_zy[static_cast<std::size_t>(iz * ny + iy)];
      rv.risk(grid.hypothesis_index(iz, iy)) =
          static_cast<double>(contradictions) / static_cast<double>(rv.n);
    }
  return rv;
}

// Minimum-norm weighting supported on the (eps-)zero-risk hypotheses: the
// uniform distribution over {h : risk(h) <= eps}. Infeasible when empty.
inline DiscreteDistribution realizable_q(const RiskVector& risks, double eps = 0.0) {
  if (risks.risk.size() == 0) throw EmptyInput("realizable_q: empty risk vector");
  if (!(eps >= 0.0)) throw OutOfRange("realizable_q: eps must be >= 0");
  Eigen::Index feasible = 0;
  for (Eigen::Index i = 0; i < risks.risk.size(); ++i)
    if (risks.risk(i) <= eps) ++feasible;
  if (feasible == 0)
    throw Infeasible("realizable_q: no hypothesis with risk <= " + std::to_string(eps));
  DiscreteDistribution q;
  q.w = Eigen::VectorXd::Zero(risks.risk.size());
  for (Eigen::Index i = 0; i < risks.risk.size(); ++i)
    if (risks.risk(i) <= eps) q.w(i) = 1.0 / static_cast<double>(feasible);
  return q;
}

// Q-average of the risk vector.
inline double expected_risk(const DiscreteDistribution& Q, const RiskVector& risks) {
  Q.validate();
  if (Q.w.size() != risks.risk.size())
    throw DimensionMismatch("expected_risk: support sizes differ");
  return Q.w.dot(risks.risk);
}

} // namespace pwca
