#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "tumatch/assignment.hpp"
#include "tumatch/market_core.hpp"
#include "tumatch/rng.hpp"
#include "tumatch/stochastic.hpp"

using namespace tumatch;

namespace {

FiniteMarket random_market(Rng& rng, int I, int J, int X = 2, int Y = 2) {
  FiniteMarket m;
  for (int i = 0; i < I; ++i) m.x_types.push_back(static_cast<int>(rng.below(X)));
  for (int j = 0; j < J; ++j) m.y_types.push_back(static_cast<int>(rng.below(Y)));
  m.tilde_phi.resize(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j) m.tilde_phi(i, j) = rng.uniform(-2, 3);
  m.phi_i0.resize(I);
  m.phi_0j.resize(J);
  for (int i = 0; i < I; ++i) m.phi_i0[i] = rng.uniform(-1, 1);
  for (int j = 0; j < J; ++j) m.phi_0j[j] = rng.uniform(-1, 1);
  return m;
}

FiniteMarket one_pair_market(double surplus) {
  FiniteMarket m;
  m.x_types = {0};
  m.y_types = {0};
  m.tilde_phi = Eigen::MatrixXd::Constant(1, 1, surplus);
  m.phi_i0 = Eigen::VectorXd::Zero(1);
  m.phi_0j = Eigen::VectorXd::Zero(1);
  return m;
}

double worst_dual_violation(const FiniteMatching& sol, const FiniteMarket& m) {
  double worst = 0.0;
  for (int i = 0; i < m.I(); ++i)
    for (int j = 0; j < m.J(); ++j)
      worst = std::max(worst, m.tilde_phi(i, j) - sol.u[i] - sol.v[j]);
  for (int i = 0; i < m.I(); ++i) worst = std::max(worst, m.phi_i0[i] - sol.u[i]);
  for (int j = 0; j < m.J(); ++j) worst = std::max(worst, m.phi_0j[j] - sol.v[j]);
  return worst;
}

}  // namespace

TEST_CASE("one profitable pair matches and splits the surplus") {
  const FiniteMatching sol = solve_assignment(one_pair_market(1.0));
  REQUIRE(sol.matches.size() == 1);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.u[0] + sol.v[0] == doctest::Approx(1.0));
  CHECK(sol.u[0] >= -1e-12);
  CHECK(sol.v[0] >= -1e-12);
}

TEST_CASE("one unprofitable pair stays single") {
  const FiniteMatching sol = solve_assignment(one_pair_market(-1.0));
  CHECK(sol.matches.empty());
  CHECK(sol.single_men.size() == 1);
  CHECK(sol.single_women.size() == 1);
  CHECK(sol.objective == 0.0);
  CHECK(sol.u[0] == doctest::Approx(0.0));
  CHECK(sol.v[0] == doctest::Approx(0.0));
}

TEST_CASE("brute force handles the empty market and agrees on 1x1") {
  FiniteMarket empty;
  empty.tilde_phi.resize(0, 0);
  empty.phi_i0.resize(0);
  empty.phi_0j.resize(0);
  CHECK(brute_force_matching(empty).objective == 0.0);

  const FiniteMarket m = one_pair_market(0.5);
  CHECK(brute_force_matching(m).objective == solve_assignment(m).objective);
}

TEST_CASE("brute force refuses large markets") {
  Rng rng(3);
  const FiniteMarket m = random_market(rng, 9, 4);
  CHECK_THROWS_AS(brute_force_matching(m), SizeError);
}

TEST_CASE("solver matches brute force exactly on random markets") {
  Rng rng(12345);
  for (int t = 0; t < 40; ++t) {
    const int I = 1 + static_cast<int>(rng.below(6));
    const int J = 1 + static_cast<int>(rng.below(6));
    const FiniteMarket m = random_market(rng, I, J);
    const FiniteMatching lp = solve_assignment(m);
    const FiniteMatching bf = brute_force_matching(m);
    CHECK(std::abs(lp.objective - bf.objective) <= 1e-9);
  }
}

TEST_CASE("duals are feasible and tight on a 20x20 market") {
  Rng rng(777);
  const FiniteMarket m = random_market(rng, 20, 20);
  const FiniteMatching sol = solve_assignment(m);
  CHECK(worst_dual_violation(sol, m) <= 1e-9);
  // Strong duality.
  CHECK(sol.u.sum() + sol.v.sum() == doctest::Approx(sol.objective).epsilon(1e-12));
  // Complementary slackness on matches and singles.
  for (auto [i, j] : sol.matches)
    CHECK(sol.u[i] + sol.v[j] == doctest::Approx(m.tilde_phi(i, j)).epsilon(1e-12));
  for (int i : sol.single_men) CHECK(sol.u[i] == doctest::Approx(m.phi_i0[i]).epsilon(1e-12));
  for (int j : sol.single_women) CHECK(sol.v[j] == doctest::Approx(m.phi_0j[j]).epsilon(1e-12));
}

TEST_CASE("rectangular markets partition both sides") {
  Rng rng(31);
  const FiniteMarket m = random_market(rng, 7, 3);
  const FiniteMatching sol = solve_assignment(m);
  CHECK(sol.matches.size() + sol.single_men.size() == 7);
  CHECK(sol.matches.size() + sol.single_women.size() == 3);
  std::set<int> men, women;
  for (auto [i, j] : sol.matches) {
    men.insert(i);
    women.insert(j);
  }
  for (int i : sol.single_men) men.insert(i);
  for (int j : sol.single_women) women.insert(j);
  CHECK(men.size() == 7);
  CHECK(women.size() == 3);
}

TEST_CASE("scaling all payoffs scales the solution") {
  Rng rng(11);
  const FiniteMarket m = random_market(rng, 8, 8);
  FiniteMarket scaled = m;
  const double lambda = 3.5;
  scaled.tilde_phi *= lambda;
  scaled.phi_i0 *= lambda;
  scaled.phi_0j *= lambda;
  const FiniteMatching a = solve_assignment(m);
  const FiniteMatching b = solve_assignment(scaled, 1e-8);
  CHECK(a.matches == b.matches);
  CHECK(b.objective == doctest::Approx(lambda * a.objective).epsilon(1e-12));
  for (int i = 0; i < 8; ++i) CHECK(b.u[i] == doctest::Approx(lambda * a.u[i]).epsilon(1e-9));
}

TEST_CASE("non-finite payoffs are rejected") {
  FiniteMarket m = one_pair_market(1.0);
  m.tilde_phi(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve_assignment(m), DomainError);
}

TEST_CASE("mirrored markets split cell surplus evenly") {
  // Market invariant under swapping sides: duals must mirror, so diagonal
  // cells share exactly one half.
  Rng rng(2718);
  const int n = 12;
  FiniteMarket m;
  for (int i = 0; i < n; ++i) m.x_types.push_back(i < n / 2 ? 0 : 1);
  m.y_types = m.x_types;
  m.tilde_phi.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double v = rng.uniform(-1, 2);
      m.tilde_phi(i, j) = v;
      m.tilde_phi(j, i) = v;
    }
  }
  m.phi_i0.resize(n);
  for (int i = 0; i < n; ++i) m.phi_i0[i] = rng.uniform(0.2, 1.0);
  m.phi_0j = m.phi_i0;

  const FiniteMatching sol = solve_assignment(m);
  const TypeLevelDuals duals = type_level_duals(sol, m, TypeSpace(2, 2));
  for (int x = 0; x < 2; ++x)
    if (duals.count(x, x) > 0) CHECK(duals.share(x, x) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("a single matched pair yields its dual ratio as the share") {
  FiniteMarket m = one_pair_market(4.0);
  FiniteMatching sol;
  sol.matches = {{0, 0}};
  sol.u = Eigen::VectorXd::Constant(1, 1.0);
  sol.v = Eigen::VectorXd::Constant(1, 3.0);
  const TypeLevelDuals duals = type_level_duals(sol, m, TypeSpace(1, 1));
  CHECK(duals.share(0, 0) == doctest::Approx(0.25));
  CHECK(duals.count(0, 0) == 1);
}

TEST_CASE("cells with no matches are absent and degenerate sums are flagged") {
  Rng rng(5);
  FiniteMarket m = random_market(rng, 2, 2, 2, 2);
  m.x_types = {0, 0};
  m.y_types = {0, 0};  // nothing ever lands in cells (1,*) or (*,1)
  const FiniteMatching sol = solve_assignment(m);
  const TypeLevelDuals duals = type_level_duals(sol, m, TypeSpace(2, 2));
  CHECK(duals.count(1, 1) == 0);
  CHECK(std::isnan(duals.share(1, 1)));
  CHECK(std::isnan(duals.u_bar(1, 1)));

  FiniteMatching degenerate;
  degenerate.matches = {{0, 0}};
  degenerate.u = Eigen::VectorXd::Constant(2, -1.0);
  degenerate.v = Eigen::VectorXd::Constant(2, 1.0);
  const TypeLevelDuals flagged = type_level_duals(degenerate, m, TypeSpace(2, 2));
  CHECK(flagged.degenerate(0, 0) == 1);
  CHECK(std::isnan(flagged.share(0, 0)));
}

TEST_CASE("share conventions agree on homogeneous cells") {
  FiniteMarket m;
  m.x_types = {0, 0};
  m.y_types = {0, 0};
  m.tilde_phi = Eigen::MatrixXd::Constant(2, 2, 2.0);
  m.phi_i0 = Eigen::VectorXd::Zero(2);
  m.phi_0j = Eigen::VectorXd::Zero(2);
  FiniteMatching sol;
  sol.matches = {{0, 0}, {1, 1}};
  sol.u = Eigen::VectorXd::Constant(2, 0.5);
  sol.v = Eigen::VectorXd::Constant(2, 1.5);
  const auto a = type_level_duals(sol, m, TypeSpace(1, 1), ShareConvention::ratio_of_averages);
  const auto b = type_level_duals(sol, m, TypeSpace(1, 1), ShareConvention::average_of_ratios);
  CHECK(a.share(0, 0) == doctest::Approx(0.25));
  CHECK(b.share(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("matching patterns are locally constant in sigma for a fixed draw") {
  // At sigma = 0 the surplus is separable, so the individual-level optimum is
  // unique only up to shuffles of partners within a type cell; the object
  // that is locally constant is the cell-level pattern mu.
  const TypeSpace space(2, 2);
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 1.0, 1.0, 1.6;
  const SurplusMatrix phi(p);
  Eigen::VectorXd five = Eigen::VectorXd::Constant(2, 5.0);
  const Margins margins(five, five);

  int with_positive_bar = 0;
  for (int rep = 0; rep < 5; ++rep) {
    NoiseSpec widest;
    widest.model = NoiseModel::missing_shock;
    widest.r2 = 0.005;  // sigma = 0.1
    const DrawBundle bundle = draw_bundle(space, margins, widest, 9000 + rep);

    auto patterns_at = [&](double sigma) {
      NoiseSpec spec = widest;
      spec.r2 = sigma * sigma / 2.0;
      const FiniteMarket mkt = assemble_market(phi, margins, spec, bundle);
      const auto sol = solve_assignment(mkt);
      return aggregate_matching(sol.matches, sol.single_men, sol.single_women, mkt, space);
    };

    const MatchingPatterns base = patterns_at(0.0);
    double sigma_bar = 0.0;
    for (int k = 1; k <= 10; ++k) {
      const MatchingPatterns at = patterns_at(0.01 * k);
      if (at.mu == base.mu && at.mu_x0 == base.mu_x0 && at.mu_0y == base.mu_0y)
        sigma_bar = 0.01 * k;
      else
        break;
    }
    if (sigma_bar > 0.0) ++with_positive_bar;
  }
  CHECK(with_positive_bar >= 4);
}
