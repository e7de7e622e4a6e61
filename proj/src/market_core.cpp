#include "tumatch/market_core.hpp"

#include <string>

namespace tumatch {

double supermodular_core(const SurplusMatrix& phi) {
  if (phi.X() != 2 || phi.Y() != 2)
    throw DimensionError("supermodular_core: expected a 2x2 matrix, got " +
                         std::to_string(phi.X()) + "x" + std::to_string(phi.Y()));
  const auto& p = phi.phi;
  return p(0, 0) + p(1, 1) - p(0, 1) - p(1, 0);
}

MatchingPatterns aggregate_matching(const std::vector<std::pair<int, int>>& matches,
                                    const std::vector<int>& single_men,
                                    const std::vector<int>& single_women,
                                    const FiniteMarket& market,
                                    const TypeSpace& space) {
  market.validate(space);
  const int I = market.I(), J = market.J();
  std::vector<char> man_seen(I, 0), woman_seen(J, 0);
  auto see_man = [&](int i) {
    if (i < 0 || i >= I) throw ConsistencyError("aggregate_matching: man index out of range");
    if (man_seen[i]) throw ConsistencyError("aggregate_matching: man " + std::to_string(i + 1) +
                                            " appears more than once");
    man_seen[i] = 1;
  };
  auto see_woman = [&](int j) {
    if (j < 0 || j >= J) throw ConsistencyError("aggregate_matching: woman index out of range");
    if (woman_seen[j]) throw ConsistencyError("aggregate_matching: woman " + std::to_string(j + 1) +
                                              " appears more than once");
    woman_seen[j] = 1;
  };

  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(space.X, space.Y);
  Eigen::VectorXd mu_x0 = Eigen::VectorXd::Zero(space.X);
  Eigen::VectorXd mu_0y = Eigen::VectorXd::Zero(space.Y);

  for (const auto& [i, j] : matches) {
    see_man(i);
    see_woman(j);
    mu(market.x_types[i], market.y_types[j]) += 1.0;
  }
  for (int i : single_men) {
    see_man(i);
    mu_x0[market.x_types[i]] += 1.0;
  }
  for (int j : single_women) {
    see_woman(j);
    mu_0y[market.y_types[j]] += 1.0;
  }

  for (int i = 0; i < I; ++i)
    if (!man_seen[i])
      throw ConsistencyError("aggregate_matching: man " + std::to_string(i + 1) +
                             " is neither matched nor single");
  for (int j = 0; j < J; ++j)
    if (!woman_seen[j])
      throw ConsistencyError("aggregate_matching: woman " + std::to_string(j + 1) +
                             " is neither matched nor single");

  return MatchingPatterns(std::move(mu), std::move(mu_x0), std::move(mu_0y));
}

std::pair<double, double> surplus_mean_variance(const SurplusMatrix& phi,
                                                const MatchingPatterns& mu) {
  if (phi.X() != mu.X() || phi.Y() != mu.Y())
    throw DimensionError("surplus_mean_variance: phi and mu shapes differ");
  if (mu.mu.sum() <= 0)
    throw EmptyDistributionError("surplus_mean_variance: no matched mass");
  // Cells of the matching distribution: couples carry phi_xy, singles carry
  // zero systematic surplus but keep their mass in the normalizer.
  const double total = mu.total_mass();
  const Eigen::ArrayXXd w = mu.mu.array() / total;
  const Eigen::ArrayXXd p = phi.phi.array();
  const double mean = (w * p).sum();
  const double second = (w * p * p).sum();
  return {mean, second - mean * mean};
}

}  // namespace tumatch
