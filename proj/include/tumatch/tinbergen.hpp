#pragma once

#include <cstdint>

#include "tumatch/types.hpp"

namespace tumatch {

// Quadratic-Gaussian market: continuous types x, y in R^(K+1) with joint
// surplus x' A y, margins forced to full matching.
struct QuadraticSpec {
  Eigen::MatrixXd a;        // (K+1) x (K+1) interaction coefficients
  Eigen::MatrixXd sigma_x;  // type covariances, symmetric positive definite
  Eigen::MatrixXd sigma_y;
  int n_agents = 0;  // per side
  int observed_dims = 1;
  int cap = 2000;  // the exact assignment solve is cubic; refuse above

  void validate() const;
};

// Matched continuous-type pairs: row i of y is the partner of row i of x.
struct MatchedPairSample {
  Eigen::MatrixXd x;  // N x (K+1)
  Eigen::MatrixXd y;
};

// Draws both sides from their Gaussians, builds pair surpluses x_i' A y_j
// with a very negative singles payoff so everyone matches, and solves the
// assignment exactly.
MatchedPairSample simulate_quadratic_market(const QuadraticSpec& spec, std::uint64_t seed);

struct AffineMapEstimate {
  Eigen::MatrixXd t_hat;         // observed_dims x observed_dims
  Eigen::MatrixXd residual_cov;  // covariance of y - T x over matches
};

// Multivariate least squares of the first observed_dims components of y on
// those of x, no intercept (types are zero-mean).
AffineMapEstimate estimate_affine_map(const MatchedPairSample& pairs, int observed_dims);

}  // namespace tumatch
