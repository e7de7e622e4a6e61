#pragma once

#include <vector>

#include "tumatch/types.hpp"

namespace tumatch {

// Identified surplus of the logit model: phi_xy = log(mu_xy^2 / (mu_x0 mu_0y)).
// Any zero cell raises ZeroCellError naming the offending cell.
SurplusMatrix phi_closed_form(const MatchingPatterns& mu);

// Identification without singles data: 2 log mu_xy, normalized so the first
// row and first column are zero. Identified only up to additive a_x + b_y
// shifts; the supermodular core is invariant to the normalization.
SurplusMatrix phi_no_singles(const Eigen::MatrixXd& mu_marriages);

// vec order for cell statistics: cell (x, y) -> index x*Y + y.
Eigen::VectorXd vec_cells(const Eigen::MatrixXd& m);

// Delta-method covariance of vec(phi_closed_form) when all X*Y + X + Y cells
// are sampled multinomially with probabilities mu / total:
// S_phi = J (diag(p) - p p') J' / sample_size.
Eigen::MatrixXd phi_covariance(const MatchingPatterns& mu, long sample_size);

enum class WeightKind { identity, optimal, user };

// Parametric surplus family phi^beta = sum_k beta_k B_k with a choice of
// weighting for the minimum-distance objective.
struct MinDistanceSpec {
  std::vector<Eigen::MatrixXd> basis;
  WeightKind weight = WeightKind::optimal;
  Eigen::MatrixXd user_weight;  // only read when weight == user
};

struct MinDistanceResult {
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd cov_beta;
  // Minimized objective. With the optimal weight the moments are scaled by
  // the inverse of phi_covariance, so under the null this is asymptotically
  // chi-square with `df` degrees of freedom; other weights carry no such
  // guarantee.
  double j_stat = 0.0;
  int df = 0;
  bool ridged = false;  // covariance needed the 1e-10 ridge to invert
};

// Generalized-least-squares fit of beta on the moments phi^beta - phi_hat.
MinDistanceResult min_distance(const MinDistanceSpec& spec, const MatchingPatterns& mu,
                               long sample_size);

// Double difference identified from a 2x2 table of marriage proportions with
// no singles data: 2 log of the odds ratio.
double odds_ratio_phi0(const Eigen::Matrix2d& mu4);

struct OddsRatioVariance {
  double variance;  // (4/n) sum of reciprocal cell proportions
  double floor;     // 64/n, the best case over the simplex
};

// Asymptotic variance of odds_ratio_phi0 given n sampled marriages.
OddsRatioVariance phi0_avar(const Eigen::Matrix2d& mu4, long n);

// Equal-types variant: 16 / (n d0 (1 - d0)) where d0 is the proportion of
// marriages with x = y.
double phi0_avar_equal_types(double d0, long n);

// Regularized lower incomplete gamma P(df/2, x/2).
double chi_squared_cdf(double x, int df);

}  // namespace tumatch
