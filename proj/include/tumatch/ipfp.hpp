#pragma once

#include <utility>
#include <vector>

#include "tumatch/types.hpp"

namespace tumatch {

struct IpfpDiagnostics {
  int iterations = 0;
  double residual = 0.0;              // final max margin residual
  std::vector<double> residual_trace; // one entry per sweep
};

// Solves the logit matching system mu_xy = sqrt(mu_x0 mu_0y) exp(phi_xy / 2)
// under the scarcity constraints, by alternating closed-form updates of
// a_x = sqrt(mu_x0) and b_y = sqrt(mu_0y); each update takes the positive
// root of a_x^2 + a_x sum_y K_xy b_y = n_x with K = exp(phi/2).
//
// Masses stay in the units of `margins`; no internal normalization. The
// residual trace must be non-increasing sweep to sweep; a violation, or
// running out of iterations, throws ConvergenceError.
MatchingPatterns ipfp_solve(const SurplusMatrix& phi, const Margins& margins,
                            double tol = 1e-10, int max_iter = 100000,
                            IpfpDiagnostics* diag = nullptr);

// Systematic parts of the equilibrium utilities: U_xy = log(mu_xy / mu_x0),
// V_xy = log(mu_xy / mu_0y). U + V recovers the identified surplus.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> choo_siow_utilities(const MatchingPatterns& mu);

// Max absolute violation over the matching equations and both scarcity
// constraints; diagnostic for any candidate solution.
double choo_siow_residual(const SurplusMatrix& phi, const MatchingPatterns& mu,
                          const Margins& margins);

}  // namespace tumatch
