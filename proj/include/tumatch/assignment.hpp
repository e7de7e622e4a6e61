#pragma once

#include <utility>
#include <vector>

#include "tumatch/types.hpp"

namespace tumatch {

// A stable matching of a finite market: primal matches plus dual utilities.
// At the optimum every man sits in exactly one of {matches, single_men}
// (symmetric for women), u_i + v_j >= tilde_phi_ij with equality on matched
// pairs, u_i >= phi_i0 with equality on single men, and the objective equals
// both the realized total surplus and sum(u) + sum(v).
struct FiniteMatching {
  std::vector<std::pair<int, int>> matches;
  std::vector<int> single_men;
  std::vector<int> single_women;
  Eigen::VectorXd u;  // length I; empty when has_duals is false
  Eigen::VectorXd v;  // length J
  double objective = 0.0;
  bool has_duals = true;
};

// Exact solve of the assignment problem with unmatched options, by shortest
// augmenting paths with potentials on the square problem that augments each
// side with singles slots. Feasibility and slackness of the returned duals
// are verified to `tol`; pass a tol scaled to the payoff magnitude.
FiniteMatching solve_assignment(const FiniteMarket& market, double tol = 1e-9);

// Exhaustive enumeration of all partial matchings; the test oracle for
// solve_assignment. Only the primal is returned (has_duals = false).
// Markets larger than 8x8 are refused.
FiniteMatching brute_force_matching(const FiniteMarket& market);

// Whether a cell's share averages dual ratios or takes the ratio of averaged
// duals. Ratio of averages is the default.
enum class ShareConvention { ratio_of_averages, average_of_ratios };

// Cell-level summaries of the individual dual utilities. Cells with no
// matched pair are NaN with count 0; cells whose summed duals are <= 0 get
// share NaN and the degenerate flag instead of a share.
struct TypeLevelDuals {
  Eigen::MatrixXd u_bar;
  Eigen::MatrixXd v_bar;
  Eigen::MatrixXd share;  // men's share u/(u+v)
  Eigen::MatrixXi count;
  Eigen::MatrixXi degenerate;  // 1 where the share is undefined
};

TypeLevelDuals type_level_duals(const FiniteMatching& matching, const FiniteMarket& market,
                                const TypeSpace& space,
                                ShareConvention convention = ShareConvention::ratio_of_averages);

}  // namespace tumatch
