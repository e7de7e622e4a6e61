#pragma once

#include <utility>
#include <vector>

#include "tumatch/types.hpp"

namespace tumatch {

// Double difference phi11 + phi22 - phi12 - phi21 of a 2x2 surplus matrix.
// Invariant to additive a_x + b_y shifts.
double supermodular_core(const SurplusMatrix& phi);

// Aggregates an individual-level matching into type-cell patterns.
// `matches` holds (i, j) pairs; the three lists must partition both sides.
MatchingPatterns aggregate_matching(const std::vector<std::pair<int, int>>& matches,
                                    const std::vector<int>& single_men,
                                    const std::vector<int>& single_women,
                                    const FiniteMarket& market,
                                    const TypeSpace& space);

// Mean and variance of the systematic surplus under the matching distribution
// mu: couple cells weighted mu[x,y], singles cells weighted mu_x0 / mu_0y at
// zero surplus, normalized by the total mass. Requires some matched mass.
std::pair<double, double> surplus_mean_variance(const SurplusMatrix& phi,
                                                const MatchingPatterns& mu);

}  // namespace tumatch
