#pragma once

#include <cstdint>
#include <vector>

#include "tumatch/rng.hpp"
#include "tumatch/types.hpp"

namespace tumatch {

enum class NoiseModel { separable, missing_shock, missing_interaction };

// Distribution of the pair-specific shock nu. The logistic alternative is
// symmetric around zero with the same variance pi^2/6.
enum class PairShockDist { gumbel, logistic };

// How the realized surplus deviates from separability. r2 = sigma^2/2 is the
// share of idiosyncratic surplus variance contributed by the pair-specific
// component; the total idiosyncratic variance stays pi^2/3 for every r2.
struct NoiseSpec {
  NoiseModel model = NoiseModel::separable;
  double r2 = 0.0;
  int interaction_dim = 1;  // dimension of xi, zeta under missing_interaction
  PairShockDist nu_dist = PairShockDist::gumbel;
  // The pair-shock models redefine only the pair surplus; singles keep their
  // raw eps/eta payoffs. Set true to scale them by tau with the rest of the
  // separable block.
  bool scale_singles_by_tau = false;

  void validate() const;
};

// All randomness behind one market realization, reproducible from `seed`.
// Components live on independent sub-streams of the seed. nu / xi / zeta have
// size zero unless the model calls for them.
struct DrawBundle {
  Eigen::MatrixXd eps;   // I x (Y+1); column 0 is the singles option
  Eigen::MatrixXd eta;   // J x (X+1); column 0 is the singles option
  Eigen::MatrixXd nu;    // I x J pair shocks, or empty
  Eigen::MatrixXd xi;    // I x d, or empty
  Eigen::MatrixXd zeta;  // J x d, or empty
  std::uint64_t seed = 0;
};

// `count` i.i.d. centered standard type I extreme value draws.
std::vector<double> draw_gumbel_centered(Rng& stream, int count);

// Maps the non-separability share r2 to (sigma, tau): sigma = sqrt(2 r2),
// tau = sqrt(1 - r2), so that tau^2 = 1 - sigma^2/2.
std::pair<double, double> sigma_tau_from_r2(double r2);

// Draws every noise component the chosen model calls for, for a market with
// the given integer margins.
DrawBundle draw_bundle(const TypeSpace& space, const Margins& margins,
                       const NoiseSpec& spec, std::uint64_t seed);

// Assembles the realized surplus matrix from systematic surplus plus an
// already-drawn bundle. Lets callers re-scale the same draws across r2.
FiniteMarket assemble_market(const SurplusMatrix& phi, const Margins& margins,
                             const NoiseSpec& spec, const DrawBundle& bundle);

// draw_bundle + assemble_market in one step.
FiniteMarket build_finite_market(const SurplusMatrix& phi, const Margins& margins,
                                 const NoiseSpec& spec, std::uint64_t seed);

}  // namespace tumatch
