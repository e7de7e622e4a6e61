#include "tumatch/stochastic.hpp"

#include <cmath>
#include <string>

namespace tumatch {

namespace {

// Sub-stream tags; one per noise component.
enum : std::uint64_t { kEpsStream = 1, kEtaStream = 2, kNuStream = 3, kXiStream = 4, kZetaStream = 5 };

constexpr double kPi = 3.14159265358979323846;

std::vector<int> expand_types(const Eigen::VectorXd& counts) {
  std::vector<int> types;
  types.reserve(static_cast<std::size_t>(counts.sum()));
  for (int t = 0; t < counts.size(); ++t) {
    const long c = std::lround(counts[t]);
    for (long k = 0; k < c; ++k) types.push_back(t);
  }
  return types;
}

Eigen::MatrixXd gumbel_matrix(std::uint64_t seed, int rows, int cols) {
  Rng rng(seed);
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = rng.gumbel_centered();
  return out;
}

Eigen::MatrixXd normal_matrix(std::uint64_t seed, int rows, int cols) {
  Rng rng(seed);
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = rng.normal();
  return out;
}

}  // namespace

void NoiseSpec::validate() const {
  if (r2 < 0.0 || r2 > 1.0)
    throw DomainError("NoiseSpec: r2 must lie in [0, 1], got " + std::to_string(r2));
  if (interaction_dim < 1)
    throw DomainError("NoiseSpec: interaction_dim must be >= 1");
}

std::vector<double> draw_gumbel_centered(Rng& stream, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (auto& v : out) v = stream.gumbel_centered();
  return out;
}

std::pair<double, double> sigma_tau_from_r2(double r2) {
  if (r2 < 0.0 || r2 > 1.0)
    throw DomainError("sigma_tau_from_r2: r2 must lie in [0, 1], got " + std::to_string(r2));
  return {std::sqrt(2.0 * r2), std::sqrt(1.0 - r2)};
}

DrawBundle draw_bundle(const TypeSpace& space, const Margins& margins,
                       const NoiseSpec& spec, std::uint64_t seed) {
  spec.validate();
  if (margins.n.size() != space.X || margins.m.size() != space.Y)
    throw DimensionError("draw_bundle: margins do not match type space");
  if (!margins.integral())
    throw DomainError("draw_bundle: margins must be integer counts");

  const int I = static_cast<int>(std::lround(margins.total_men()));
  const int J = static_cast<int>(std::lround(margins.total_women()));

  DrawBundle b;
  b.seed = seed;
  b.eps = gumbel_matrix(derive_seed(seed, kEpsStream), I, space.Y + 1);
  b.eta = gumbel_matrix(derive_seed(seed, kEtaStream), J, space.X + 1);

  if (spec.model == NoiseModel::missing_shock && spec.r2 > 0.0) {
    Rng rng(derive_seed(seed, kNuStream));
    b.nu.resize(I, J);
    for (int i = 0; i < I; ++i)
      for (int j = 0; j < J; ++j)
        b.nu(i, j) = spec.nu_dist == PairShockDist::gumbel ? rng.gumbel_centered()
                                                           : rng.logistic_matched();
  } else if (spec.model == NoiseModel::missing_interaction && spec.r2 > 0.0) {
    b.xi = normal_matrix(derive_seed(seed, kXiStream), I, spec.interaction_dim);
    b.zeta = normal_matrix(derive_seed(seed, kZetaStream), J, spec.interaction_dim);
  }
  return b;
}

FiniteMarket assemble_market(const SurplusMatrix& phi, const Margins& margins,
                             const NoiseSpec& spec, const DrawBundle& bundle) {
  spec.validate();
  const int X = phi.X(), Y = phi.Y();
  if (margins.n.size() != X || margins.m.size() != Y)
    throw DimensionError("assemble_market: phi and margins shapes differ");

  FiniteMarket mkt;
  mkt.x_types = expand_types(margins.n);
  mkt.y_types = expand_types(margins.m);
  const int I = mkt.I(), J = mkt.J();
  if (bundle.eps.rows() != I || bundle.eps.cols() != Y + 1 ||
      bundle.eta.rows() != J || bundle.eta.cols() != X + 1)
    throw DimensionError("assemble_market: bundle does not fit this market");

  const auto [sigma, tau] = sigma_tau_from_r2(spec.r2);
  // The interaction product xi.zeta/sqrt(d) has unit variance, not pi^2/6, so
  // rescale sigma to keep r2 the variance share of the pair component.
  const double pair_scale = spec.model == NoiseModel::missing_interaction
                                ? sigma * std::sqrt(kPi * kPi / 6.0)
                                : sigma;

  const bool add_nu =
      spec.model == NoiseModel::missing_shock && pair_scale != 0.0 && bundle.nu.size() > 0;
  const bool add_xi = spec.model == NoiseModel::missing_interaction &&
                      pair_scale != 0.0 && bundle.xi.size() > 0;
  if (spec.model == NoiseModel::missing_shock && pair_scale > 0.0 && bundle.nu.size() == 0)
    throw DimensionError("assemble_market: bundle lacks nu draws");
  if (spec.model == NoiseModel::missing_interaction && pair_scale > 0.0 && bundle.xi.size() == 0)
    throw DimensionError("assemble_market: bundle lacks xi/zeta draws");
  const double inv_sqrt_d = add_xi ? 1.0 / std::sqrt(static_cast<double>(spec.interaction_dim)) : 0.0;

  mkt.tilde_phi.resize(I, J);
  for (int i = 0; i < I; ++i) {
    const int x = mkt.x_types[i];
    for (int j = 0; j < J; ++j) {
      const int y = mkt.y_types[j];
      double v = phi.phi(x, y) + tau * (bundle.eps(i, 1 + y) + bundle.eta(j, 1 + x));
      if (add_nu) v += pair_scale * bundle.nu(i, j);
      if (add_xi) v += pair_scale * inv_sqrt_d * bundle.xi.row(i).dot(bundle.zeta.row(j));
      mkt.tilde_phi(i, j) = v;
    }
  }

  const double singles_scale = spec.scale_singles_by_tau ? tau : 1.0;
  mkt.phi_i0 = singles_scale * bundle.eps.col(0);
  mkt.phi_0j = singles_scale * bundle.eta.col(0);
  return mkt;
}

FiniteMarket build_finite_market(const SurplusMatrix& phi, const Margins& margins,
                                 const NoiseSpec& spec, std::uint64_t seed) {
  TypeSpace space(phi.X(), phi.Y());
  return assemble_market(phi, margins, spec, draw_bundle(space, margins, spec, seed));
}

std::vector<long> draw_multinomial(Rng& rng, long trials, const std::vector<double>& probs) {
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (probs[k] < 0) throw DomainError("draw_multinomial: negative probability");
    acc += probs[k];
    cdf[k] = acc;
  }
  if (acc <= 0) throw DomainError("draw_multinomial: zero total probability");
  std::vector<long> counts(probs.size(), 0);
  for (long t = 0; t < trials; ++t) {
    const double u = rng.uniform() * acc;
    std::size_t k = 0;
    while (k + 1 < cdf.size() && u > cdf[k]) ++k;
    ++counts[k];
  }
  return counts;
}

}  // namespace tumatch
