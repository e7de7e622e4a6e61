#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tumatch/stochastic.hpp"
#include "tumatch/types.hpp"

namespace tumatch {

enum class MarginsKind { symmetric, asymmetric };
enum class Modularity { small, large };

const char* to_string(MarginsKind k);
const char* to_string(Modularity m);

// One simulation scenario of the 2x2 education market.
struct ScenarioConfig {
  std::string id;
  int scenario_index = 0;  // mixed into per-draw seeds
  int population = 200;    // total individuals across both sides
  MarginsKind margins_kind = MarginsKind::symmetric;
  Modularity modularity = Modularity::small;
  double r2 = 0.0;
  NoiseModel model = NoiseModel::missing_shock;
  PairShockDist nu_dist = PairShockDist::gumbel;
  int n_draws = 100;
  std::uint64_t master_seed = 0;
};

// The systematic surplus for a modularity case.
SurplusMatrix scenario_phi(Modularity m);

// Type counts: symmetric puts 25% of the population in each of the four
// groups; asymmetric puts 37.5% / 12.5% on the men and the reverse on the
// women. population must be divisible by 8.
Margins scenario_margins(MarginsKind kind, int population);

// The full grid: 2 margins x 2 modularities x 6 r2 values.
std::vector<ScenarioConfig> table1_grid(int population, int n_draws,
                                        std::uint64_t master_seed);

// Everything recorded about one simulated draw.
struct DrawResult {
  std::string scenario_id;
  int draw = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;  // a required estimator cell was zero
  bool failed = false;      // solver error; excluded from all statistics
  std::string error;
  Eigen::MatrixXd phi_hat;     // empty when degenerate
  double d2_hat = 0.0;         // valid iff !degenerate
  Eigen::MatrixXd shares;      // NaN where the cell had no matches
  Eigen::MatrixXi share_count; // matched pairs behind each share cell
  MatchingPatterns mu;         // counts
  double lp_objective = 0.0;
};

// Per-draw seed: scenario sub-stream of the master seed, then draw sub-stream
// of that, so scenarios and draws can run in any order or in parallel.
std::uint64_t scenario_draw_seed(std::uint64_t master_seed, int scenario_index, int draw);

// Runs every draw of a scenario: build market, solve the assignment LP,
// aggregate, estimate. Draw errors are recorded, not propagated. Parallel
// across draws (TUMATCH_THREADS, default all cores); output order is by draw
// index regardless of execution order.
std::vector<DrawResult> run_scenario(const ScenarioConfig& config);

struct StatSummary {
  double mean = 0.0, sd = 0.0;
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  double bias = 0.0;  // mean - truth; NaN when no truth applies
  int n = 0;          // draws entering this statistic
};

struct ScenarioSummary {
  std::string scenario_id;
  int n_draws = 0;
  int n_degenerate = 0;
  int n_failed = 0;
  std::vector<std::pair<std::string, StatSummary>> stats;
  MatchingPatterns ipfp_mu;  // large-market benchmark at the scenario phi
  // Max absolute gap between mean LP counts and the IPFP benchmark, per
  // marriage cell, both sides normalized by population.
  double ipfp_gap = 0.0;
  // The separable benchmark is the true model only at r2 = 0.
  bool ipfp_misspecified = false;
};

ScenarioSummary summarize(const std::vector<DrawResult>& results, const SurplusMatrix& truth,
                          const Margins& margins);

// Linear-interpolation quantile of a sorted copy of `values`.
double quantile(std::vector<double> values, double p);

// Worker count: TUMATCH_THREADS when set, else hardware concurrency, at least 1.
int resolve_thread_count();

}  // namespace tumatch
