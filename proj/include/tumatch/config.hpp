#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tumatch/estimation.hpp"
#include "tumatch/montecarlo.hpp"
#include "tumatch/stochastic.hpp"
#include "tumatch/tinbergen.hpp"
#include "tumatch/types.hpp"

namespace tumatch {

struct IpfpCommand {
  SurplusMatrix phi;
  Margins margins;
  double tol = 1e-10;
  int max_iter = 100000;
};

struct SolveCommand {
  SurplusMatrix phi;
  Margins margins;  // integer counts
  NoiseSpec noise;
  std::uint64_t seed = 1;
};

struct MonteCarloCommand {
  std::string grid = "table1";
  int population = 200;  // desk-scale default; the full study uses 1000/1000
  int n_draws = 100;
  std::uint64_t seed = 1;
  NoiseModel model = NoiseModel::missing_shock;
  PairShockDist nu_dist = PairShockDist::gumbel;
  std::string out_dir = ".";
  std::vector<ScenarioConfig> scenarios;

  // Fills `scenarios` from the other fields; call again after overrides.
  void materialize();
};

struct VarianceCommand {
  Eigen::Matrix2d mu4;
  long n = 0;
  std::optional<double> d0;  // adds the equal-types variant when present
};

struct TinbergenCommand {
  QuadraticSpec spec;
  std::uint64_t seed = 1;
};

struct EstimateCommand {
  std::string input;     // matching-pattern CSV
  long sample_size = 0;  // 0 infers round(total mass)
  std::vector<Eigen::MatrixXd> basis;  // empty for closed-form only
  WeightKind weight = WeightKind::optimal;
};

using RunConfig = std::variant<IpfpCommand, SolveCommand, MonteCarloCommand, VarianceCommand,
                               TinbergenCommand, EstimateCommand>;

// Parses and validates a JSON config file. Unknown keys, malformed JSON and
// out-of-range values raise ConfigError carrying the offending key path.
RunConfig parse_config(const std::string& path);

// Same, from in-memory text.
RunConfig parse_config_text(const std::string& text);

}  // namespace tumatch
