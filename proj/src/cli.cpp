#include "tumatch/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tumatch/assignment.hpp"
#include "tumatch/config.hpp"
#include "tumatch/estimation.hpp"
#include "tumatch/io.hpp"
#include "tumatch/ipfp.hpp"
#include "tumatch/market_core.hpp"
#include "tumatch/montecarlo.hpp"
#include "tumatch/tinbergen.hpp"

namespace tumatch {

namespace {

// Shortest round-trip formatting for human-facing output; files use the
// fixed 17-digit form.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void print_matrix(std::ostream& out, const char* label, const Eigen::MatrixXd& m) {
  out << label << "\n";
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) out << (c ? " " : "") << fmt(m(r, c));
    out << "\n";
  }
}

void print_vector(std::ostream& out, const char* label, const Eigen::VectorXd& v) {
  out << label << "\n";
  for (int k = 0; k < v.size(); ++k) out << (k ? " " : "") << fmt(v[k]);
  out << "\n";
}

// "0.5,1;1,1.6" -> 2x2 matrix (rows split on ';').
Eigen::MatrixXd parse_matrix_flag(const std::string& text, const std::string& flag) {
  std::vector<std::vector<double>> rows;
  std::stringstream row_stream(text);
  std::string row;
  while (std::getline(row_stream, row, ';')) {
    std::vector<double> vals;
    std::stringstream cell_stream(row);
    std::string cell;
    while (std::getline(cell_stream, cell, ',')) {
      try {
        vals.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError(flag, "cannot parse number '" + cell + "'");
      }
    }
    if (vals.empty()) throw ConfigError(flag, "empty row");
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ConfigError(flag, "empty matrix");
  Eigen::MatrixXd out(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw ConfigError(flag, "ragged rows");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      out(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  }
  return out;
}

Eigen::VectorXd parse_vector_flag(const std::string& text, const std::string& flag) {
  const Eigen::MatrixXd m = parse_matrix_flag(text, flag);
  if (m.rows() != 1) throw ConfigError(flag, "expected a single row of numbers");
  return m.row(0).transpose();
}

template <class Cmd>
Cmd expect_command(RunConfig&& cfg, const char* name) {
  if (auto* c = std::get_if<Cmd>(&cfg)) return std::move(*c);
  throw ConfigError("/command", std::string("config file is not a '") + name + "' command");
}

NoiseModel model_from_flag(const std::string& s) {
  if (s == "separable") return NoiseModel::separable;
  if (s == "missing_shock") return NoiseModel::missing_shock;
  if (s == "missing_interaction") return NoiseModel::missing_interaction;
  throw ConfigError("/model", "unknown model '" + s + "'");
}

PairShockDist nu_from_flag(const std::string& s) {
  if (s == "gumbel") return PairShockDist::gumbel;
  if (s == "logistic") return PairShockDist::logistic;
  throw ConfigError("/nu", "unknown nu distribution '" + s + "'");
}

int cmd_ipfp(const IpfpCommand& cmd, std::ostream& out) {
  IpfpDiagnostics diag;
  const MatchingPatterns mu = ipfp_solve(cmd.phi, cmd.margins, cmd.tol, cmd.max_iter, &diag);
  const auto [U, V] = choo_siow_utilities(mu);
  print_matrix(out, "mu", mu.mu);
  print_vector(out, "mu_x0", mu.mu_x0);
  print_vector(out, "mu_0y", mu.mu_0y);
  print_matrix(out, "U", U);
  print_matrix(out, "V", V);
  out << "iterations " << diag.iterations << "\n";
  out << "residual " << fmt(diag.residual) << "\n";
  return 0;
}

int cmd_solve(const SolveCommand& cmd, std::ostream& out) {
  const TypeSpace space(cmd.phi.X(), cmd.phi.Y());
  const FiniteMarket market = build_finite_market(cmd.phi, cmd.margins, cmd.noise, cmd.seed);
  const FiniteMatching sol = solve_assignment(market);
  const MatchingPatterns mu =
      aggregate_matching(sol.matches, sol.single_men, sol.single_women, market, space);
  print_matrix(out, "mu", mu.mu);
  print_vector(out, "mu_x0", mu.mu_x0);
  print_vector(out, "mu_0y", mu.mu_0y);
  out << "objective " << fmt(sol.objective) << "\n";
  try {
    const SurplusMatrix phi_hat = phi_closed_form(mu);
    print_matrix(out, "phi_hat", phi_hat.phi);
    if (phi_hat.X() == 2 && phi_hat.Y() == 2)
      out << "d2_hat " << fmt(supermodular_core(phi_hat)) << "\n";
  } catch (const ZeroCellError& e) {
    out << "phi_hat undefined: " << e.what() << "\n";
  }
  const TypeLevelDuals duals = type_level_duals(sol, market, space);
  print_matrix(out, "shares", duals.share);
  return 0;
}

int cmd_variance(const VarianceCommand& cmd, std::ostream& out) {
  const OddsRatioVariance v = phi0_avar(cmd.mu4, cmd.n);
  out << "variance " << fmt(v.variance) << "\n";
  out << "floor " << fmt(v.floor) << "\n";
  out << "se " << fmt(std::sqrt(v.variance)) << "\n";
  if (cmd.d0) out << "equal_types_variance " << fmt(phi0_avar_equal_types(*cmd.d0, cmd.n)) << "\n";
  return 0;
}

int cmd_tinbergen(const TinbergenCommand& cmd, std::ostream& out) {
  const MatchedPairSample pairs = simulate_quadratic_market(cmd.spec, cmd.seed);
  const int full = static_cast<int>(cmd.spec.a.rows());
  const AffineMapEstimate all_dims = estimate_affine_map(pairs, full);
  print_matrix(out, "t_hat_full", all_dims.t_hat);
  if (cmd.spec.observed_dims < full) {
    const AffineMapEstimate observed = estimate_affine_map(pairs, cmd.spec.observed_dims);
    print_matrix(out, "t_hat_observed", observed.t_hat);
    print_matrix(out, "residual_cov_observed", observed.residual_cov);
  } else {
    print_matrix(out, "residual_cov_full", all_dims.residual_cov);
  }
  return 0;
}

int cmd_estimate(const EstimateCommand& cmd, std::ostream& out) {
  const MatchingPatterns mu = read_patterns_csv(cmd.input);
  const long n = cmd.sample_size > 0 ? cmd.sample_size
                                     : static_cast<long>(std::llround(mu.total_mass()));
  const SurplusMatrix phi_hat = phi_closed_form(mu);
  print_matrix(out, "phi_hat", phi_hat.phi);
  if (phi_hat.X() == 2 && phi_hat.Y() == 2)
    out << "d2_hat " << fmt(supermodular_core(phi_hat)) << "\n";
  out << "sample_size " << n << "\n";
  if (!cmd.basis.empty()) {
    MinDistanceSpec spec;
    spec.basis = cmd.basis;
    spec.weight = cmd.weight;
    const MinDistanceResult res = min_distance(spec, mu, n);
    print_vector(out, "beta_hat", res.beta_hat);
    Eigen::VectorXd se(res.beta_hat.size());
    for (int k = 0; k < se.size(); ++k) se[k] = std::sqrt(res.cov_beta(k, k));
    print_vector(out, "beta_se", se);
    out << "j_stat " << fmt(res.j_stat) << "\n";
    out << "df " << res.df << "\n";
    if (res.df > 0) out << "p_value " << fmt(1.0 - chi_squared_cdf(res.j_stat, res.df)) << "\n";
    if (res.ridged) out << "note covariance ridged by 1e-10\n";
  }
  return 0;
}

int dispatch_any(const IpfpCommand& c, std::ostream& out, std::ostream&) { return cmd_ipfp(c, out); }
int dispatch_any(const SolveCommand& c, std::ostream& out, std::ostream&) { return cmd_solve(c, out); }
int dispatch_any(const VarianceCommand& c, std::ostream& out, std::ostream&) { return cmd_variance(c, out); }
int dispatch_any(const TinbergenCommand& c, std::ostream& out, std::ostream&) { return cmd_tinbergen(c, out); }
int dispatch_any(const EstimateCommand& c, std::ostream& out, std::ostream&) { return cmd_estimate(c, out); }

const std::vector<std::string> kDrawHeader = {
    "scenario_id", "draw",    "seed",    "r2",      "modularity", "margins", "phi11",
    "phi12",       "phi21",   "phi22",   "d2",      "share11",    "share12", "share21",
    "share22",     "mu11",    "mu12",    "mu21",    "mu22",       "mu10",    "mu20",
    "mu01",        "mu02",    "lp_objective", "degenerate"};

void write_draw_rows(CsvWriter& csv, const ScenarioConfig& sc,
                     const std::vector<DrawResult>& results) {
  for (const auto& r : results) {
    std::vector<std::string> row;
    row.reserve(kDrawHeader.size());
    row.push_back(sc.id);
    row.push_back(std::to_string(r.draw));
    row.push_back(format_u64(r.seed));
    row.push_back(format_double(sc.r2));
    row.push_back(to_string(sc.modularity));
    row.push_back(to_string(sc.margins_kind));
    const bool has_phi = !r.failed && !r.degenerate;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        row.push_back(has_phi ? format_double(r.phi_hat(x, y)) : "");
    row.push_back(has_phi ? format_double(r.d2_hat) : "");
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        row.push_back(r.failed ? "" : format_double(r.shares(x, y)));
    if (r.failed) {
      for (int k = 0; k < 8; ++k) row.push_back("");
      row.push_back("");
    } else {
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) row.push_back(format_double(r.mu.mu(x, y)));
      row.push_back(format_double(r.mu.mu_x0[0]));
      row.push_back(format_double(r.mu.mu_x0[1]));
      row.push_back(format_double(r.mu.mu_0y[0]));
      row.push_back(format_double(r.mu.mu_0y[1]));
      row.push_back(format_double(r.lp_objective));
    }
    row.push_back(r.failed || r.degenerate ? "1" : "0");
    csv.row(row);
  }
}

const std::vector<std::string> kSummaryHeader = {"scenario_id", "statistic", "mean", "sd",
                                                 "q05",         "q25",       "q50",  "q75",
                                                 "q95",         "bias",      "n_degenerate"};

void write_summary_rows(CsvWriter& csv, const ScenarioSummary& s) {
  const std::string degen = std::to_string(s.n_degenerate);
  for (const auto& [name, stat] : s.stats)
    csv.row({s.scenario_id, name, format_double(stat.mean), format_double(stat.sd),
             format_double(stat.q05), format_double(stat.q25), format_double(stat.q50),
             format_double(stat.q75), format_double(stat.q95), format_double(stat.bias), degen});
  auto value_row = [&](const std::string& name, double v) {
    csv.row({s.scenario_id, name, format_double(v), "", "", "", "", "", "", "", degen});
  };
  for (int x = 0; x < s.ipfp_mu.X(); ++x)
    for (int y = 0; y < s.ipfp_mu.Y(); ++y)
      value_row("ipfp_mu" + std::to_string(x + 1) + std::to_string(y + 1), s.ipfp_mu.mu(x, y));
  for (int x = 0; x < s.ipfp_mu.X(); ++x)
    value_row("ipfp_mu" + std::to_string(x + 1) + "0", s.ipfp_mu.mu_x0[x]);
  for (int y = 0; y < s.ipfp_mu.Y(); ++y)
    value_row("ipfp_mu0" + std::to_string(y + 1), s.ipfp_mu.mu_0y[y]);
  value_row("ipfp_gap", s.ipfp_gap);
}

int cmd_montecarlo(const MonteCarloCommand& cmd, std::ostream& out, std::ostream& err) {
  std::filesystem::create_directories(cmd.out_dir);
  const std::string draws_path = cmd.out_dir + "/draws.csv";
  const std::string summary_path = cmd.out_dir + "/summary.csv";

  nlohmann::json canon;
  canon["command"] = "montecarlo";
  canon["grid"] = cmd.grid;
  canon["population"] = cmd.population;
  canon["draws"] = cmd.n_draws;
  canon["seed"] = cmd.seed;
  canon["model"] = cmd.model == NoiseModel::separable         ? "separable"
                   : cmd.model == NoiseModel::missing_shock   ? "missing_shock"
                                                              : "missing_interaction";
  canon["nu"] = cmd.nu_dist == PairShockDist::gumbel ? "gumbel" : "logistic";
  const std::string canonical = canon.dump();

  CsvWriter draws(draws_path);
  draws.row(kDrawHeader);
  CsvWriter summary(summary_path);
  summary.row(kSummaryHeader);

  std::size_t done = 0;
  for (const auto& sc : cmd.scenarios) {
    const std::vector<DrawResult> results = run_scenario(sc);
    write_draw_rows(draws, sc, results);
    ScenarioSummary s = summarize(results, scenario_phi(sc.modularity),
                                  scenario_margins(sc.margins_kind, sc.population));
    s.ipfp_misspecified = sc.r2 > 0;
    write_summary_rows(summary, s);
    err << "scenario " << ++done << "/" << cmd.scenarios.size() << " " << sc.id << ": "
        << s.n_degenerate << " degenerate, " << s.n_failed << " failed\n";
  }
  write_meta_sidecar(draws_path, canonical, cmd.seed);
  write_meta_sidecar(summary_path, canonical, cmd.seed);
  out << "wrote " << draws_path << "\n";
  out << "wrote " << summary_path << "\n";
  return 0;
}

int dispatch_any(const MonteCarloCommand& c, std::ostream& out, std::ostream& err) {
  return cmd_montecarlo(c, out, err);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bipartite matching markets with transferable utility: equilibrium, "
               "simulation, and estimation"};
  app.name("tumatch");
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);
  int exit_code = 0;

  // ---- run: dispatch entirely from a config file
  std::string run_config_path;
  auto* run_cmd = app.add_subcommand("run", "Run any command from a JSON config file");
  run_cmd->add_option("config", run_config_path, "JSON config file")->required();

  // ---- ipfp
  struct {
    std::string config, phi, n, m;
    double tol = 1e-10;
    int max_iter = 100000;
  } ipfp_opt;
  auto* ipfp_cmd = app.add_subcommand("ipfp", "Solve the large-market logit equilibrium");
  ipfp_cmd->add_option("--config", ipfp_opt.config, "JSON config file");
  ipfp_cmd->add_option("--phi", ipfp_opt.phi, "surplus matrix, rows separated by ';'");
  ipfp_cmd->add_option("--n", ipfp_opt.n, "men masses per type, comma-separated");
  ipfp_cmd->add_option("--m", ipfp_opt.m, "women masses per type");
  ipfp_cmd->add_option("--tol", ipfp_opt.tol, "margin residual tolerance");
  ipfp_cmd->add_option("--max-iter", ipfp_opt.max_iter, "iteration cap");

  // ---- solve
  struct {
    std::string config, phi, n, m, model = "separable", nu = "gumbel";
    double r2 = 0.0;
    int interaction_dim = 1;
    std::uint64_t seed = 1;
  } solve_opt;
  auto* solve_cmd = app.add_subcommand("solve", "Draw one finite market and solve it exactly");
  solve_cmd->add_option("--config", solve_opt.config, "JSON config file");
  solve_cmd->add_option("--phi", solve_opt.phi, "surplus matrix, rows separated by ';'");
  solve_cmd->add_option("--n", solve_opt.n, "men counts per type");
  solve_cmd->add_option("--m", solve_opt.m, "women counts per type");
  solve_cmd->add_option("--r2", solve_opt.r2, "non-separability share in [0,1]");
  solve_cmd->add_option("--model", solve_opt.model,
                        "separable | missing_shock | missing_interaction");
  solve_cmd->add_option("--nu", solve_opt.nu, "pair-shock distribution: gumbel | logistic");
  solve_cmd->add_option("--interaction-dim", solve_opt.interaction_dim,
                        "dimension of the interaction vectors");
  solve_cmd->add_option("--seed", solve_opt.seed, "master seed");

  // ---- montecarlo
  struct {
    std::string config, grid = "table1", model = "missing_shock", nu = "gumbel", out_dir = ".";
    int population = 200, draws = 100;
    std::uint64_t seed = 1;
  } mc_opt;
  auto* mc_cmd = app.add_subcommand("montecarlo", "Run the scenario grid and emit CSVs");
  mc_cmd->add_option("--config", mc_opt.config, "JSON config file");
  mc_cmd->add_option("--grid", mc_opt.grid, "scenario grid (table1)");
  mc_cmd->add_option("--population", mc_opt.population, "total individuals, multiple of 8");
  mc_cmd->add_option("--draws", mc_opt.draws, "datasets per scenario");
  mc_cmd->add_option("--seed", mc_opt.seed, "master seed");
  mc_cmd->add_option("--model", mc_opt.model, "noise model for r2 > 0 scenarios");
  mc_cmd->add_option("--nu", mc_opt.nu, "pair-shock distribution");
  mc_cmd->add_option("--out", mc_opt.out_dir, "output directory");

  // ---- variance
  struct {
    std::string config, mu;
    long n = 0;
    double d0 = -1.0;
  } var_opt;
  auto* var_cmd = app.add_subcommand("variance", "Odds-ratio estimator variance for a 2x2 table");
  var_cmd->add_option("--config", var_opt.config, "JSON config file");
  var_cmd->add_option("--mu", var_opt.mu, "four marriage proportions, row-major");
  var_cmd->add_option("--n", var_opt.n, "number of sampled marriages");
  var_cmd->add_option("--d0", var_opt.d0, "diagonal share for the equal-types variant");

  // ---- tinbergen
  struct {
    std::string config, a, sigma_x, sigma_y;
    int n_agents = 1000, observed_dims = 0, cap = 2000;
    std::uint64_t seed = 1;
  } tin_opt;
  auto* tin_cmd = app.add_subcommand("tinbergen", "Quadratic-Gaussian omitted-variable experiment");
  tin_cmd->add_option("--config", tin_opt.config, "JSON config file");
  tin_cmd->add_option("--a", tin_opt.a, "interaction matrix, rows separated by ';'");
  tin_cmd->add_option("--sigma-x", tin_opt.sigma_x, "men type covariance (default identity)");
  tin_cmd->add_option("--sigma-y", tin_opt.sigma_y, "women type covariance");
  tin_cmd->add_option("--n-agents", tin_opt.n_agents, "agents per side");
  tin_cmd->add_option("--observed-dims", tin_opt.observed_dims, "observed leading dimensions");
  tin_cmd->add_option("--cap", tin_opt.cap, "refuse markets larger than this");
  tin_cmd->add_option("--seed", tin_opt.seed, "master seed");

  // ---- estimate
  struct {
    std::string config, input, weight = "optimal";
    long sample_size = 0;
  } est_opt;
  auto* est_cmd = app.add_subcommand("estimate", "Estimate surplus from a matching-pattern CSV");
  est_cmd->add_option("--config", est_opt.config, "JSON config file (basis lives here)");
  est_cmd->add_option("--input", est_opt.input, "matching-pattern CSV (header x,y,mass)");
  est_cmd->add_option("--sample-size", est_opt.sample_size,
                      "sampled individuals behind the patterns (default: total mass)");
  est_cmd->add_option("--weight", est_opt.weight, "identity | optimal");

  run_cmd->callback([&]() {
    exit_code = std::visit([&](const auto& c) { return dispatch_any(c, out, err); },
                           parse_config(run_config_path));
  });

  ipfp_cmd->callback([&]() {
    IpfpCommand cmd;
    if (!ipfp_opt.config.empty())
      cmd = expect_command<IpfpCommand>(parse_config(ipfp_opt.config), "ipfp");
    else if (ipfp_opt.phi.empty() || ipfp_opt.n.empty() || ipfp_opt.m.empty())
      throw ConfigError("/phi", "provide --config or all of --phi, --n, --m");
    if (!ipfp_opt.phi.empty()) cmd.phi = SurplusMatrix(parse_matrix_flag(ipfp_opt.phi, "/phi"));
    if (!ipfp_opt.n.empty() || !ipfp_opt.m.empty()) {
      if (ipfp_opt.n.empty() || ipfp_opt.m.empty())
        throw ConfigError("/n", "provide both --n and --m");
      cmd.margins =
          Margins(parse_vector_flag(ipfp_opt.n, "/n"), parse_vector_flag(ipfp_opt.m, "/m"));
    }
    if (ipfp_cmd->count("--tol")) cmd.tol = ipfp_opt.tol;
    if (ipfp_cmd->count("--max-iter")) cmd.max_iter = ipfp_opt.max_iter;
    exit_code = cmd_ipfp(cmd, out);
  });

  solve_cmd->callback([&]() {
    SolveCommand cmd;
    if (!solve_opt.config.empty())
      cmd = expect_command<SolveCommand>(parse_config(solve_opt.config), "solve");
    else if (solve_opt.phi.empty() || solve_opt.n.empty() || solve_opt.m.empty())
      throw ConfigError("/phi", "provide --config or all of --phi, --n, --m");
    if (!solve_opt.phi.empty()) cmd.phi = SurplusMatrix(parse_matrix_flag(solve_opt.phi, "/phi"));
    if (!solve_opt.n.empty() || !solve_opt.m.empty()) {
      if (solve_opt.n.empty() || solve_opt.m.empty())
        throw ConfigError("/n", "provide both --n and --m");
      cmd.margins =
          Margins(parse_vector_flag(solve_opt.n, "/n"), parse_vector_flag(solve_opt.m, "/m"));
    }
    if (solve_cmd->count("--r2")) {
      if (solve_opt.r2 < 0 || solve_opt.r2 > 1)
        throw ConfigError("/r2", "value " + std::to_string(solve_opt.r2) + " outside [0, 1]");
      cmd.noise.r2 = solve_opt.r2;
    }
    if (solve_cmd->count("--model")) cmd.noise.model = model_from_flag(solve_opt.model);
    if (solve_cmd->count("--nu")) cmd.noise.nu_dist = nu_from_flag(solve_opt.nu);
    if (solve_cmd->count("--interaction-dim")) cmd.noise.interaction_dim = solve_opt.interaction_dim;
    if (solve_cmd->count("--seed")) cmd.seed = solve_opt.seed;
    exit_code = cmd_solve(cmd, out);
  });

  mc_cmd->callback([&]() {
    MonteCarloCommand cmd;
    if (!mc_opt.config.empty())
      cmd = expect_command<MonteCarloCommand>(parse_config(mc_opt.config), "montecarlo");
    if (mc_cmd->count("--grid")) cmd.grid = mc_opt.grid;
    if (mc_cmd->count("--population")) cmd.population = mc_opt.population;
    if (mc_cmd->count("--draws")) cmd.n_draws = mc_opt.draws;
    if (mc_cmd->count("--seed")) cmd.seed = mc_opt.seed;
    if (mc_cmd->count("--model")) cmd.model = model_from_flag(mc_opt.model);
    if (mc_cmd->count("--nu")) cmd.nu_dist = nu_from_flag(mc_opt.nu);
    if (mc_cmd->count("--out")) cmd.out_dir = mc_opt.out_dir;
    try {
      cmd.materialize();
    } catch (const DomainError& e) {
      throw ConfigError("/population", e.what());
    }
    exit_code = cmd_montecarlo(cmd, out, err);
  });

  var_cmd->callback([&]() {
    VarianceCommand cmd;
    if (!var_opt.config.empty())
      cmd = expect_command<VarianceCommand>(parse_config(var_opt.config), "variance");
    else if (var_opt.mu.empty() || var_opt.n == 0)
      throw ConfigError("/mu", "provide --config or both --mu and --n");
    if (!var_opt.mu.empty()) {
      const Eigen::VectorXd v = parse_vector_flag(var_opt.mu, "/mu");
      if (v.size() != 4) throw ConfigError("/mu", "expected exactly 4 proportions");
      cmd.mu4 << v[0], v[1], v[2], v[3];
    }
    if (var_cmd->count("--n")) cmd.n = var_opt.n;
    if (var_cmd->count("--d0")) cmd.d0 = var_opt.d0;
    exit_code = cmd_variance(cmd, out);
  });

  tin_cmd->callback([&]() {
    TinbergenCommand cmd;
    const bool from_config = !tin_opt.config.empty();
    if (from_config)
      cmd = expect_command<TinbergenCommand>(parse_config(tin_opt.config), "tinbergen");
    else if (tin_opt.a.empty())
      throw ConfigError("/a", "provide --config or --a");
    if (!tin_opt.a.empty()) cmd.spec.a = parse_matrix_flag(tin_opt.a, "/a");
    const int d = static_cast<int>(cmd.spec.a.rows());
    if (!tin_opt.sigma_x.empty())
      cmd.spec.sigma_x = parse_matrix_flag(tin_opt.sigma_x, "/sigma_x");
    else if (cmd.spec.sigma_x.rows() != d)
      cmd.spec.sigma_x = Eigen::MatrixXd::Identity(d, d);
    if (!tin_opt.sigma_y.empty())
      cmd.spec.sigma_y = parse_matrix_flag(tin_opt.sigma_y, "/sigma_y");
    else if (cmd.spec.sigma_y.rows() != d)
      cmd.spec.sigma_y = Eigen::MatrixXd::Identity(d, d);
    if (tin_cmd->count("--n-agents")) cmd.spec.n_agents = tin_opt.n_agents;
    if (tin_cmd->count("--cap")) cmd.spec.cap = tin_opt.cap;
    if (tin_cmd->count("--observed-dims"))
      cmd.spec.observed_dims = tin_opt.observed_dims;
    else if (!from_config)
      cmd.spec.observed_dims = d;
    if (tin_cmd->count("--seed")) cmd.seed = tin_opt.seed;
    cmd.spec.validate();
    exit_code = cmd_tinbergen(cmd, out);
  });

  est_cmd->callback([&]() {
    EstimateCommand cmd;
    if (!est_opt.config.empty())
      cmd = expect_command<EstimateCommand>(parse_config(est_opt.config), "estimate");
    else if (est_opt.input.empty())
      throw ConfigError("/input", "provide --config or --input");
    if (!est_opt.input.empty()) cmd.input = est_opt.input;
    if (est_cmd->count("--sample-size")) cmd.sample_size = est_opt.sample_size;
    if (est_cmd->count("--weight")) {
      if (est_opt.weight == "identity")
        cmd.weight = WeightKind::identity;
      else if (est_opt.weight == "optimal")
        cmd.weight = WeightKind::optimal;
      else
        throw ConfigError("/weight", "unknown weight '" + est_opt.weight + "'");
    }
    exit_code = cmd_estimate(cmd, out);
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);  // help paths
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace tumatch
