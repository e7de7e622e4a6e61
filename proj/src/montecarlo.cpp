#include "tumatch/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <thread>

#include "tumatch/assignment.hpp"
#include "tumatch/estimation.hpp"
#include "tumatch/ipfp.hpp"
#include "tumatch/market_core.hpp"

namespace tumatch {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

StatSummary summarize_values(const std::vector<double>& v, double truth) {
  StatSummary s;
  s.n = static_cast<int>(v.size());
  if (v.empty()) {
    s.mean = s.sd = s.q05 = s.q25 = s.q50 = s.q75 = s.q95 = s.bias = kNan;
    return s;
  }
  s.mean = mean_of(v);
  s.sd = sd_of(v, s.mean);
  s.q05 = quantile(v, 0.05);
  s.q25 = quantile(v, 0.25);
  s.q50 = quantile(v, 0.50);
  s.q75 = quantile(v, 0.75);
  s.q95 = quantile(v, 0.95);
  s.bias = std::isnan(truth) ? kNan : s.mean - truth;
  return s;
}

}  // namespace

const char* to_string(MarginsKind k) {
  return k == MarginsKind::symmetric ? "symmetric" : "asymmetric";
}

const char* to_string(Modularity m) { return m == Modularity::small ? "small" : "large"; }

SurplusMatrix scenario_phi(Modularity m) {
  Eigen::MatrixXd phi(2, 2);
  if (m == Modularity::small)
    phi << 0.5, 1.0, 1.0, 1.6;
  else
    phi << 0.5, 1.0, 1.0, 2.5;
  return SurplusMatrix(std::move(phi));
}

Margins scenario_margins(MarginsKind kind, int population) {
  if (population < 8 || population % 8 != 0)
    throw DomainError("scenario_margins: population must be a positive multiple of 8, got " +
                      std::to_string(population));
  Eigen::VectorXd n(2), m(2);
  if (kind == MarginsKind::symmetric) {
    n << population / 4.0, population / 4.0;
    m = n;
  } else {
    n << population * 3.0 / 8.0, population / 8.0;
    m << population / 8.0, population * 3.0 / 8.0;
  }
  return Margins(std::move(n), std::move(m));
}

std::vector<ScenarioConfig> table1_grid(int population, int n_draws,
                                        std::uint64_t master_seed) {
  scenario_margins(MarginsKind::symmetric, population);  // divisibility check
  const double r2_grid[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<ScenarioConfig> out;
  int index = 0;
  for (MarginsKind margins : {MarginsKind::symmetric, MarginsKind::asymmetric})
    for (Modularity mod : {Modularity::small, Modularity::large})
      for (double r2 : r2_grid) {
        ScenarioConfig c;
        c.scenario_index = index++;
        c.population = population;
        c.margins_kind = margins;
        c.modularity = mod;
        c.r2 = r2;
        c.model = NoiseModel::missing_shock;
        c.n_draws = n_draws;
        c.master_seed = master_seed;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%s_%s_r%g", to_string(margins), to_string(mod), r2);
        c.id = buf;
        out.push_back(std::move(c));
      }
  return out;
}

std::uint64_t scenario_draw_seed(std::uint64_t master_seed, int scenario_index, int draw) {
  return derive_seed(derive_seed(master_seed, 0x5CE9A210u + static_cast<std::uint64_t>(scenario_index)),
                     static_cast<std::uint64_t>(draw));
}

namespace {

DrawResult run_one_draw(const ScenarioConfig& config, const SurplusMatrix& phi,
                        const Margins& margins, const TypeSpace& space, int draw) {
  DrawResult r;
  r.scenario_id = config.id;
  r.draw = draw;
  r.seed = scenario_draw_seed(config.master_seed, config.scenario_index, draw);

  NoiseSpec noise;
  noise.model = config.model;
  noise.r2 = config.r2;
  noise.nu_dist = config.nu_dist;

  try {
    const FiniteMarket market = build_finite_market(phi, margins, noise, r.seed);
    const FiniteMatching sol = solve_assignment(market);
    r.mu = aggregate_matching(sol.matches, sol.single_men, sol.single_women, market, space);
    r.lp_objective = sol.objective;

    const TypeLevelDuals duals = type_level_duals(sol, market, space);
    r.shares = duals.share;
    r.share_count = duals.count;

    try {
      r.phi_hat = phi_closed_form(r.mu).phi;
      r.d2_hat = supermodular_core(SurplusMatrix(r.phi_hat));
    } catch (const ZeroCellError&) {
      r.degenerate = true;
      r.phi_hat.resize(0, 0);
      r.d2_hat = kNan;
    }
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = e.what();
  }
  return r;
}

}  // namespace

std::vector<DrawResult> run_scenario(const ScenarioConfig& config) {
  if (config.n_draws < 1) throw DomainError("run_scenario: n_draws must be >= 1");
  const SurplusMatrix phi = scenario_phi(config.modularity);
  const Margins margins = scenario_margins(config.margins_kind, config.population);
  const TypeSpace space(2, 2);

  std::vector<DrawResult> results(static_cast<std::size_t>(config.n_draws));
  const int workers = std::min(resolve_thread_count(), config.n_draws);
  if (workers <= 1) {
    for (int d = 0; d < config.n_draws; ++d)
      results[d] = run_one_draw(config, phi, margins, space, d);
    return results;
  }

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (int d = w; d < config.n_draws; d += workers)
        results[d] = run_one_draw(config, phi, margins, space, d);
    });
  for (auto& t : pool) t.join();
  return results;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return kNan;
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

int resolve_thread_count() {
  if (const char* env = std::getenv("TUMATCH_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

ScenarioSummary summarize(const std::vector<DrawResult>& results, const SurplusMatrix& truth,
                          const Margins& margins) {
  if (results.empty()) throw EmptyDistributionError("summarize: no draws");

  ScenarioSummary out;
  out.scenario_id = results.front().scenario_id;
  out.n_draws = static_cast<int>(results.size());

  std::vector<const DrawResult*> ok;
  for (const auto& r : results) {
    if (r.failed) {
      ++out.n_failed;
      continue;
    }
    if (r.degenerate) ++out.n_degenerate;
    ok.push_back(&r);
  }
  if (ok.empty()) throw EmptyDistributionError("summarize: every draw failed");

  const int X = ok.front()->mu.X(), Y = ok.front()->mu.Y();
  auto cell_name = [](const char* prefix, int x, int y) {
    return std::string(prefix) + std::to_string(x + 1) + std::to_string(y + 1);
  };

  // phi / d2 statistics over non-degenerate draws.
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      std::vector<double> v;
      for (const auto* r : ok)
        if (!r->degenerate) v.push_back(r->phi_hat(x, y));
      out.stats.emplace_back(cell_name("phi", x, y), summarize_values(v, truth.phi(x, y)));
    }
  {
    std::vector<double> v;
    for (const auto* r : ok)
      if (!r->degenerate) v.push_back(r->d2_hat);
    const double d2_truth = supermodular_core(truth);
    out.stats.emplace_back("d2", summarize_values(v, d2_truth));
  }

  // Shares and the per-cell match counts behind them.
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      std::vector<double> v, c;
      for (const auto* r : ok) {
        if (!std::isnan(r->shares(x, y))) v.push_back(r->shares(x, y));
        c.push_back(static_cast<double>(r->share_count(x, y)));
      }
      out.stats.emplace_back(cell_name("share", x, y), summarize_values(v, kNan));
      out.stats.emplace_back(cell_name("cell_count", x, y), summarize_values(c, kNan));
    }

  // Matching counts and objective over all non-failed draws.
  std::vector<std::vector<double>> mu_cells(X * Y);
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      auto& v = mu_cells[x * Y + y];
      for (const auto* r : ok) v.push_back(r->mu.mu(x, y));
      out.stats.emplace_back(cell_name("mu", x, y), summarize_values(v, kNan));
    }
  for (int x = 0; x < X; ++x) {
    std::vector<double> v;
    for (const auto* r : ok) v.push_back(r->mu.mu_x0[x]);
    out.stats.emplace_back("mu" + std::to_string(x + 1) + "0", summarize_values(v, kNan));
  }
  for (int y = 0; y < Y; ++y) {
    std::vector<double> v;
    for (const auto* r : ok) v.push_back(r->mu.mu_0y[y]);
    out.stats.emplace_back("mu0" + std::to_string(y + 1), summarize_values(v, kNan));
  }
  {
    std::vector<double> v;
    for (const auto* r : ok) v.push_back(r->lp_objective);
    out.stats.emplace_back("lp_objective", summarize_values(v, kNan));
  }

  // Large-market benchmark, normalized per capita for the gap.
  out.ipfp_mu = ipfp_solve(truth, margins);
  const double population = margins.total_men() + margins.total_women();
  double gap = 0.0;
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      const double lp_mean = mean_of(mu_cells[x * Y + y]);
      gap = std::max(gap, std::abs(lp_mean - out.ipfp_mu.mu(x, y)) / population);
    }
  out.ipfp_gap = gap;
  return out;
}

}  // namespace tumatch
