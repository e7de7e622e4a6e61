#include "tumatch/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace tumatch {

void MonteCarloCommand::materialize() {
  if (grid != "table1") throw ConfigError("/grid", "unknown grid '" + grid + "'");
  scenarios = table1_grid(population, n_draws, seed);
  for (auto& s : scenarios) {
    s.model = model;
    s.nu_dist = nu_dist;
  }
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path, msg);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) fail(path + "/" + it.key(), "unknown key");
  }
}

double get_number(const json& obj, const std::string& path, const char* key, double lo,
                  double hi, std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "/" + key, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "/" + key, "expected a number");
  const double x = v.get<double>();
  if (x < lo || x > hi)
    fail(path + "/" + key, "value " + std::to_string(x) + " outside [" + std::to_string(lo) +
                               ", " + std::to_string(hi) + "]");
  return x;
}

long get_integer(const json& obj, const std::string& path, const char* key, long lo, long hi,
                 std::optional<long> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "/" + key, "missing required key");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "/" + key, "expected an integer");
  const long x = v.get<long>();
  if (x < lo || x > hi) fail(path + "/" + key, "value " + std::to_string(x) + " out of range");
  return x;
}

std::string get_string(const json& obj, const std::string& path, const char* key,
                       std::optional<std::string> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    fail(path + "/" + key, "missing required key");
  }
  if (!obj.at(key).is_string()) fail(path + "/" + key, "expected a string");
  return obj.at(key).get<std::string>();
}

Eigen::VectorXd get_vector(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + "/" + key, "missing required key");
  const json& v = obj.at(key);
  if (!v.is_array() || v.empty()) fail(path + "/" + key, "expected a non-empty array");
  Eigen::VectorXd out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) fail(path + "/" + key + "/" + std::to_string(k), "expected a number");
    out[static_cast<int>(k)] = v[k].get<double>();
  }
  return out;
}

Eigen::MatrixXd matrix_from(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected an array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!v[r].is_array() || v[r].empty())
      fail(path + "/" + std::to_string(r), "expected a non-empty row");
    if (r == 0)
      cols = v[r].size();
    else if (v[r].size() != cols)
      fail(path + "/" + std::to_string(r), "ragged rows");
  }
  Eigen::MatrixXd out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (!v[r][c].is_number())
        fail(path + "/" + std::to_string(r) + "/" + std::to_string(c), "expected a number");
      out(static_cast<int>(r), static_cast<int>(c)) = v[r][c].get<double>();
    }
  return out;
}

Eigen::MatrixXd get_matrix(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + "/" + key, "missing required key");
  return matrix_from(obj.at(key), path + "/" + key);
}

NoiseModel parse_model(const std::string& s, const std::string& path) {
  if (s == "separable") return NoiseModel::separable;
  if (s == "missing_shock") return NoiseModel::missing_shock;
  if (s == "missing_interaction") return NoiseModel::missing_interaction;
  fail(path, "unknown model '" + s + "'");
}

PairShockDist parse_nu_dist(const std::string& s, const std::string& path) {
  if (s == "gumbel") return PairShockDist::gumbel;
  if (s == "logistic") return PairShockDist::logistic;
  fail(path, "unknown nu distribution '" + s + "'");
}

WeightKind parse_weight(const std::string& s, const std::string& path) {
  if (s == "identity") return WeightKind::identity;
  if (s == "optimal") return WeightKind::optimal;
  fail(path, "unknown weight '" + s + "'");
}

std::uint64_t get_seed(const json& obj, const std::string& path, std::uint64_t fallback) {
  if (!obj.contains("seed")) return fallback;
  const json& v = obj.at("seed");
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(path + "/seed", "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

RunConfig parse_ipfp(const json& j) {
  check_keys(j, "", {"command", "phi", "n", "m", "tol", "max_iter"});
  IpfpCommand cmd;
  cmd.phi = SurplusMatrix(get_matrix(j, "", "phi"));
  cmd.margins = Margins(get_vector(j, "", "n"), get_vector(j, "", "m"));
  if (cmd.margins.n.size() != cmd.phi.X()) fail("/n", "length must match phi rows");
  if (cmd.margins.m.size() != cmd.phi.Y()) fail("/m", "length must match phi columns");
  cmd.tol = get_number(j, "", "tol", 1e-15, 1.0, 1e-10);
  cmd.max_iter = static_cast<int>(get_integer(j, "", "max_iter", 1, 1000000000, 100000));
  return cmd;
}

NoiseSpec parse_noise(const json& j, const std::string& path) {
  NoiseSpec noise;
  noise.r2 = get_number(j, path, "r2", 0.0, 1.0, 0.0);
  if (j.contains("model")) noise.model = parse_model(get_string(j, path, "model"), path + "/model");
  if (j.contains("nu")) noise.nu_dist = parse_nu_dist(get_string(j, path, "nu"), path + "/nu");
  noise.interaction_dim =
      static_cast<int>(get_integer(j, path, "interaction_dim", 1, 1000000, 1));
  if (j.contains("scale_singles_by_tau")) {
    if (!j.at("scale_singles_by_tau").is_boolean())
      fail(path + "/scale_singles_by_tau", "expected a boolean");
    noise.scale_singles_by_tau = j.at("scale_singles_by_tau").get<bool>();
  }
  return noise;
}

RunConfig parse_solve(const json& j) {
  check_keys(j, "",
             {"command", "phi", "n", "m", "r2", "model", "nu", "interaction_dim",
              "scale_singles_by_tau", "seed"});
  SolveCommand cmd;
  cmd.phi = SurplusMatrix(get_matrix(j, "", "phi"));
  cmd.margins = Margins(get_vector(j, "", "n"), get_vector(j, "", "m"));
  if (cmd.margins.n.size() != cmd.phi.X()) fail("/n", "length must match phi rows");
  if (cmd.margins.m.size() != cmd.phi.Y()) fail("/m", "length must match phi columns");
  if (!cmd.margins.integral()) fail("/n", "margins must be integer counts");
  cmd.noise = parse_noise(j, "");
  cmd.seed = get_seed(j, "", 1);
  return cmd;
}

RunConfig parse_montecarlo(const json& j) {
  check_keys(j, "", {"command", "grid", "population", "draws", "seed", "model", "nu", "out"});
  MonteCarloCommand cmd;
  cmd.grid = get_string(j, "", "grid", "table1");
  cmd.population = static_cast<int>(get_integer(j, "", "population", 8, 100000000, 200));
  cmd.n_draws = static_cast<int>(get_integer(j, "", "draws", 1, 100000000, 100));
  cmd.seed = get_seed(j, "", 1);
  if (j.contains("model")) cmd.model = parse_model(get_string(j, "", "model"), "/model");
  if (j.contains("nu")) cmd.nu_dist = parse_nu_dist(get_string(j, "", "nu"), "/nu");
  cmd.out_dir = get_string(j, "", "out", ".");
  try {
    cmd.materialize();
  } catch (const DomainError& e) {
    fail("/population", e.what());
  }
  return cmd;
}

RunConfig parse_variance(const json& j) {
  check_keys(j, "", {"command", "mu", "n", "d0"});
  VarianceCommand cmd;
  const Eigen::VectorXd mu = get_vector(j, "", "mu");
  if (mu.size() != 4) fail("/mu", "expected exactly 4 proportions (row-major 2x2)");
  cmd.mu4 << mu[0], mu[1], mu[2], mu[3];
  cmd.n = get_integer(j, "", "n", 1, 1000000000000L);
  if (j.contains("d0")) cmd.d0 = get_number(j, "", "d0", 0.0, 1.0);
  return cmd;
}

RunConfig parse_tinbergen(const json& j) {
  check_keys(j, "",
             {"command", "a", "sigma_x", "sigma_y", "n_agents", "observed_dims", "seed", "cap"});
  TinbergenCommand cmd;
  cmd.spec.a = get_matrix(j, "", "a");
  const int d = static_cast<int>(cmd.spec.a.rows());
  cmd.spec.sigma_x = j.contains("sigma_x") ? get_matrix(j, "", "sigma_x")
                                           : Eigen::MatrixXd::Identity(d, d);
  cmd.spec.sigma_y = j.contains("sigma_y") ? get_matrix(j, "", "sigma_y")
                                           : Eigen::MatrixXd::Identity(d, d);
  cmd.spec.cap = static_cast<int>(get_integer(j, "", "cap", 1, 100000, 2000));
  cmd.spec.n_agents = static_cast<int>(get_integer(j, "", "n_agents", 1, 100000));
  cmd.spec.observed_dims = static_cast<int>(get_integer(j, "", "observed_dims", 1, d, d));
  cmd.seed = get_seed(j, "", 1);
  try {
    cmd.spec.validate();
  } catch (const std::exception& e) {
    fail("/a", e.what());
  }
  return cmd;
}

RunConfig parse_estimate(const json& j) {
  check_keys(j, "", {"command", "input", "sample_size", "basis", "weight"});
  EstimateCommand cmd;
  cmd.input = get_string(j, "", "input");
  cmd.sample_size = get_integer(j, "", "sample_size", 0, 1000000000000L, 0);
  if (j.contains("weight")) cmd.weight = parse_weight(get_string(j, "", "weight"), "/weight");
  if (j.contains("basis")) {
    const json& b = j.at("basis");
    if (!b.is_array() || b.empty()) fail("/basis", "expected a non-empty array of matrices");
    for (std::size_t k = 0; k < b.size(); ++k)
      cmd.basis.push_back(matrix_from(b[k], "/basis/" + std::to_string(k)));
  }
  return cmd;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("", std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("", "top level must be an object");
  const std::string command = get_string(j, "", "command");
  if (command == "ipfp") return parse_ipfp(j);
  if (command == "solve") return parse_solve(j);
  if (command == "montecarlo") return parse_montecarlo(j);
  if (command == "variance") return parse_variance(j);
  if (command == "tinbergen") return parse_tinbergen(j);
  if (command == "estimate") return parse_estimate(j);
  fail("/command", "unknown command '" + command + "'");
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace tumatch
