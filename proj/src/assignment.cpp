#include "tumatch/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tumatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kuhn-Munkres / Jonker-Volgenant shortest augmenting paths with potentials,
// minimizing over a square cost matrix. On return col_of_row is a perfect
// assignment and (pu, pv) are dual-feasible potentials: pu[r] + pv[c] <=
// cost(r, c) everywhere, with equality on assigned pairs.
void jv_square_min(const Eigen::MatrixXd& cost, std::vector<int>& col_of_row,
                   std::vector<double>& pu, std::vector<double>& pv) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }

  col_of_row.assign(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j]) col_of_row[p[j] - 1] = j - 1;
  pu.assign(n, 0.0);
  pv.assign(n, 0.0);
  for (int i = 0; i < n; ++i) pu[i] = u[i + 1];
  for (int j = 0; j < n; ++j) pv[j] = v[j + 1];
}

double matching_objective(const FiniteMatching& m, const FiniteMarket& market) {
  double total = 0.0;
  for (const auto& [i, j] : m.matches) total += market.tilde_phi(i, j);
  for (int i : m.single_men) total += market.phi_i0[i];
  for (int j : m.single_women) total += market.phi_0j[j];
  return total;
}

void verify_duals(const FiniteMatching& m, const FiniteMarket& market, double tol) {
  const int I = market.I(), J = market.J();
  double worst = 0.0;
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      worst = std::max(worst, market.tilde_phi(i, j) - m.u[i] - m.v[j]);
  for (int i = 0; i < I; ++i) worst = std::max(worst, market.phi_i0[i] - m.u[i]);
  for (int j = 0; j < J; ++j) worst = std::max(worst, market.phi_0j[j] - m.v[j]);
  for (const auto& [i, j] : m.matches)
    worst = std::max(worst, std::abs(m.u[i] + m.v[j] - market.tilde_phi(i, j)));
  for (int i : m.single_men) worst = std::max(worst, std::abs(m.u[i] - market.phi_i0[i]));
  for (int j : m.single_women) worst = std::max(worst, std::abs(m.v[j] - market.phi_0j[j]));
  if (worst > tol)
    throw ConvergenceError("solve_assignment: dual residual above tolerance", worst);
}

// One exact solve of the partial-matching LP via the square problem that
// appends J dummy rows and I dummy columns at zero weight, so leaving anyone
// unmatched costs nothing. Returns the matching plus net duals (u', v') >= 0
// for the weights w_ij = tilde_phi_ij - phi_i0_i - phi_0j_j, normalized so
// singles sit at exactly zero.
struct NetSolution {
  std::vector<std::pair<int, int>> matches;
  Eigen::VectorXd u_net, v_net;
};

NetSolution solve_net(const Eigen::MatrixXd& weights) {
  const int I = static_cast<int>(weights.rows()), J = static_cast<int>(weights.cols());
  const int n = I + J;
  Eigen::MatrixXd value = Eigen::MatrixXd::Zero(n, n);
  value.topLeftCorner(I, J) = weights;

  std::vector<int> col_of_row;
  std::vector<double> pu, pv;
  jv_square_min(-value, col_of_row, pu, pv);

  Eigen::VectorXd usq(n), vsq(n);
  for (int r = 0; r < n; ++r) usq[r] = -pu[r];
  for (int c = 0; c < n; ++c) vsq[c] = -pv[c];

  // Shift so the singles slack is exactly zero: every single man's net dual
  // equals -alpha and every single woman's equals -beta, with alpha+beta = 0
  // whenever any pair is matched.
  const double alpha = vsq.tail(I).minCoeff();
  const double beta = usq.tail(J).minCoeff();

  NetSolution sol;
  sol.u_net = usq.head(I).array() + alpha;
  sol.v_net = vsq.head(J).array() + beta;
  for (int i = 0; i < I; ++i) {
    const int c = col_of_row[i];
    if (c < J) sol.matches.emplace_back(i, c);
  }
  return sol;
}

}  // namespace

FiniteMatching solve_assignment(const FiniteMarket& market, double tol) {
  if (tol <= 0) throw DomainError("solve_assignment: tol must be positive");
  const int I = market.I(), J = market.J();
  if (!market.tilde_phi.allFinite() || !market.phi_i0.allFinite() || !market.phi_0j.allFinite())
    throw DomainError("solve_assignment: non-finite payoff");

  FiniteMatching out;
  out.u = Eigen::VectorXd::Zero(I);
  out.v = Eigen::VectorXd::Zero(J);

  // One side empty: everyone on the other side is single.
  if (I == 0 || J == 0) {
    for (int i = 0; i < I; ++i) out.single_men.push_back(i);
    for (int j = 0; j < J; ++j) out.single_women.push_back(j);
    out.u = market.phi_i0;
    out.v = market.phi_0j;
    out.objective = matching_objective(out, market);
    return out;
  }

  Eigen::MatrixXd weights(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      weights(i, j) = market.tilde_phi(i, j) - market.phi_i0[i] - market.phi_0j[j];

  // The dual of an assignment LP is not unique and the augmenting-path solver
  // systematically favors the row side. Solving the transposed market as well
  // and averaging the two dual-feasible points keeps feasibility and
  // slackness (the dual set is convex) and makes the selection side-symmetric:
  // a market invariant under swapping sides gets mirror-image duals.
  const NetSolution a = solve_net(weights);
  const NetSolution b = solve_net(weights.transpose());

  out.matches = a.matches;
  out.u = 0.5 * (a.u_net + b.v_net) + market.phi_i0;
  out.v = 0.5 * (a.v_net + b.u_net) + market.phi_0j;

  std::vector<char> woman_matched(J, 0);
  for (const auto& [i, j] : out.matches) woman_matched[j] = 1;
  std::vector<char> man_matched(I, 0);
  for (const auto& [i, j] : out.matches) man_matched[i] = 1;
  for (int i = 0; i < I; ++i)
    if (!man_matched[i]) out.single_men.push_back(i);
  for (int j = 0; j < J; ++j)
    if (!woman_matched[j]) out.single_women.push_back(j);

  out.objective = matching_objective(out, market);
  verify_duals(out, market, tol);
  return out;
}

FiniteMatching brute_force_matching(const FiniteMarket& market) {
  const int I = market.I(), J = market.J();
  if (I > 8 || J > 8)
    throw SizeError("brute_force_matching: refuses markets beyond 8x8, got " +
                    std::to_string(I) + "x" + std::to_string(J));

  const double all_women_single = market.phi_0j.sum();
  double best = -kInf;
  std::vector<int> best_assign;          // per man: woman index or -1
  std::vector<int> assign(I, -1);
  std::vector<char> used(J, 0);

  // acc carries matched surpluses net of the matched women's singles payoffs
  // plus single men's payoffs; adding all_women_single at a leaf completes it.
  auto recurse = [&](auto&& self, int i, double acc) -> void {
    if (i == I) {
      const double total = acc + all_women_single;
      if (total > best) {
        best = total;
        best_assign = assign;
      }
      return;
    }
    assign[i] = -1;
    self(self, i + 1, acc + market.phi_i0[i]);
    for (int j = 0; j < J; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      assign[i] = j;
      self(self, i + 1, acc + market.tilde_phi(i, j) - market.phi_0j[j]);
      assign[i] = -1;
      used[j] = 0;
    }
  };
  recurse(recurse, 0, 0.0);

  FiniteMatching out;
  out.has_duals = false;
  std::vector<char> woman_matched(J, 0);
  for (int i = 0; i < I; ++i) {
    if (best_assign.empty() || best_assign[i] < 0) {
      out.single_men.push_back(i);
    } else {
      out.matches.emplace_back(i, best_assign[i]);
      woman_matched[best_assign[i]] = 1;
    }
  }
  for (int j = 0; j < J; ++j)
    if (!woman_matched[j]) out.single_women.push_back(j);
  out.objective = matching_objective(out, market);
  return out;
}

TypeLevelDuals type_level_duals(const FiniteMatching& matching, const FiniteMarket& market,
                                const TypeSpace& space, ShareConvention convention) {
  if (!matching.has_duals)
    throw DomainError("type_level_duals: matching carries no duals");
  const double nan = std::numeric_limits<double>::quiet_NaN();

  TypeLevelDuals out;
  out.u_bar = Eigen::MatrixXd::Constant(space.X, space.Y, nan);
  out.v_bar = Eigen::MatrixXd::Constant(space.X, space.Y, nan);
  out.share = Eigen::MatrixXd::Constant(space.X, space.Y, nan);
  out.count = Eigen::MatrixXi::Zero(space.X, space.Y);
  out.degenerate = Eigen::MatrixXi::Zero(space.X, space.Y);

  Eigen::MatrixXd su = Eigen::MatrixXd::Zero(space.X, space.Y);
  Eigen::MatrixXd sv = Eigen::MatrixXd::Zero(space.X, space.Y);
  Eigen::MatrixXd sratio = Eigen::MatrixXd::Zero(space.X, space.Y);
  Eigen::MatrixXi nratio = Eigen::MatrixXi::Zero(space.X, space.Y);

  for (const auto& [i, j] : matching.matches) {
    const int x = market.x_types[i], y = market.y_types[j];
    const double ui = matching.u[i], vj = matching.v[j];
    su(x, y) += ui;
    sv(x, y) += vj;
    out.count(x, y) += 1;
    if (ui + vj > 0) {
      sratio(x, y) += ui / (ui + vj);
      nratio(x, y) += 1;
    }
  }

  for (int x = 0; x < space.X; ++x)
    for (int y = 0; y < space.Y; ++y) {
      const int c = out.count(x, y);
      if (c == 0) continue;
      out.u_bar(x, y) = su(x, y) / c;
      out.v_bar(x, y) = sv(x, y) / c;
      if (convention == ShareConvention::ratio_of_averages) {
        const double tot = out.u_bar(x, y) + out.v_bar(x, y);
        if (tot > 0)
          out.share(x, y) = out.u_bar(x, y) / tot;
        else
          out.degenerate(x, y) = 1;
      } else {
        if (nratio(x, y) > 0)
          out.share(x, y) = sratio(x, y) / nratio(x, y);
        if (nratio(x, y) < c) out.degenerate(x, y) = 1;
      }
    }
  return out;
}

}  // namespace tumatch
