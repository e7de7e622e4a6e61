#include "tumatch/ipfp.hpp"

#include <cmath>
#include <string>

namespace tumatch {

namespace {

// Positive root of q^2 + q*s = target, in the cancellation-safe form.
inline double positive_root(double s, double target) {
  return 2.0 * target / (s + std::sqrt(s * s + 4.0 * target));
}

}  // namespace

MatchingPatterns ipfp_solve(const SurplusMatrix& phi, const Margins& margins,
                            double tol, int max_iter, IpfpDiagnostics* diag) {
  const int X = phi.X(), Y = phi.Y();
  if (margins.n.size() != X || margins.m.size() != Y)
    throw DimensionError("ipfp_solve: phi and margins shapes differ");
  if ((margins.n.array() <= 0).any() || (margins.m.array() <= 0).any())
    throw DomainError("ipfp_solve: margins must be strictly positive");
  if (tol <= 0) throw DomainError("ipfp_solve: tol must be positive");

  const Eigen::MatrixXd K = (phi.phi.array() / 2.0).exp();
  Eigen::VectorXd a = (margins.n.array() / 2.0).sqrt();
  Eigen::VectorXd b = (margins.m.array() / 2.0).sqrt();

  auto max_residual = [&]() {
    const Eigen::VectorXd row = (a.array() * (K * b).array() + a.array().square()).matrix();
    const Eigen::VectorXd col =
        (b.array() * (K.transpose() * a).array() + b.array().square()).matrix();
    return std::max((row - margins.n).cwiseAbs().maxCoeff(),
                    (col - margins.m).cwiseAbs().maxCoeff());
  };

  double prev = max_residual();
  if (diag) {
    diag->residual_trace.clear();
    diag->residual_trace.push_back(prev);
  }

  int it = 0;
  double resid = prev;
  for (; it < max_iter; ++it) {
    for (int x = 0; x < X; ++x) a[x] = positive_root(K.row(x) * b, margins.n[x]);
    for (int y = 0; y < Y; ++y) b[y] = positive_root(K.col(y).dot(a), margins.m[y]);

    resid = max_residual();
    if (diag) diag->residual_trace.push_back(resid);
    // Sweeps must not move away from the solution; tiny slack for rounding.
    if (resid > prev * (1.0 + 1e-9) + 1e-15)
      throw ConvergenceError("ipfp_solve: residual increased from " + std::to_string(prev) +
                                 " to " + std::to_string(resid),
                             resid);
    prev = resid;
    if (resid <= tol) break;
  }
  if (resid > tol)
    throw ConvergenceError("ipfp_solve: no convergence after " + std::to_string(max_iter) +
                               " iterations, residual " + std::to_string(resid),
                           resid);
  if (diag) {
    diag->iterations = it + 1;
    diag->residual = resid;
  }

  Eigen::MatrixXd mu = (a * b.transpose()).cwiseProduct(K);
  return MatchingPatterns(std::move(mu), a.array().square(), b.array().square());
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> choo_siow_utilities(const MatchingPatterns& mu) {
  if ((mu.mu.array() <= 0).any() || (mu.mu_x0.array() <= 0).any() ||
      (mu.mu_0y.array() <= 0).any())
    throw DomainError("choo_siow_utilities: all masses must be strictly positive");
  const int X = mu.X(), Y = mu.Y();
  Eigen::MatrixXd U(X, Y), V(X, Y);
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      U(x, y) = std::log(mu.mu(x, y) / mu.mu_x0[x]);
      V(x, y) = std::log(mu.mu(x, y) / mu.mu_0y[y]);
    }
  return {std::move(U), std::move(V)};
}

double choo_siow_residual(const SurplusMatrix& phi, const MatchingPatterns& mu,
                          const Margins& margins) {
  const int X = phi.X(), Y = phi.Y();
  if (mu.X() != X || mu.Y() != Y || margins.n.size() != X || margins.m.size() != Y)
    throw DimensionError("choo_siow_residual: shapes differ");
  double worst = 0.0;
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      const double rhs =
          std::sqrt(mu.mu_x0[x] * mu.mu_0y[y]) * std::exp(phi.phi(x, y) / 2.0);
      worst = std::max(worst, std::abs(mu.mu(x, y) - rhs));
    }
  const Eigen::VectorXd row = mu.mu.rowwise().sum() + mu.mu_x0;
  const Eigen::VectorXd col = mu.mu.colwise().sum().transpose() + mu.mu_0y;
  worst = std::max(worst, (row - margins.n).cwiseAbs().maxCoeff());
  worst = std::max(worst, (col - margins.m).cwiseAbs().maxCoeff());
  return worst;
}

}  // namespace tumatch
