#include "tumatch/tinbergen.hpp"

#include <string>

#include "tumatch/assignment.hpp"
#include "tumatch/rng.hpp"

namespace tumatch {

namespace {

enum : std::uint64_t { kMenStream = 11, kWomenStream = 12 };

constexpr double kSinglePayoff = -1e9;

Eigen::MatrixXd gaussian_sample(std::uint64_t seed, int n, const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw DomainError("simulate_quadratic_market: covariance not positive definite");
  const Eigen::MatrixXd chol = llt.matrixL();
  Rng rng(seed);
  Eigen::MatrixXd z(n, cov.rows());
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < cov.rows(); ++k) z(i, k) = rng.normal();
  return z * chol.transpose();
}

}  // namespace

void QuadraticSpec::validate() const {
  const int d = static_cast<int>(a.rows());
  if (d < 1 || a.cols() != d) throw DimensionError("QuadraticSpec: A must be square");
  if (sigma_x.rows() != d || sigma_x.cols() != d || sigma_y.rows() != d || sigma_y.cols() != d)
    throw DimensionError("QuadraticSpec: covariances must match A");
  if (!sigma_x.isApprox(sigma_x.transpose()) || !sigma_y.isApprox(sigma_y.transpose()))
    throw DomainError("QuadraticSpec: covariances must be symmetric");
  if (n_agents < 1) throw DomainError("QuadraticSpec: n_agents must be >= 1");
  if (observed_dims < 1 || observed_dims > d)
    throw DomainError("QuadraticSpec: observed_dims out of range");
  if (n_agents > cap)
    throw SizeError("simulate_quadratic_market: n_agents " + std::to_string(n_agents) +
                    " exceeds cap " + std::to_string(cap));
}

MatchedPairSample simulate_quadratic_market(const QuadraticSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int n = spec.n_agents;

  const Eigen::MatrixXd xs = gaussian_sample(derive_seed(seed, kMenStream), n, spec.sigma_x);
  const Eigen::MatrixXd ys = gaussian_sample(derive_seed(seed, kWomenStream), n, spec.sigma_y);

  FiniteMarket mkt;
  mkt.x_types.assign(n, 0);
  mkt.y_types.assign(n, 0);
  mkt.tilde_phi = xs * spec.a * ys.transpose();
  mkt.phi_i0 = Eigen::VectorXd::Constant(n, kSinglePayoff);
  mkt.phi_0j = Eigen::VectorXd::Constant(n, kSinglePayoff);

  // Dual residuals scale with the singles constant; loosen tol accordingly.
  const FiniteMatching sol = solve_assignment(mkt, 1e-3);
  if (static_cast<int>(sol.matches.size()) != n)
    throw ConvergenceError("simulate_quadratic_market: matching is not full", 0.0);

  MatchedPairSample out;
  out.x.resize(n, xs.cols());
  out.y.resize(n, ys.cols());
  for (int k = 0; k < n; ++k) {
    out.x.row(k) = xs.row(sol.matches[k].first);
    out.y.row(k) = ys.row(sol.matches[k].second);
  }
  return out;
}

AffineMapEstimate estimate_affine_map(const MatchedPairSample& pairs, int observed_dims) {
  const int n = static_cast<int>(pairs.x.rows());
  if (pairs.y.rows() != n) throw DimensionError("estimate_affine_map: sides differ in length");
  if (observed_dims < 1 || observed_dims > pairs.x.cols() || observed_dims > pairs.y.cols())
    throw DomainError("estimate_affine_map: observed_dims out of range");
  if (n < observed_dims + 1)
    throw DomainError("estimate_affine_map: need at least observed_dims + 1 pairs");

  const Eigen::MatrixXd xo = pairs.x.leftCols(observed_dims);
  const Eigen::MatrixXd yo = pairs.y.leftCols(observed_dims);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xo);
  if (qr.rank() < observed_dims) throw RankError("estimate_affine_map: singular design");

  // y' = x' T', so solve X B = Y for B = T'.
  const Eigen::MatrixXd b = (xo.transpose() * xo).ldlt().solve(xo.transpose() * yo);
  const Eigen::MatrixXd resid = yo - xo * b;

  AffineMapEstimate out;
  out.t_hat = b.transpose();
  out.residual_cov = resid.transpose() * resid / static_cast<double>(n);
  return out;
}

}  // namespace tumatch
