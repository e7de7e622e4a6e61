#include "tumatch/estimation.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace tumatch {

namespace {

void require_positive_cells(const MatchingPatterns& mu, const char* who) {
  for (int x = 0; x < mu.X(); ++x)
    for (int y = 0; y < mu.Y(); ++y)
      if (mu.mu(x, y) <= 0)
        throw ZeroCellError(x + 1, y + 1, std::string(who) + ": zero cell at (" +
                                              std::to_string(x + 1) + "," +
                                              std::to_string(y + 1) + ")");
  for (int x = 0; x < mu.X(); ++x)
    if (mu.mu_x0[x] <= 0)
      throw ZeroCellError(x + 1, 0, std::string(who) + ": no single men of type " +
                                        std::to_string(x + 1));
  for (int y = 0; y < mu.Y(); ++y)
    if (mu.mu_0y[y] <= 0)
      throw ZeroCellError(0, y + 1, std::string(who) + ": no single women of type " +
                                        std::to_string(y + 1));
}

// Lower regularized incomplete gamma by series expansion; x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma by continued fraction; x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

SurplusMatrix phi_closed_form(const MatchingPatterns& mu) {
  require_positive_cells(mu, "phi_closed_form");
  Eigen::MatrixXd phi(mu.X(), mu.Y());
  for (int x = 0; x < mu.X(); ++x)
    for (int y = 0; y < mu.Y(); ++y)
      phi(x, y) = std::log(mu.mu(x, y) * mu.mu(x, y) / (mu.mu_x0[x] * mu.mu_0y[y]));
  return SurplusMatrix(std::move(phi));
}

SurplusMatrix phi_no_singles(const Eigen::MatrixXd& mu_marriages) {
  const int X = static_cast<int>(mu_marriages.rows());
  const int Y = static_cast<int>(mu_marriages.cols());
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y)
      if (mu_marriages(x, y) <= 0)
        throw ZeroCellError(x + 1, y + 1, "phi_no_singles: zero marriage cell at (" +
                                              std::to_string(x + 1) + "," +
                                              std::to_string(y + 1) + ")");
  const Eigen::MatrixXd b = 2.0 * mu_marriages.array().log();
  Eigen::MatrixXd out(X, Y);
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) out(x, y) = b(x, y) - b(x, 0) - b(0, y) + b(0, 0);
  return SurplusMatrix(std::move(out));
}

Eigen::VectorXd vec_cells(const Eigen::MatrixXd& m) {
  Eigen::VectorXd v(m.size());
  int k = 0;
  for (int x = 0; x < m.rows(); ++x)
    for (int y = 0; y < m.cols(); ++y) v[k++] = m(x, y);
  return v;
}

Eigen::MatrixXd phi_covariance(const MatchingPatterns& mu, long sample_size) {
  require_positive_cells(mu, "phi_covariance");
  if (sample_size < 1) throw DomainError("phi_covariance: sample_size must be positive");
  const int X = mu.X(), Y = mu.Y();
  const int cells = X * Y + X + Y;  // couples, then single men, then single women
  const double total = mu.total_mass();

  Eigen::VectorXd p(cells);
  int k = 0;
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) p[k++] = mu.mu(x, y) / total;
  for (int x = 0; x < X; ++x) p[k++] = mu.mu_x0[x] / total;
  for (int y = 0; y < Y; ++y) p[k++] = mu.mu_0y[y] / total;

  // Jacobian of phi_xy = 2 log p_xy - log p_x0 - log p_0y.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(X * Y, cells);
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) {
      const int row = x * Y + y;
      jac(row, row) = 2.0 / p[row];
      jac(row, X * Y + x) = -1.0 / p[X * Y + x];
      jac(row, X * Y + X + y) = -1.0 / p[X * Y + X + y];
    }

  const Eigen::MatrixXd s_mu =
      Eigen::MatrixXd(p.asDiagonal()) - p * p.transpose();
  return jac * s_mu * jac.transpose() / static_cast<double>(sample_size);
}

MinDistanceResult min_distance(const MinDistanceSpec& spec, const MatchingPatterns& mu,
                               long sample_size) {
  const int X = mu.X(), Y = mu.Y();
  const int cells = X * Y;
  const int K = static_cast<int>(spec.basis.size());
  if (K < 1) throw DomainError("min_distance: empty basis");
  if (K > cells) throw RankError("min_distance: more basis matrices than cells");
  for (const auto& b : spec.basis)
    if (b.rows() != X || b.cols() != Y)
      throw DimensionError("min_distance: basis shape does not match mu");

  Eigen::MatrixXd design(cells, K);
  for (int k = 0; k < K; ++k) design.col(k) = vec_cells(spec.basis[k]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < K) throw RankError("min_distance: basis matrices are linearly dependent");

  const Eigen::VectorXd y = vec_cells(phi_closed_form(mu).phi);
  const Eigen::MatrixXd s = phi_covariance(mu, sample_size);

  MinDistanceResult out;
  Eigen::MatrixXd w;
  switch (spec.weight) {
    case WeightKind::identity:
      w = Eigen::MatrixXd::Identity(cells, cells);
      break;
    case WeightKind::user:
      if (spec.user_weight.rows() != cells || spec.user_weight.cols() != cells)
        throw DimensionError("min_distance: user weight has wrong shape");
      w = spec.user_weight;
      break;
    case WeightKind::optimal: {
      Eigen::MatrixXd s_inv = s;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(s_inv);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
      const double lo = eig.eigenvalues().minCoeff();
      const double hi = eig.eigenvalues().maxCoeff();
      if (ldlt.info() != Eigen::Success || !(lo > hi * 1e-12)) {
        s_inv += 1e-10 * Eigen::MatrixXd::Identity(cells, cells);
        ldlt.compute(s_inv);
        out.ridged = true;
        if (ldlt.info() != Eigen::Success)
          throw ConditioningError("min_distance: covariance not invertible even with ridge");
      }
      w = ldlt.solve(Eigen::MatrixXd::Identity(cells, cells));
      break;
    }
  }
  if (!w.allFinite()) throw ConditioningError("min_distance: weight matrix not finite");

  const Eigen::MatrixXd a = design.transpose() * w * design;
  Eigen::LDLT<Eigen::MatrixXd> a_ldlt(a);
  if (a_ldlt.info() != Eigen::Success)
    throw RankError("min_distance: normal equations singular");
  out.beta_hat = a_ldlt.solve(design.transpose() * w * y);

  const Eigen::VectorXd resid = design * out.beta_hat - y;
  out.j_stat = std::max(0.0, resid.dot(w * resid));
  out.df = cells - K;

  if (spec.weight == WeightKind::optimal) {
    out.cov_beta = a_ldlt.solve(Eigen::MatrixXd::Identity(K, K));
  } else {
    const Eigen::MatrixXd bread = a_ldlt.solve(design.transpose() * w);
    out.cov_beta = bread * s * bread.transpose();
  }
  return out;
}

double odds_ratio_phi0(const Eigen::Matrix2d& mu4) {
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (mu4(x, y) <= 0)
        throw ZeroCellError(x + 1, y + 1, "odds_ratio_phi0: zero cell at (" +
                                              std::to_string(x + 1) + "," +
                                              std::to_string(y + 1) + ")");
      if (mu4(x, y) >= 1)
        throw DomainError("odds_ratio_phi0: proportions must lie in (0,1)");
    }
  return 2.0 * std::log(mu4(0, 0) * mu4(1, 1) / (mu4(0, 1) * mu4(1, 0)));
}

OddsRatioVariance phi0_avar(const Eigen::Matrix2d& mu4, long n) {
  if (n < 1) throw DomainError("phi0_avar: n must be positive");
  double sum = 0.0, recip = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (mu4(x, y) <= 0)
        throw ZeroCellError(x + 1, y + 1, "phi0_avar: zero cell");
      sum += mu4(x, y);
      recip += 1.0 / mu4(x, y);
    }
  if (std::abs(sum - 1.0) > 1e-12)
    throw DomainError("phi0_avar: proportions must sum to 1, got " + std::to_string(sum));
  return {4.0 / static_cast<double>(n) * recip, 64.0 / static_cast<double>(n)};
}

double phi0_avar_equal_types(double d0, long n) {
  if (d0 <= 0 || d0 >= 1) throw DomainError("phi0_avar_equal_types: d0 must lie in (0,1)");
  if (n < 1) throw DomainError("phi0_avar_equal_types: n must be positive");
  return 16.0 / (static_cast<double>(n) * d0 * (1.0 - d0));
}

double chi_squared_cdf(double x, int df) {
  if (df < 1) throw DomainError("chi_squared_cdf: df must be >= 1");
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x <= 0) return 0.0;
  const double a = df / 2.0, half = x / 2.0;
  if (half < a + 1.0) return gamma_p_series(a, half);
  return 1.0 - gamma_q_contfrac(a, half);
}

}  // namespace tumatch
