#include "tumatch/types.hpp"

#include <cmath>
#include <string>

namespace tumatch {

Margins::Margins(Eigen::VectorXd n_, Eigen::VectorXd m_)
    : n(std::move(n_)), m(std::move(m_)) {
  if (n.size() < 1 || m.size() < 1)
    throw DomainError("Margins: empty side");
  if ((n.array() < 0).any() || (m.array() < 0).any())
    throw DomainError("Margins: negative entry");
  if (n.sum() <= 0 || m.sum() <= 0)
    throw DomainError("Margins: each side must have positive total mass");
}

bool Margins::integral() const {
  auto whole = [](double v) { return std::abs(v - std::round(v)) < 1e-9; };
  for (int x = 0; x < n.size(); ++x)
    if (!whole(n[x])) return false;
  for (int y = 0; y < m.size(); ++y)
    if (!whole(m[y])) return false;
  return true;
}

SurplusMatrix::SurplusMatrix(Eigen::MatrixXd phi_) : phi(std::move(phi_)) {
  if (phi.size() == 0) throw DomainError("SurplusMatrix: empty");
  if (!phi.allFinite()) throw DomainError("SurplusMatrix: non-finite entry");
}

MatchingPatterns::MatchingPatterns(Eigen::MatrixXd mu_, Eigen::VectorXd mu_x0_,
                                   Eigen::VectorXd mu_0y_)
    : mu(std::move(mu_)), mu_x0(std::move(mu_x0_)), mu_0y(std::move(mu_0y_)) {
  if (mu.rows() != mu_x0.size() || mu.cols() != mu_0y.size())
    throw DimensionError("MatchingPatterns: singles vectors do not match mu");
  if ((mu.array() < 0).any() || (mu_x0.array() < 0).any() ||
      (mu_0y.array() < 0).any())
    throw DomainError("MatchingPatterns: negative mass");
}

Margins MatchingPatterns::implied_margins() const {
  return Margins(mu.rowwise().sum() + mu_x0, mu.colwise().sum().transpose() + mu_0y);
}

void MatchingPatterns::validate_against(const Margins& margins, double tol) const {
  if (margins.n.size() != mu.rows() || margins.m.size() != mu.cols())
    throw DimensionError("MatchingPatterns: margins shape mismatch");
  Eigen::VectorXd row = mu.rowwise().sum() + mu_x0;
  Eigen::VectorXd col = mu.colwise().sum().transpose() + mu_0y;
  for (int x = 0; x < row.size(); ++x)
    if (std::abs(row[x] - margins.n[x]) > tol)
      throw ConsistencyError("MatchingPatterns: man-side margin violated at type " +
                             std::to_string(x + 1));
  for (int y = 0; y < col.size(); ++y)
    if (std::abs(col[y] - margins.m[y]) > tol)
      throw ConsistencyError("MatchingPatterns: woman-side margin violated at type " +
                             std::to_string(y + 1));
}

void FiniteMarket::validate(const TypeSpace& space) const {
  const int I_ = I(), J_ = J();
  if (tilde_phi.rows() != I_ || tilde_phi.cols() != J_)
    throw DimensionError("FiniteMarket: tilde_phi shape mismatch");
  if (phi_i0.size() != I_ || phi_0j.size() != J_)
    throw DimensionError("FiniteMarket: singles payoff length mismatch");
  for (int t : x_types)
    if (t < 0 || t >= space.X) throw DomainError("FiniteMarket: man type out of range");
  for (int t : y_types)
    if (t < 0 || t >= space.Y) throw DomainError("FiniteMarket: woman type out of range");
  if (!tilde_phi.allFinite() || !phi_i0.allFinite() || !phi_0j.allFinite())
    throw DomainError("FiniteMarket: non-finite payoff");
}

}  // namespace tumatch
