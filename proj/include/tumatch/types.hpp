#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tumatch/errors.hpp"

namespace tumatch {

// Discrete type space: men carry types 0..X-1, women 0..Y-1 internally.
// All I/O and diagnostics use 1-based indices.
struct TypeSpace {
  int X = 0;
  int Y = 0;

  TypeSpace() = default;
  TypeSpace(int X_, int Y_) : X(X_), Y(Y_) {
    if (X < 1 || Y < 1) throw DomainError("TypeSpace: X and Y must be >= 1");
  }
};

// Counts (or masses) of men and women per type.
struct Margins {
  Eigen::VectorXd n;  // men
  Eigen::VectorXd m;  // women

  Margins() = default;
  Margins(Eigen::VectorXd n_, Eigen::VectorXd m_);

  // True when every entry is a whole number.
  bool integral() const;
  double total_men() const { return n.sum(); }
  double total_women() const { return m.sum(); }
};

// Systematic joint surplus by type pair.
struct SurplusMatrix {
  Eigen::MatrixXd phi;

  SurplusMatrix() = default;
  explicit SurplusMatrix(Eigen::MatrixXd phi_);

  int X() const { return static_cast<int>(phi.rows()); }
  int Y() const { return static_cast<int>(phi.cols()); }
};

// Matches and singles by type cell. Masses are real so the same type serves
// finite counts and large-market limits; integer inputs round-trip exactly.
struct MatchingPatterns {
  Eigen::MatrixXd mu;     // X x Y matches
  Eigen::VectorXd mu_x0;  // single men by type
  Eigen::VectorXd mu_0y;  // single women by type

  MatchingPatterns() = default;
  MatchingPatterns(Eigen::MatrixXd mu_, Eigen::VectorXd mu_x0_,
                   Eigen::VectorXd mu_0y_);

  int X() const { return static_cast<int>(mu.rows()); }
  int Y() const { return static_cast<int>(mu.cols()); }
  double total_mass() const { return mu.sum() + mu_x0.sum() + mu_0y.sum(); }

  // Margins these patterns add up to.
  Margins implied_margins() const;

  // Throws ConsistencyError unless the patterns add up to `margins`.
  void validate_against(const Margins& margins, double tol = 1e-9) const;
};

// An individual-level market realization: each man i and woman j carries a
// type, every pair a realized surplus, and every individual a singles payoff.
struct FiniteMarket {
  std::vector<int> x_types;   // 0-based type of each man
  std::vector<int> y_types;   // 0-based type of each woman
  Eigen::MatrixXd tilde_phi;  // I x J
  Eigen::VectorXd phi_i0;     // length I
  Eigen::VectorXd phi_0j;     // length J

  int I() const { return static_cast<int>(x_types.size()); }
  int J() const { return static_cast<int>(y_types.size()); }

  // Shape, index-range and finiteness checks.
  void validate(const TypeSpace& space) const;
};

}  // namespace tumatch
