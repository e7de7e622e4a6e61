#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tumatch/ipfp.hpp"
#include "tumatch/rng.hpp"

using namespace tumatch;

namespace {

SurplusMatrix small_phi() {
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 1.0, 1.0, 1.6;
  return SurplusMatrix(p);
}

Margins margins2(double n1, double n2, double m1, double m2) {
  Eigen::VectorXd n(2), m(2);
  n << n1, n2;
  m << m1, m2;
  return Margins(n, m);
}

// Independent oracle: Newton's method on the raw system in
// (mu, mu_x0, mu_0y), with a finite-difference Jacobian.
struct NewtonSolution {
  Eigen::MatrixXd mu;
  Eigen::VectorXd mu_x0, mu_0y;
};

NewtonSolution newton_choo_siow(const Eigen::MatrixXd& phi, const Eigen::VectorXd& n,
                                const Eigen::VectorXd& m) {
  const int X = static_cast<int>(phi.rows()), Y = static_cast<int>(phi.cols());
  const int dim = X * Y + X + Y;
  // Unknowns packed as [mu cells, mu_x0, mu_0y], in logs to stay positive.
  Eigen::VectorXd z = Eigen::VectorXd::Constant(dim, std::log(0.1));

  auto residual = [&](const Eigen::VectorXd& w) {
    Eigen::VectorXd f(dim);
    int k = 0;
    for (int x = 0; x < X; ++x)
      for (int y = 0; y < Y; ++y) {
        const double mu = std::exp(w[x * Y + y]);
        const double mx0 = std::exp(w[X * Y + x]);
        const double m0y = std::exp(w[X * Y + X + y]);
        f[k++] = mu - std::sqrt(mx0 * m0y) * std::exp(phi(x, y) / 2.0);
      }
    for (int x = 0; x < X; ++x) {
      double s = std::exp(w[X * Y + x]);
      for (int y = 0; y < Y; ++y) s += std::exp(w[x * Y + y]);
      f[k++] = s - n[x];
    }
    for (int y = 0; y < Y; ++y) {
      double s = std::exp(w[X * Y + X + y]);
      for (int x = 0; x < X; ++x) s += std::exp(w[x * Y + y]);
      f[k++] = s - m[y];
    }
    return f;
  };

  for (int it = 0; it < 200; ++it) {
    const Eigen::VectorXd f = residual(z);
    if (f.cwiseAbs().maxCoeff() < 1e-13) break;
    Eigen::MatrixXd jac(dim, dim);
    const double h = 1e-7;
    for (int c = 0; c < dim; ++c) {
      Eigen::VectorXd zp = z, zm = z;
      zp[c] += h;
      zm[c] -= h;
      jac.col(c) = (residual(zp) - residual(zm)) / (2 * h);
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(f);
    z -= step.cwiseMax(-1.0).cwiseMin(1.0);  // damped
  }

  NewtonSolution out;
  out.mu.resize(X, Y);
  for (int x = 0; x < X; ++x)
    for (int y = 0; y < Y; ++y) out.mu(x, y) = std::exp(z[x * Y + y]);
  out.mu_x0.resize(X);
  out.mu_0y.resize(Y);
  for (int x = 0; x < X; ++x) out.mu_x0[x] = std::exp(z[X * Y + x]);
  for (int y = 0; y < Y; ++y) out.mu_0y[y] = std::exp(z[X * Y + X + y]);
  return out;
}

}  // namespace

TEST_CASE("1x1 market with zero surplus splits mass in half") {
  const SurplusMatrix phi(Eigen::MatrixXd::Zero(1, 1));
  const Margins m(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
  const MatchingPatterns mu = ipfp_solve(phi, m);
  CHECK(mu.mu(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(mu.mu_x0[0] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(mu.mu_0y[0] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("1x1 market with phi = 2 log 2 matches two thirds") {
  const SurplusMatrix phi(Eigen::MatrixXd::Constant(1, 1, 2.0 * std::log(2.0)));
  const Margins m(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
  const MatchingPatterns mu = ipfp_solve(phi, m);
  CHECK(mu.mu(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(mu.mu_x0[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("ipfp agrees with an independent Newton solve of the same system") {
  const SurplusMatrix phi = small_phi();
  const Margins m = margins2(0.25, 0.25, 0.25, 0.25);
  const MatchingPatterns mu = ipfp_solve(phi, m, 1e-12);
  const NewtonSolution oracle = newton_choo_siow(phi.phi, m.n, m.m);
  CHECK((mu.mu - oracle.mu).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((mu.mu_x0 - oracle.mu_x0).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((mu.mu_0y - oracle.mu_0y).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("solutions satisfy the system to tolerance and log a monotone trace") {
  const SurplusMatrix phi = small_phi();
  const Margins m = margins2(0.375, 0.125, 0.125, 0.375);
  IpfpDiagnostics diag;
  const MatchingPatterns mu = ipfp_solve(phi, m, 1e-11, 100000, &diag);
  CHECK(choo_siow_residual(phi, mu, m) <= 1e-10);
  REQUIRE(diag.residual_trace.size() >= 2);
  for (std::size_t k = 1; k < diag.residual_trace.size(); ++k)
    CHECK(diag.residual_trace[k] <= diag.residual_trace[k - 1] * (1 + 1e-9) + 1e-15);
  CHECK(diag.residual <= 1e-11);
}

TEST_CASE("homogeneity of degree one in the margins") {
  const SurplusMatrix phi = small_phi();
  const Margins base = margins2(0.3, 0.7, 0.5, 0.5);
  const Margins scaled = margins2(0.3 * 7, 0.7 * 7, 0.5 * 7, 0.5 * 7);
  const MatchingPatterns a = ipfp_solve(phi, base, 1e-12);
  const MatchingPatterns b = ipfp_solve(phi, scaled, 1e-12);
  CHECK(((b.mu - 7.0 * a.mu).cwiseAbs().array() / (7.0 * a.mu).array()).maxCoeff() < 1e-8);
  const auto [ua, va] = choo_siow_utilities(a);
  const auto [ub, vb] = choo_siow_utilities(b);
  CHECK((ua - ub).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((va - vb).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("symmetric surplus and margins give a symmetric matching") {
  Eigen::MatrixXd p(3, 3);
  p << 0.4, 0.9, 0.1, 0.9, 1.3, 0.7, 0.1, 0.7, 2.0;
  const SurplusMatrix phi(p);
  Eigen::VectorXd n(3);
  n << 0.2, 0.5, 0.3;
  const Margins m(n, n);
  const MatchingPatterns mu = ipfp_solve(phi, m, 1e-12);
  CHECK((mu.mu - mu.mu.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  const auto [U, V] = choo_siow_utilities(mu);
  CHECK((U - V.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("utilities recover the identified surplus") {
  const SurplusMatrix phi = small_phi();
  const Margins m = margins2(0.25, 0.25, 0.25, 0.25);
  const MatchingPatterns mu = ipfp_solve(phi, m);
  const auto [U, V] = choo_siow_utilities(mu);
  // U + V = log(mu^2 / (mu_x0 mu_0y)) elementwise, which is phi here.
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double logratio =
          std::log(mu.mu(x, y) * mu.mu(x, y) / (mu.mu_x0[x] * mu.mu_0y[y]));
      CHECK(U(x, y) + V(x, y) == doctest::Approx(logratio).epsilon(1e-12));
      CHECK(U(x, y) + V(x, y) == doctest::Approx(phi.phi(x, y)).epsilon(1e-6));
    }
}

TEST_CASE("utilities vanish when matching equals the singles mass") {
  Eigen::MatrixXd cells = Eigen::MatrixXd::Constant(1, 1, 0.4);
  const MatchingPatterns mu(cells, Eigen::VectorXd::Constant(1, 0.4),
                            Eigen::VectorXd::Constant(1, 0.7));
  const auto [U, V] = choo_siow_utilities(mu);
  CHECK(U(0, 0) == doctest::Approx(0.0));
  CHECK(V(0, 0) == doctest::Approx(std::log(0.4 / 0.7)));
}

TEST_CASE("residual diagnostic reacts to perturbations and bad shapes") {
  const SurplusMatrix phi = small_phi();
  const Margins m = margins2(0.25, 0.25, 0.25, 0.25);
  MatchingPatterns mu = ipfp_solve(phi, m);
  CHECK(choo_siow_residual(phi, mu, m) < 1e-9);
  mu.mu(0, 0) += 0.01;
  CHECK(choo_siow_residual(phi, mu, m) >= 0.001);
  const Margins wrong(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2));
  CHECK_THROWS_AS(choo_siow_residual(phi, mu, wrong), DimensionError);
}

TEST_CASE("ipfp input validation") {
  const SurplusMatrix phi = small_phi();
  CHECK_THROWS_AS(ipfp_solve(phi, margins2(0.0, 0.5, 0.5, 0.5)), DomainError);
  CHECK_THROWS_AS(ipfp_solve(phi, margins2(0.5, 0.5, 0.5, 0.5), -1.0), DomainError);
  CHECK_THROWS_AS(ipfp_solve(phi, Margins(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2))),
                  DimensionError);
}

TEST_CASE("running out of iterations reports the residual") {
  const SurplusMatrix phi = small_phi();
  try {
    ipfp_solve(phi, margins2(0.25, 0.25, 0.25, 0.25), 1e-12, 2);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual > 0);
  }
}

TEST_CASE("utilities require strictly positive masses") {
  Eigen::MatrixXd cells = Eigen::MatrixXd::Constant(1, 1, 0.4);
  const MatchingPatterns mu(cells, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1));
  CHECK_THROWS_AS(choo_siow_utilities(mu), DomainError);
}
