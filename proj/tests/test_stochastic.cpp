#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tumatch/stochastic.hpp"

using namespace tumatch;

namespace {

constexpr double kPi = 3.14159265358979323846;

Margins counts(std::initializer_list<double> n, std::initializer_list<double> m) {
  Eigen::VectorXd nv(static_cast<int>(n.size())), mv(static_cast<int>(m.size()));
  int k = 0;
  for (double v : n) nv[k++] = v;
  k = 0;
  for (double v : m) mv[k++] = v;
  return Margins(nv, mv);
}

SurplusMatrix small_phi() {
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 1.0, 1.0, 1.6;
  return SurplusMatrix(p);
}

double sample_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_var(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("centered gumbel draws have mean zero and variance pi^2/6") {
  Rng rng(2024);
  const std::vector<double> draws = draw_gumbel_centered(rng, 1000000);
  CHECK(std::abs(sample_mean(draws)) < 0.005);
  CHECK(std::abs(sample_var(draws) - kPi * kPi / 6.0) < 0.01);
}

TEST_CASE("equal seeds give identical gumbel sequences") {
  Rng a(555), b(555);
  const auto va = draw_gumbel_centered(a, 1000);
  const auto vb = draw_gumbel_centered(b, 1000);
  CHECK(va == vb);
}

TEST_CASE("sigma and tau from the non-separability share") {
  {
    const auto [sigma, tau] = sigma_tau_from_r2(0.0);
    CHECK(sigma == 0.0);
    CHECK(tau == 1.0);
  }
  {
    const auto [sigma, tau] = sigma_tau_from_r2(1.0);
    CHECK(sigma == doctest::Approx(std::sqrt(2.0)));
    CHECK(tau == 0.0);
  }
  {
    const auto [sigma, tau] = sigma_tau_from_r2(0.5);
    CHECK(sigma == doctest::Approx(1.0));
    CHECK(tau == doctest::Approx(std::sqrt(0.5)));
  }
  CHECK_THROWS_AS(sigma_tau_from_r2(-0.01), DomainError);
  CHECK_THROWS_AS(sigma_tau_from_r2(1.01), DomainError);
}

TEST_CASE("separable surpluses reconstruct phi from the bundle") {
  const SurplusMatrix phi = small_phi();
  const Margins m = counts({3, 2}, {2, 3});
  const TypeSpace space(2, 2);
  NoiseSpec spec;  // separable
  const DrawBundle bundle = draw_bundle(space, m, spec, 42);
  const FiniteMarket mkt = assemble_market(phi, m, spec, bundle);
  for (int i = 0; i < mkt.I(); ++i)
    for (int j = 0; j < mkt.J(); ++j) {
      const double recon = mkt.tilde_phi(i, j) - bundle.eps(i, 1 + mkt.y_types[j]) -
                           bundle.eta(j, 1 + mkt.x_types[i]);
      CHECK(recon == doctest::Approx(phi.phi(mkt.x_types[i], mkt.y_types[j])).epsilon(1e-12));
    }
  CHECK(mkt.phi_i0 == bundle.eps.col(0));
  CHECK(mkt.phi_0j == bundle.eta.col(0));
}

TEST_CASE("missing shock at r2 = 1 ignores the separable draws") {
  const SurplusMatrix phi = small_phi();
  const Margins m = counts({2, 2}, {2, 2});
  NoiseSpec spec;
  spec.model = NoiseModel::missing_shock;
  spec.r2 = 1.0;
  const DrawBundle bundle = draw_bundle(TypeSpace(2, 2), m, spec, 7);
  const FiniteMarket mkt = assemble_market(phi, m, spec, bundle);
  for (int i = 0; i < mkt.I(); ++i)
    for (int j = 0; j < mkt.J(); ++j) {
      const double expect =
          phi.phi(mkt.x_types[i], mkt.y_types[j]) + std::sqrt(2.0) * bundle.nu(i, j);
      CHECK(mkt.tilde_phi(i, j) == doctest::Approx(expect).epsilon(1e-14));
    }
  // Singles keep their raw draws by default.
  CHECK(mkt.phi_i0 == bundle.eps.col(0));

  NoiseSpec scaled = spec;
  scaled.scale_singles_by_tau = true;  // tau = 0 wipes the singles payoffs
  CHECK(assemble_market(phi, m, scaled, bundle).phi_i0.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("missing shock at r2 = 0 is bitwise identical to separable") {
  const SurplusMatrix phi = small_phi();
  const Margins m = counts({4, 3}, {3, 4});
  NoiseSpec sep;
  NoiseSpec shock;
  shock.model = NoiseModel::missing_shock;
  shock.r2 = 0.0;
  const FiniteMarket a = build_finite_market(phi, m, sep, 301);
  const FiniteMarket b = build_finite_market(phi, m, shock, 301);
  CHECK(a.tilde_phi == b.tilde_phi);
  CHECK(a.phi_i0 == b.phi_i0);
  CHECK(a.phi_0j == b.phi_0j);
}

TEST_CASE("markets are a pure function of the seed") {
  const SurplusMatrix phi = small_phi();
  const Margins m = counts({5, 5}, {5, 5});
  NoiseSpec spec;
  spec.model = NoiseModel::missing_shock;
  spec.r2 = 0.4;
  const FiniteMarket a = build_finite_market(phi, m, spec, 99);
  const FiniteMarket b = build_finite_market(phi, m, spec, 99);
  const FiniteMarket c = build_finite_market(phi, m, spec, 100);
  CHECK(a.tilde_phi == b.tilde_phi);
  CHECK(a.tilde_phi != c.tilde_phi);
}

TEST_CASE("changing r2 rescales but does not redraw the noise") {
  const SurplusMatrix phi = small_phi();
  const Margins m = counts({3, 3}, {3, 3});
  NoiseSpec lo, hi;
  lo.model = hi.model = NoiseModel::missing_shock;
  lo.r2 = 0.2;
  hi.r2 = 0.8;
  const DrawBundle ba = draw_bundle(TypeSpace(2, 2), m, lo, 17);
  const DrawBundle bb = draw_bundle(TypeSpace(2, 2), m, hi, 17);
  CHECK(ba.eps == bb.eps);
  CHECK(ba.eta == bb.eta);
  CHECK(ba.nu == bb.nu);
}

TEST_CASE("fresh pair deviations have variance pi^2/3 for every model and r2") {
  // Direct sampling oracle: 1e5 independent realizations of the idiosyncratic
  // deviation tau (eps + eta) + sigma nu per (model, r2).
  const double target = kPi * kPi / 3.0;
  int stream = 0;
  for (double r2 : {0.0, 0.2, 0.4, 0.8, 1.0}) {
    const auto [sigma, tau] = sigma_tau_from_r2(r2);
    for (NoiseModel model : {NoiseModel::missing_shock, NoiseModel::missing_interaction}) {
      Rng rng(5000 + stream++);
      const int d = 3;
      std::vector<double> dev(100000);
      for (auto& v : dev) {
        const double sep = tau * (rng.gumbel_centered() + rng.gumbel_centered());
        double pair = 0.0;
        if (model == NoiseModel::missing_shock) {
          pair = sigma * rng.gumbel_centered();
        } else {
          double dot = 0.0;
          for (int k = 0; k < d; ++k) dot += rng.normal() * rng.normal();
          pair = sigma * std::sqrt(kPi * kPi / 6.0) * dot / std::sqrt(d);
        }
        v = sep + pair;
      }
      CHECK(sample_var(dev) == doctest::Approx(target).epsilon(0.02));
    }
  }
}

TEST_CASE("market-level idiosyncratic variance is constant in r2 up to clustering noise") {
  // Within one market the eps/eta draws are shared across pairs, so the pair
  // sample is clustered; the tolerance reflects the effective sample size.
  const SurplusMatrix phi = small_phi();
  const Margins m = counts({160, 160}, {160, 160});
  const double target = kPi * kPi / 3.0;
  int stream = 0;
  for (double r2 : {0.0, 0.4, 1.0}) {
    for (NoiseModel model : {NoiseModel::missing_shock, NoiseModel::missing_interaction}) {
      NoiseSpec spec;
      spec.model = model;
      spec.r2 = r2;
      spec.interaction_dim = 3;
      const FiniteMarket mkt = build_finite_market(phi, m, spec, 1000 + stream++);
      std::vector<double> dev;
      dev.reserve(static_cast<std::size_t>(mkt.I()) * mkt.J());
      for (int i = 0; i < mkt.I(); ++i)
        for (int j = 0; j < mkt.J(); ++j)
          dev.push_back(mkt.tilde_phi(i, j) - phi.phi(mkt.x_types[i], mkt.y_types[j]));
      CHECK(sample_var(dev) == doctest::Approx(target).epsilon(0.10));
    }
  }
}

TEST_CASE("logistic pair shock is a variance-matched symmetric alternative") {
  Rng rng(4);
  std::vector<double> draws(500000);
  for (auto& d : draws) d = rng.logistic_matched();
  CHECK(std::abs(sample_mean(draws)) < 0.01);
  CHECK(sample_var(draws) == doctest::Approx(kPi * kPi / 6.0).epsilon(0.02));
}

TEST_CASE("singles payoffs honor the tau-scaling switch") {
  const SurplusMatrix phi = small_phi();
  const Margins m = counts({2, 2}, {2, 2});
  NoiseSpec scaled, raw;
  scaled.model = raw.model = NoiseModel::missing_shock;
  scaled.r2 = raw.r2 = 0.75;
  scaled.scale_singles_by_tau = true;
  raw.scale_singles_by_tau = false;
  const DrawBundle bundle = draw_bundle(TypeSpace(2, 2), m, scaled, 5);
  const FiniteMarket a = assemble_market(phi, m, scaled, bundle);
  const FiniteMarket b = assemble_market(phi, m, raw, bundle);
  const double tau = std::sqrt(0.25);
  for (int i = 0; i < a.I(); ++i) {
    CHECK(a.phi_i0[i] == doctest::Approx(tau * bundle.eps(i, 0)));
    CHECK(b.phi_i0[i] == doctest::Approx(bundle.eps(i, 0)));
  }
}

TEST_CASE("build_finite_market rejects fractional margins") {
  NoiseSpec spec;
  CHECK_THROWS_AS(build_finite_market(small_phi(), counts({1.5, 1}, {1, 1.5}), spec, 1),
                  DomainError);
}

TEST_CASE("multinomial draws land in the right cells") {
  Rng rng(88);
  const auto counts = draw_multinomial(rng, 100000, {0.5, 0.25, 0.25});
  CHECK(counts[0] + counts[1] + counts[2] == 100000);
  CHECK(std::abs(counts[0] - 50000) < 700);
  CHECK(std::abs(counts[1] - 25000) < 700);
}
