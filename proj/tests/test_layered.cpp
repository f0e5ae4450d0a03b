#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "insopt/bessel.hpp"
#include "insopt/layered.hpp"
#include "insopt/spectra.hpp"
#include "support.hpp"

using namespace insopt;
using Catch::Approx;

TEST_CASE("eliminated limit relation is the Robin dispersion with the effective weight",
          "[layered]") {
  auto g = testsupport::rng(201);
  const double hi = bessel_j0_first_zero();
  for (int trial = 0; trial < 20; ++trial) {
    const double beta = testsupport::uniform(g, 0.2, 8.0);
    const double h = testsupport::uniform(g, 0.05, 3.0);
    const double beta_eff = beta / (1.0 + beta * h);

    const double k_limit =
        bisect([&](double k) { return limit_dispersion_residual(beta, h, 1.0, k); }, 1e-9, hi);
    const double k_robin = disk_robin_oracle(beta_eff, 1.0).k;

    // evaluate each residual at the other's root
    REQUIRE(std::abs(limit_dispersion_residual(beta, h, 1.0, k_robin)) < 1e-10);
    REQUIRE(std::abs(k_limit * bessel_j1(k_limit) - beta_eff * bessel_j0(k_limit)) < 1e-10);
    REQUIRE(k_limit == Approx(k_robin).margin(1e-12));
  }
}

TEST_CASE("vanishing profile recovers the Robin eigenvalue continuously", "[layered]") {
  const double beta = 1.0, eps = 0.05;
  const double lambda_r = disk_robin_oracle(beta, 1.0).lambda;
  double prev_gap = 1e300;
  for (double h : {0.5, 0.1, 0.02, 0.004}) {
    const double lam = radial_layer_eigenvalue({eps, h, beta, 1.0});
    const double gap = std::abs(lam - lambda_r);
    REQUIRE(gap < prev_gap);
    prev_gap = gap;
  }
  REQUIRE(prev_gap < 0.02);
}

TEST_CASE("gamma sweep: monotone gap, first-order ratios, Dirichlet ceiling", "[layered]") {
  const double beta = 1.0, h = 1.0;
  const std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125, 0.00625};
  const auto rows = gamma_limit_report(beta, h, eps_list);
  REQUIRE(rows.size() == eps_list.size());

  const double lambda_d = disk_dirichlet_oracle(1.0).lambda;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    REQUIRE(rows[i].eps == eps_list[i]);
    REQUIRE(rows[i].lambda_eps < lambda_d);
    if (i > 0) REQUIRE(rows[i].gap < rows[i - 1].gap);
  }
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double ratio = rows[i].gap / rows[i + 1].gap;
    REQUIRE(ratio >= 1.5);
    REQUIRE(ratio <= 2.5);
  }

  // a single row reproduces the scalar solver
  const auto single = gamma_limit_report(beta, h, {0.1});
  REQUIRE(single[0].lambda_eps == radial_layer_eigenvalue({0.1, h, beta, 1.0}));
}

TEST_CASE("layer spec validation", "[layered]") {
  REQUIRE_THROWS_AS(radial_layer_eigenvalue({0.0, 1.0, 1.0, 1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(radial_layer_eigenvalue({0.5, 3.0, 1.0, 1.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(gamma_limit_report(1.0, 1.0, {0.1, 0.2}), std::invalid_argument);
  REQUIRE_THROWS_AS(gamma_limit_report(1.0, 1.0, {}), std::invalid_argument);
}
