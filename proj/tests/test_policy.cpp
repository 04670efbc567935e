#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sil/policy.hpp"
#include "sil/rng.hpp"

using namespace sil;

namespace {
constexpr double kM = 0.3164;
}

TEST_CASE("improvement_cutoff") {
  CHECK(improvement_cutoff(0.0, 0.1, kM) == 0.0);
  CHECK(improvement_cutoff(1.0, 0.1, kM) == 1.0);
  CHECK(improvement_cutoff(0.9, 0.1, kM) ==
        doctest::Approx(0.074462300719803543).epsilon(1e-13));
  CHECK(improvement_cutoff(0.9, 0.1, kM) ==
        doctest::Approx(min_x0_to_improve(0.9, 0.1, kM)).epsilon(1e-15));

  SUBCASE("strictly increasing in theta and in r") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
      const double theta = rng.uniform(0.05, 0.9);
      const double r = rng.uniform(0.01, 1.0);
      CHECK(improvement_cutoff(theta + 0.05, r, kM) >
            improvement_cutoff(theta, r, kM));
      CHECK(improvement_cutoff(theta, r * 1.5, kM) >
            improvement_cutoff(theta, r, kM));
    }
  }
}

TEST_CASE("welfare") {
  const auto uniform = Density::beta(1, 1);
  CHECK(welfare(0.0, uniform, 0.1, kM).welfare == 0.0);
  CHECK(welfare(1.0, uniform, 0.1, kM).welfare == 0.0);

  SUBCASE("uniform density matches the closed form (theta - x*)^2 / 2") {
    CHECK(welfare(0.5, uniform, 0.1, kM).welfare ==
          doctest::Approx(0.11478046714038835).epsilon(1e-9));
    for (int j = 1; j < 100; ++j) {
      const double theta = j / 100.0;
      const double cutoff = improvement_cutoff(theta, 0.1, kM);
      const double expected = 0.5 * (theta - cutoff) * (theta - cutoff);
      CHECK(std::abs(welfare(theta, uniform, 0.1, kM).welfare - expected) <=
            1e-8);
    }
  }
  SUBCASE("positive on the interior for positive densities") {
    for (const auto& d : {Density::beta(1, 1), Density::beta(2, 2),
                          Density::beta(0.91, 3.84)})
      for (double theta : {0.05, 0.3, 0.6, 0.95})
        CHECK(welfare(theta, d, 0.1, kM).welfare > 0.0);
  }
  SUBCASE("welfare of an empirical density") {
    const auto d = density_from_cdf_table({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
    // piecewise-uniform: integrate (theta - x) * pdf by hand on [x*, theta]
    const double theta = 0.4;
    const double cutoff = improvement_cutoff(theta, 0.1, kM);
    const double expected = 1.6 * 0.5 * (theta - cutoff) * (theta - cutoff);
    CHECK(welfare(theta, d, 0.1, kM).welfare ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("optimal_threshold") {
  const auto uniform = Density::beta(1, 1);

  SUBCASE("uniform case agrees with the derivative-root oracle") {
    // d/dtheta [(theta - x*)^2 / 2] = 0  <=>  E^(1/3) x*(theta) = theta,
    // solved in closed form as theta^2 = (E - E^(2/3)) / (E - 1).
    const double E = std::exp(2.0 * kM / std::log1p(0.1));
    const double oracle = std::sqrt((E - std::cbrt(E * E)) / (E - 1.0));
    const auto out = optimal_threshold(uniform, 0.1, kM);
    CHECK(std::abs(out.theta_star - oracle) <= 1e-4);
    CHECK(out.single_peaked);
    CHECK(out.welfare ==
          doctest::Approx(welfare(oracle, uniform, 0.1, kM).welfare)
              .epsilon(1e-6));
  }
  SUBCASE("interior optimum with positive welfare") {
    for (const auto& d :
         {Density::beta(2, 2), Density::beta(3, 1), Density::beta(1, 1)}) {
      const auto out = optimal_threshold(d, 0.1, kM);
      CHECK(out.theta_star > 0.0);
      CHECK(out.theta_star < 1.0);
      CHECK(out.welfare > 0.0);
    }
  }
  SUBCASE("theta* shifts down as r grows") {
    const auto slow = optimal_threshold(uniform, 0.05, kM);
    const auto fast = optimal_threshold(uniform, 0.2, kM);
    CHECK(fast.theta_star <= slow.theta_star + 1e-9);
  }
}

TEST_CASE("manipulation_fraction") {
  const auto uniform = Density::beta(1, 1);
  CHECK(manipulation_fraction(uniform, 0.995, 0.1, {1.0}, kM) == 0.0);

  // region (0.364, 0.995) under a uniform density
  CHECK(std::abs(manipulation_fraction(uniform, 0.995, 0.1, {0.0}, kM) - 0.631) <=
        0.006);

  SUBCASE("nonincreasing in the detection probability") {
    double prev = 1.0;
    for (double p : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
      const double fraction =
          manipulation_fraction(uniform, 0.995, 0.1, {p}, kM);
      CHECK(fraction <= prev + 1e-12);
      CHECK(fraction >= 0.0);
      CHECK(fraction <= 1.0);
      prev = fraction;
    }
  }
}

TEST_CASE("estimate_r inverts the published cutoff") {
  for (const auto& [theta, r] : {std::pair{0.9, 0.1}, {0.976, 0.05}}) {
    const double cutoff = improvement_cutoff(theta, r, kM);
    CHECK(std::abs(estimate_r(theta, cutoff, kM) - r) / r <= 1e-9);
  }
  CHECK_THROWS_AS(estimate_r(0.9, 0.95, kM), std::invalid_argument);
  CHECK_THROWS_AS(estimate_r(0.9, 0.9, kM), std::invalid_argument);

  SUBCASE("multi-experiment mode returns estimates and their mean") {
    const double r_true = 0.07;
    const auto out = estimate_r_multi(
        {{0.8, improvement_cutoff(0.8, r_true, kM)},
         {0.9, improvement_cutoff(0.9, r_true, kM)}},
        kM);
    REQUIRE(out.estimates.size() == 2);
    CHECK(out.estimates[0] == doctest::Approx(r_true).epsilon(1e-9));
    CHECK(out.estimates[1] == doctest::Approx(r_true).epsilon(1e-9));
    CHECK(out.mean == doctest::Approx(r_true).epsilon(1e-9));
  }
}
