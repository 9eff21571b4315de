#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpfewshot/bounds.hpp"
#include "gpfewshot/errors.hpp"

using namespace gpfewshot;
using namespace gpfewshot::bounds;

TEST_CASE("finite-domain regret bound values") {
  CHECK(extremization_regret_bound(1e20, 1e6) ==
        doctest::Approx(0.5722651844585684).epsilon(1e-12));
  CHECK(std::abs(extremization_regret_bound(1e20, 1e6) - 0.572) <= 1e-3);

  const double at_minimum = extremization_regret_bound(500, 500);
  CHECK(at_minimum == doctest::Approx(0.4888293569583759).epsilon(1e-12));
  CHECK(at_minimum > 0.0);
  CHECK(at_minimum < 1.0);

  CHECK(maximization_normreg_bound(2000, 500) ==
        doctest::Approx(0.5377890843826348).epsilon(1e-12));
  CHECK(maximization_normreg_bound(1e10, 1e4) ==
        extremization_regret_bound(1e10, 1e4));
}

TEST_CASE("finite-domain bound guards") {
  CHECK_THROWS_AS(extremization_regret_bound(100, 100), DomainError);
  CHECK_THROWS_AS(extremization_regret_bound(1000, 499), DomainError);
  CHECK_THROWS_AS(extremization_regret_bound(600, 700), DomainError);
  CHECK_THROWS_AS(extremization_regret_bound(std::nan(""), 500), DomainError);
}

TEST_CASE("bound monotone in T and N") {
  CHECK(extremization_regret_bound(1e10, 1e4) >
        extremization_regret_bound(1e10, 1e6));
  double previous = 0.0;
  for (double n : {1e3, 1e6, 1e12, 1e24}) {
    const double value = extremization_regret_bound(n, 1000);
    CHECK(value > previous);
    previous = value;
  }
}

TEST_CASE("bound stays inside (0,1) on a wide sweep") {
  for (double log_n = std::log(500.0); log_n <= std::log(1e30); log_n += 0.5) {
    const double n = std::exp(log_n);
    for (double log_t = std::log(500.0); log_t <= log_n; log_t += 0.7) {
      const double t = std::exp(log_t);
      const double value = extremization_regret_bound(n, std::min(t, n));
      REQUIRE(value > 0.0);
      REQUIRE(value < 1.0);
    }
  }
}

TEST_CASE("asymptotic envelope") {
  CHECK(asymptotic_normreg(1000, 1000) == 0.0);
  CHECK(asymptotic_normreg(1e25, 10.0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(iid_lower_bound(1e6, 1e3) ==
        doctest::Approx(0.2928932188134525).epsilon(1e-12));
  CHECK(iid_lower_bound(1e6, 1e3) == asymptotic_normreg(1e6, 1e3));
  CHECK_THROWS_AS(asymptotic_normreg(1.0, 1.0), DomainError);

  // Gap to the exact bound shrinks along N = T^2.
  double previous = 1e300;
  for (int j = 3; j <= 10; ++j) {
    const double t = std::pow(10.0, j);
    const double gap =
        extremization_regret_bound(t * t, t) - asymptotic_normreg(t * t, t);
    CHECK(gap > 0.0);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(previous < 0.1);  // 0.0965 at T = 1e10
}

TEST_CASE("required evaluations envelope") {
  CHECK(required_evaluations_envelope(1e25, 0.8) ==
        doctest::Approx(10.0).epsilon(1e-9));
  CHECK(required_evaluations_envelope(1e12, 1.0) == 1.0);
  CHECK(required_evaluations_envelope(1e12, 0.0) ==
        doctest::Approx(1e12).epsilon(1e-12));
  CHECK_THROWS_AS(required_evaluations_envelope(1e12, 1.5), DomainError);
  CHECK_THROWS_AS(required_evaluations_envelope(1e12, -0.1), DomainError);
}

TEST_CASE("prior-independent lower bound") {
  CHECK(prior_independent_lower_bound(1000, 100) == doctest::Approx(0.9));
  CHECK(prior_independent_lower_bound(750, 750) == 0.0);
  CHECK_THROWS_AS(prior_independent_lower_bound(100, 200), DomainError);

  // At mismatched scales this floor dwarfs the policy bound.
  CHECK(prior_independent_lower_bound(1e20, 1e6) >
        maximization_normreg_bound(1e20, 1e6));
}

TEST_CASE("a-priori grid bound") {
  CHECK(grunewalder_bound(1, 100, 1.0) ==
        doctest::Approx(2.772369795847134).epsilon(1e-12));
  // sqrt scaling in the Lipschitz constant.
  CHECK(grunewalder_bound(3, 1e4, 4.0) ==
        doctest::Approx(2.0 * grunewalder_bound(3, 1e4, 1.0)).epsilon(1e-12));
  CHECK(std::isfinite(grunewalder_bound(5, 1e5, 100.0)));
  CHECK_THROWS_AS(grunewalder_bound(0, 100, 1.0), DomainError);
  CHECK_THROWS_AS(grunewalder_bound(1, 100, -1.0), DomainError);
}

TEST_CASE("grid sides") {
  CHECK(grid_sides(1, 1, std::exp(2.0)) == 4.0);
  CHECK(grid_sides(2, 1e4, 100.0) == 2172.0);
  CHECK_THROWS_AS(grid_sides(1, 100, 2.0), DomainError);  // needs L > e

  double previous = 0.0;
  for (double lk = 3.0; lk < 1e4; lk *= 1.7) {
    const double s = grid_sides(1, 100, lk);
    CHECK(s >= previous);  // x / log x increases beyond e
    previous = s;
  }
}

TEST_CASE("continuous regret bound") {
  // Golden value cross-checked against an independent high-precision
  // evaluation of the same closed form.
  CHECK(continuous_regret_bound(1, 1e5, 1e3, 1.0) ==
        doctest::Approx(2.485016544291781).epsilon(1e-10));

  // Doubling L changes the second term exactly through sqrt(D log S).
  const int d = 2;
  const double t = 1e4, sigma = 1.3;
  const double lk = 50.0;
  const double full_1 = continuous_regret_bound(d, t, lk, sigma);
  const double full_2 = continuous_regret_bound(d, t, 2.0 * lk, sigma);
  auto term1 = [&](double l) {
    const double s = grid_sides(d, t, l);
    return std::sqrt(2.0 * std::log(l) / std::pow(t, 1.0 / d)) *
           (2.0 * std::sqrt(std::log(2.0) + d * std::log(s)) +
            15.0 * std::sqrt(double(d)));
  };
  auto term2_grid = [&](double l) {
    const double s = grid_sides(d, t, l);
    return std::sqrt(2.0) * sigma * std::sqrt(d * std::log(s));
  };
  const double delta_expected =
      (term1(2.0 * lk) + term2_grid(2.0 * lk)) - (term1(lk) + term2_grid(lk));
  CHECK(full_2 - full_1 == doctest::Approx(delta_expected).epsilon(1e-12));

  CHECK_THROWS_AS(continuous_regret_bound(1, 400, 1e3, 1.0), DomainError);
  CHECK_THROWS_AS(continuous_regret_bound(1, 1e5, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(continuous_regret_bound(1, 1e5, 1e3, 0.0), DomainError);

  // Non-increasing in T on a valid sweep.
  double previous = 1e300;
  for (double horizon : {500.0, 1e3, 1e4, 1e5, 1e6}) {
    const double value = continuous_regret_bound(3, horizon, 1e4, 1.0);
    CHECK(value <= previous);
    previous = value;
  }
}

TEST_CASE("continuous formula path covers small T but not undefined T") {
  CHECK(std::isfinite(continuous_regret_formula(5, 100.0, 1e3, 1.0)));
  CHECK_THROWS_AS(continuous_regret_bound(5, 100.0, 1e3, 1.0), DomainError);
  // At T = 10 the log term itself is negative: undefined everywhere.
  CHECK_THROWS_AS(continuous_regret_formula(5, 10.0, 1e3, 1.0), DomainError);
}

TEST_CASE("required horizon bisection") {
  const double n = 1e12;
  for (double target : {0.3, 0.5, 0.7}) {
    const double t = required_horizon_bisect(n, target);
    REQUIRE(std::isfinite(t));
    CHECK(extremization_regret_bound(n, t) <= target);
    if (t > 500.0) {
      CHECK(extremization_regret_bound(n, t - 1.0) > target);
    }
  }
  // Tiny target: not reachable inside [500, N].
  CHECK(std::isinf(required_horizon_bisect(1e6, 0.001)));
  // Loose target: already satisfied at the smallest valid horizon.
  CHECK(required_horizon_bisect(1e6, 0.99) == 500.0);
}

TEST_CASE("bound kind names") {
  CHECK(to_string(BoundKind::Thm1Spread) == "thm1_spread");
  CHECK(to_string(BoundKind::Cor1Normreg) == "cor1_normreg");
  CHECK(to_string(BoundKind::LowerIid) == "lower_iid");
  CHECK(to_string(BoundKind::LowerPriorIndependent) ==
        "lower_prior_independent");
  CHECK(to_string(BoundKind::Thm2Continuous) == "thm2_continuous");
  CHECK(to_string(BoundKind::Grunewalder) == "grunewalder");
}
