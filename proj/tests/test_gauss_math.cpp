#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gpfewshot/errors.hpp"
#include "gpfewshot/gauss_math.hpp"
#include "gpfewshot/gp_model.hpp"
#include "oracles.hpp"

using namespace gpfewshot;
using namespace gpfewshot::gauss;

TEST_CASE("standard normal pdf") {
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(std_normal_pdf(2.0) == doctest::Approx(0.05399096651318806).epsilon(1e-12));
  CHECK(std_normal_pdf(1.7) == std_normal_pdf(-1.7));
  CHECK(std_normal_pdf(40.0) > 0.0);
  CHECK_THROWS_AS(std_normal_pdf(std::nan("")), DomainError);
}

TEST_CASE("ccdf against the defining integral") {
  // Oracle: adaptive quadrature of the tail integral.
  const double quad = oracles::integrate(
      [](double x) { return oracles::normal_pdf(x); }, 2.0, 42.0);
  CHECK(std_normal_ccdf(2.0) == doctest::Approx(quad).epsilon(1e-11));
  CHECK(std_normal_ccdf(2.0) ==
        doctest::Approx(0.02275013194817921).epsilon(1e-12));
  CHECK(std_normal_ccdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));

  // Far tail: tiny, no trap, no NaN.
  const double far = std_normal_ccdf(40.0);
  CHECK(far < 1e-300);
  CHECK(far >= 0.0);
  CHECK_THROWS_AS(std_normal_ccdf(std::numeric_limits<double>::infinity()),
                  DomainError);
}

TEST_CASE("ccdf monotone decreasing") {
  double previous = 1.0;
  for (double tau = -8.0; tau <= 8.0; tau += 0.05) {
    const double value = std_normal_ccdf(tau);
    CHECK(value < previous);
    previous = value;
  }
}

TEST_CASE("ccdf sandwich") {
  const auto at2 = ccdf_sandwich(2.0);
  CHECK(at2.lower == doctest::Approx(0.02024661244244552).epsilon(1e-12));
  CHECK(at2.upper == doctest::Approx(0.02530826555305690).epsilon(1e-12));

  const auto at1 = ccdf_sandwich(1.0);
  CHECK(at1.lower == 0.0);  // 1/tau - 1/tau^3 vanishes at tau = 1

  const auto at5 = ccdf_sandwich(5.0);
  const double cc5 = std_normal_ccdf(5.0);
  CHECK(at5.lower <= cc5);
  CHECK(cc5 <= at5.upper);

  CHECK_THROWS_AS(ccdf_sandwich(0.0), DomainError);
  CHECK_THROWS_AS(ccdf_sandwich(-1.0), DomainError);
}

TEST_CASE("ei values and identities") {
  CHECK(ei(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));

  // Reflection: ei(-t) = ei(t) + t.
  CHECK(ei(-1.7) == doctest::Approx(ei(1.7) + 1.7).epsilon(1e-14));

  const auto sandwich3 = ei_sandwich(3.0);
  CHECK(sandwich3.lower <= ei(3.0));
  CHECK(ei(3.0) <= sandwich3.upper);

  CHECK_THROWS_AS(ei(std::nan("")), DomainError);
}

TEST_CASE("ei positive, decreasing, convex") {
  double previous = std::numeric_limits<double>::infinity();
  for (double tau = -8.0; tau <= 8.0; tau += 0.01) {
    const double value = ei(tau);
    CHECK(value > 0.0);
    CHECK(value < previous);
    previous = value;
  }
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-6.0, 6.0);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double a = uni(rng), b = uni(rng);
    const double l = lam(rng);
    const double lhs = ei(l * a + (1.0 - l) * b);
    CHECK(lhs <= l * ei(a) + (1.0 - l) * ei(b) + 1e-12);
  }
}

TEST_CASE("ei_scaled") {
  CHECK(ei_scaled(0.0, 0.0, 2.0) ==
        doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(ei_scaled(1.0, 3.0, 0.0) == 2.0);
  CHECK(ei_scaled(3.0, 1.0, 0.0) == 0.0);
  CHECK_THROWS_AS(ei_scaled(0.0, 0.0, -1.0), DomainError);

  // Oracle: quadrature of the defining integral for N(-0.2, 1.3^2).
  const double tau = 0.5, mu = -0.2, sigma = 1.3;
  const double quad = oracles::integrate(
      [&](double x) { return (x - tau) * oracles::normal_pdf(x, mu, sigma); },
      tau, mu + 60.0 * sigma, 1e-13);
  CHECK(ei_scaled(tau, mu, sigma) == doctest::Approx(quad).epsilon(1e-10));
  CHECK(ei_scaled(tau, mu, sigma) ==
        doctest::Approx(0.2420449711562083).epsilon(1e-12));

  // Exact scaling relation and continuity of the sigma -> 0 limit.
  for (double s : {2.5, 0.7, 1e-1, 1e-3}) {
    CHECK(ei_scaled(0.4, -0.3, s) == s * ei((0.4 + 0.3) / s));
  }
  double previous_gap = std::numeric_limits<double>::infinity();
  for (double s : {1e-1, 1e-2, 1e-4, 1e-6, 1e-8}) {
    const double gap = std::abs(ei_scaled(0.4, 0.7, s) - 0.3);
    CHECK(gap <= previous_gap);
    previous_gap = gap;
  }
  CHECK(std::abs(ei_scaled(0.4, 0.7, 1e-8) - 0.3) < 1e-8);
}

TEST_CASE("ei sandwich") {
  const auto at2 = ei_sandwich(2.0);
  CHECK(at2.lower == doctest::Approx(0.003374435407074253).epsilon(1e-12));
  CHECK(at2.upper == doctest::Approx(0.01349774162829701).epsilon(1e-12));
  CHECK(at2.lower <= ei(2.0));
  CHECK(ei(2.0) <= at2.upper);

  const auto at_root3 = ei_sandwich(std::sqrt(3.0));
  CHECK(std::abs(at_root3.lower) < 1e-16);

  const auto at4 = ei_sandwich(4.0);
  CHECK(at4.lower <= ei(4.0));
  CHECK(ei(4.0) <= at4.upper);

  CHECK_THROWS_AS(ei_sandwich(-2.0), DomainError);
}

TEST_CASE("sandwich properties on a log grid") {
  for (int i = 0; i < 1000; ++i) {
    const double tau =
        std::exp(std::log(1e-3) + (std::log(10.0) - std::log(1e-3)) * i / 999.0);
    const auto cs = ccdf_sandwich(tau);
    const double cc = std_normal_ccdf(tau);
    REQUIRE(cs.lower <= cc);
    REQUIRE(cc <= cs.upper);
    const auto es = ei_sandwich(tau);
    const double e = ei(tau);
    REQUIRE(es.lower <= e);
    REQUIRE(e <= es.upper);
  }
}

TEST_CASE("ei second derivative") {
  CHECK(ei_second_derivative(0.0) ==
        doctest::Approx(0.3989422804014327).epsilon(1e-12));
  for (double tau : {-2.0, -0.4, 0.9, 3.3}) {
    CHECK(ei_second_derivative(tau) == std_normal_pdf(tau));
  }
  // Central finite difference of ei with step 1e-5.
  const double h = 1e-5;
  const double fd = (ei(1.3 + h) - 2.0 * ei(1.3) + ei(1.3 - h)) / (h * h);
  CHECK(std::abs(fd - ei_second_derivative(1.3)) < 1e-6);
}

TEST_CASE("mei upper bound closed forms") {
  MeiInput two;
  two.mean = Eigen::Vector2d(0.0, 0.0);
  two.cov = Eigen::Matrix2d::Identity();
  two.tau = 10.0;
  // First term clamps to zero since sqrt(2 log 2) < 10.
  CHECK(mei_upper_bound(two) ==
        doctest::Approx(0.2877760247680406).epsilon(1e-12));

  MeiInput deterministic;
  deterministic.mean = Eigen::Vector2d(5.0, 0.0);
  deterministic.cov = Eigen::Matrix2d::Zero();
  deterministic.tau = 0.0;
  CHECK(mei_upper_bound(deterministic) == 5.0);
}

TEST_CASE("mei domain errors") {
  MeiInput one;
  one.mean = Eigen::VectorXd::Constant(1, 0.0);
  one.cov = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(mei_upper_bound(one), DomainError);

  MeiInput indefinite;
  indefinite.mean = Eigen::Vector2d(0.0, 0.0);
  indefinite.cov.resize(2, 2);
  indefinite.cov << 1.0, 2.0, 2.0, 1.0;  // eigenvalues -1 and 3
  CHECK_THROWS_AS(mei_upper_bound(indefinite), DomainError);

  MeiInput asymmetric;
  asymmetric.mean = Eigen::Vector2d(0.0, 0.0);
  asymmetric.cov.resize(2, 2);
  asymmetric.cov << 1.0, 0.5, 0.2, 1.0;
  CHECK_THROWS_AS(mei_upper_bound(asymmetric), DomainError);
}

TEST_CASE("mei translation is exact") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    MeiInput input;
    input.cov = a * a.transpose();
    input.cov = ((input.cov + input.cov.transpose()) * 0.5).eval();
    input.mean.resize(n);
    for (int i = 0; i < n; ++i) input.mean(i) = normal(rng);
    input.tau = normal(rng);

    MeiInput shifted;
    shifted.cov = input.cov;
    shifted.mean = input.mean.array() - input.tau;
    shifted.tau = 0.0;
    CHECK(mei_upper_bound(input) == mei_upper_bound(shifted));
  }
}

TEST_CASE("mei bound dominates Monte Carlo estimates") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int k = 0; k < 25; ++k) {
    const int n = 2 + static_cast<int>(rng() % 4);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    MeiInput input;
    input.cov = a * a.transpose();
    input.cov = ((input.cov + input.cov.transpose()) * 0.5).eval();
    input.cov *= static_cast<double>(n) / input.cov.trace();
    input.mean.resize(n);
    for (int i = 0; i < n; ++i) input.mean(i) = normal(rng);
    input.tau = normal(rng);

    const double bound = mei_upper_bound(input);
    const Eigen::MatrixXd factor = gp::psd_factor(input.cov);
    const int samples = 20000;
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd z(n);
    for (int s = 0; s < samples; ++s) {
      for (int i = 0; i < n; ++i) z(i) = normal(rng);
      const double value =
          std::max((input.mean + factor * z).maxCoeff() - input.tau, 0.0);
      sum += value;
      sum_sq += value * value;
    }
    const double mc = sum / samples;
    const double se =
        std::sqrt(std::max(sum_sq / samples - mc * mc, 0.0) / samples);
    CHECK(bound >= mc - 3.0 * se);
  }
}

TEST_CASE("mei bound dominates on a fixed three-arm instance") {
  MeiInput input;
  input.mean = Eigen::Vector3d::Zero();
  input.cov = Eigen::Matrix3d::Identity();
  input.tau = 0.0;
  const double bound = mei_upper_bound(input);

  std::mt19937_64 rng(31);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int samples = 1000000;
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double m =
        std::max({normal(rng), normal(rng), normal(rng), 0.0});
    sum += m;
  }
  CHECK(bound >= sum / samples);
}
