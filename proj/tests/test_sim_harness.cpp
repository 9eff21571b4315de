#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gpfewshot/config.hpp"
#include "gpfewshot/errors.hpp"
#include "gpfewshot/sim_harness.hpp"

using namespace gpfewshot;
using namespace gpfewshot::sim;

TEST_CASE("expected max of iid normals") {
  CHECK(std::abs(expected_max_iid(1)) < 1e-9);
  // Closed form for two draws: 1/sqrt(pi); the quadrature is the shipped
  // oracle, the closed form its cross-check.
  CHECK(expected_max_iid(2) ==
        doctest::Approx(0.5641895835477563).epsilon(1e-9));
  CHECK_THROWS_AS(expected_max_iid(0), DomainError);

  // Ratio against sqrt(2 log k) approaches one from below.
  double previous = 0.0;
  for (long long k : {100LL, 1000LL, 10000LL, 100000LL, 1000000LL}) {
    const double ratio =
        expected_max_iid(k) / std::sqrt(2.0 * std::log(double(k)));
    CHECK(ratio > previous);
    previous = ratio;
  }
  CHECK(previous > 0.8);
  CHECK(previous < 1.0);
}

TEST_CASE("deterministic experiment on a deterministic instance") {
  gp::ProblemInstance instance;
  instance.mean = Eigen::Vector2d(1.0, 0.0);
  instance.covariance = Eigen::Matrix2d::Zero();
  instance.horizon = 2;

  SimConfig config;
  config.source = ExplicitSource{instance};
  config.policy = policies::PolicyKind::Ei2;
  config.episodes = 10;
  config.master_seed = 7;
  const RegretReport report = run_experiment(config);
  CHECK(report.mean_yhat.value == 1.0);
  CHECK(report.mean_fhat.value == 1.0);
  CHECK(report.normreg.value == 0.0);
  CHECK(report.normreg.stderr_ == 0.0);
  CHECK(report.mean_spread_y.value == 1.0);
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  SimConfig config;
  config.source = IidSource{50, 20};
  config.policy = policies::PolicyKind::Ucb2;
  config.episodes = 64;
  config.master_seed = 99;

  config.threads = 1;
  const std::string single =
      config::report_to_json(run_experiment(config)).dump_pretty();
  config.threads = 4;
  const std::string pooled =
      config::report_to_json(run_experiment(config)).dump_pretty();
  CHECK(single == pooled);

  const std::string repeat =
      config::report_to_json(run_experiment(config)).dump_pretty();
  CHECK(pooled == repeat);
}

TEST_CASE("stderr shrinks roughly with sqrt of episodes") {
  SimConfig config;
  config.source = IidSource{100, 10};
  config.policy = policies::PolicyKind::RandomWor;
  config.master_seed = 11;

  config.episodes = 500;
  const double se_small = run_experiment(config).mean_yhat.stderr_;
  config.episodes = 2000;
  const double se_large = run_experiment(config).mean_yhat.stderr_;
  CHECK(se_large < se_small * 0.6);
  CHECK(se_large > se_small * 0.4);
}

TEST_CASE("uniform exploration matches the order-statistic quadrature") {
  SimConfig config;
  config.source = IidSource{1000, 100};
  config.policy = policies::PolicyKind::RandomWor;
  config.episodes = 5000;
  config.master_seed = 13;
  const RegretReport report = run_experiment(config);
  const double expected = expected_max_iid(100);
  CHECK(std::abs(report.mean_yhat.value - expected) <=
        3.0 * report.mean_yhat.stderr_);

  // The identity prior carries every finite-domain bound except the
  // T >= 500 pair.
  bool has_lower_iid = false, has_lower_pi = false, has_thm1 = false;
  for (const auto& b : report.applicable_bounds) {
    has_lower_iid |= b.kind == bounds::BoundKind::LowerIid;
    has_lower_pi |= b.kind == bounds::BoundKind::LowerPriorIndependent;
    has_thm1 |= b.kind == bounds::BoundKind::Thm1Spread;
  }
  CHECK(has_lower_iid);
  CHECK(has_lower_pi);
  CHECK(!has_thm1);
}

TEST_CASE("bounds attach when the horizon is large enough") {
  SimConfig config;
  config.source = IidSource{600, 500};
  config.policy = policies::PolicyKind::Ei2;
  config.episodes = 2;
  config.master_seed = 17;
  const RegretReport report = run_experiment(config);
  bool has_thm1 = false, has_cor1 = false;
  for (const auto& b : report.applicable_bounds) {
    if (b.kind == bounds::BoundKind::Thm1Spread) {
      has_thm1 = true;
      CHECK(b.value == doctest::Approx(
                           bounds::extremization_regret_bound(600, 500)));
    }
    has_cor1 |= b.kind == bounds::BoundKind::Cor1Normreg;
  }
  CHECK(has_thm1);
  CHECK(has_cor1);
}

TEST_CASE("spike instance construction and half-normal mean") {
  const gp::ProblemInstance spike = spike_instance(3, 1, 1.0, 2);
  CHECK(spike.covariance(1, 1) == 1.0);
  CHECK(spike.covariance(0, 0) == 0.0);
  CHECK(spike.covariance.sum() == 1.0);
  CHECK_THROWS_AS(spike_instance(3, 5, 1.0), DomainError);
  CHECK_THROWS_AS(spike_instance(3, 0, -1.0), DomainError);

  SimConfig config;
  config.source = SpikeSource{200, 50, 17, 1.0};
  config.policy = policies::PolicyKind::RandomWor;
  config.episodes = 4000;
  config.master_seed = 19;
  const RegretReport report = run_experiment(config);
  // E[max(F)] = E[max(Z, 0)] = 1/sqrt(2 pi).
  CHECK(std::abs(report.mean_fhat.value - 0.3989422804014327) <=
        3.0 * report.mean_fhat.stderr_);
  // Uniform coverage: E[yhat] = (T/N) E[fhat].
  CHECK(std::abs(report.normreg.value - (1.0 - 50.0 / 200.0)) <=
        3.0 * report.normreg.stderr_);
}

TEST_CASE("adversarial spike demo approaches 1 - T/N") {
  const RegretReport report = adversarial_spike_demo(
      200, 20, policies::PolicyKind::RandomWor, 4000, 23);
  CHECK(std::abs(report.normreg.value - 0.9) <= 3.0 * report.normreg.stderr_);
  CHECK_THROWS_AS(adversarial_spike_demo(200, 20, policies::PolicyKind::Ei2,
                                         100, 23),
                  DomainError);
}

TEST_CASE("spike demo at full coverage has zero regret") {
  const RegretReport report = adversarial_spike_demo(
      40, 40, policies::PolicyKind::RandomWor, 500, 29);
  CHECK(report.normreg.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("non-submodularity demonstration") {
  const SubmodularityDemo demo = nonsubmodularity_demo();
  CHECK(demo.benefit_before < 1e-6);
  CHECK(demo.benefit_after > demo.benefit_before);
  CHECK(demo.benefit_after > 0.1 * demo.posterior_sd_after);
  CHECK(demo.posterior_sd_after ==
        doctest::Approx(std::sqrt(0.19)).epsilon(1e-12));
  CHECK(demo.benefit_after ==
        doctest::Approx(0.1738949084575512).epsilon(1e-10));
}

TEST_CASE("episode failure reports the failing configuration") {
  // A continuous source with an over-budget grid fails fast.
  SimConfig config;
  continuous::ContinuousInstance cont;
  cont.kernel = {continuous::KernelKind::SquaredExponential, 0.0005, 1.0, 1};
  cont.horizon = 500;
  config.source = ContinuousSource{cont};
  config.policy = policies::PolicyKind::Ei2;
  config.episodes = 1;
  config.master_seed = 3;
  CHECK_THROWS_AS(run_experiment(config), ResourceError);
}

TEST_CASE("continuous experiment attaches both continuous bounds") {
  SimConfig config;
  continuous::ContinuousInstance cont;
  cont.kernel = {continuous::KernelKind::SquaredExponential, 0.02, 1.0, 1};
  cont.horizon = 500;
  config.source = ContinuousSource{cont};
  config.policy = policies::PolicyKind::Ei2;
  config.episodes = 3;
  config.master_seed = 31;
  const RegretReport report = run_experiment(config);
  bool has_thm2 = false, has_grun = false;
  for (const auto& b : report.applicable_bounds) {
    has_thm2 |= b.kind == bounds::BoundKind::Thm2Continuous;
    has_grun |= b.kind == bounds::BoundKind::Grunewalder;
  }
  CHECK(has_thm2);
  CHECK(has_grun);
  CHECK(report.mean_fhat.value >= report.mean_yhat.value);
}

TEST_CASE("trajectory dumps carry the whole history") {
  SimConfig config;
  config.source = IidSource{20, 5};
  config.policy = policies::PolicyKind::Ei2;
  config.episodes = 8;
  config.master_seed = 37;
  std::vector<TrajectoryDump> dumps;
  run_experiment(config, &dumps, 3);
  REQUIRE(dumps.size() == 3);
  for (const auto& dump : dumps) {
    CHECK(dump.trajectory.actions.size() == 5);
    CHECK(dump.trajectory.observations.size() == 5);
  }
  const std::string csv = config::trajectories_to_csv(dumps);
  CHECK(csv.rfind("episode,step,action,observation,running_max,running_min\n",
                  0) == 0);
  // Header plus 3 episodes x 5 steps.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16);
}
