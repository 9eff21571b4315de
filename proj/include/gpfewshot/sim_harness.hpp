#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gpfewshot/bounds.hpp"
#include "gpfewshot/continuous.hpp"
#include "gpfewshot/gp_model.hpp"
#include "gpfewshot/policies.hpp"

namespace gpfewshot::sim {

/// Zero-mean identity-covariance instance of the given size.
struct IidSource {
  long long n_arms = 0;
  long long horizon = 0;
};

/// Prior that is zero everywhere except one arm with positive variance.
struct SpikeSource {
  long long n_arms = 0;
  long long horizon = 0;
  int spike_index = 0;
  double spike_variance = 1.0;
};

struct ExplicitSource {
  gp::ProblemInstance instance;
};

struct ContinuousSource {
  continuous::ContinuousInstance instance;
};

using InstanceSource =
    std::variant<IidSource, SpikeSource, ExplicitSource, ContinuousSource>;

struct SimConfig {
  InstanceSource source;
  policies::PolicyKind policy = policies::PolicyKind::Ei2;
  policies::TieBreak tie_break = policies::TieBreak::LowestIndex;
  long long episodes = 1;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0 = hardware concurrency
};

struct Estimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Monte Carlo summary of an experiment plus every closed-form bound whose
/// preconditions the instance satisfies.
struct RegretReport {
  Estimate mean_yhat;      // E[running max]
  Estimate mean_fhat;      // E[function max] (continuous: refinement sup)
  Estimate mean_spread_y;  // E[running max - running min]
  Estimate mean_spread_f;
  Estimate normreg;        // 1 - E[yhat]/E[fhat], delta-method stderr
  Estimate spread_ratio;   // E[spread_y]/E[spread_f], delta-method stderr
  std::vector<bounds::BoundReport> applicable_bounds;
  long long episodes = 0;
  std::uint64_t master_seed = 0;
  std::string instance_kind;
  long long n_arms = 0;
  long long horizon = 0;
  std::string policy;
};

/// Per-episode trace rows for CSV dumps.
struct TrajectoryDump {
  long long episode = 0;
  policies::Trajectory trajectory;
};

/// Runs `episodes` independent seeded episodes and aggregates in episode
/// order, so the result is independent of thread count. When
/// `dump_limit > 0`, trajectories of the first episodes are returned too.
RegretReport run_experiment(const SimConfig& config,
                            std::vector<TrajectoryDump>* dumps = nullptr,
                            long long dump_limit = 0);

/// E[max of k iid standard normals] by adaptive quadrature of
/// the order-statistic integral over [-12, 12]; absolute error <= 1e-9.
double expected_max_iid(long long k);

/// mu = 0 and covariance zero except [index][index] = variance.
gp::ProblemInstance spike_instance(int n_arms, int spike_index,
                                   double spike_variance,
                                   long long horizon = 1);

/// Estimates visit frequencies of the policy under the zero prior, places
/// the spike at the least-visited arm, and measures the resulting regret.
/// Only prior-independent policies are accepted.
RegretReport adversarial_spike_demo(int n_arms, long long horizon,
                                    policies::PolicyKind policy,
                                    long long episodes, std::uint64_t seed);

struct SubmodularityDemo {
  double benefit_before = 0.0;
  double benefit_after = 0.0;
  double posterior_sd_after = 0.0;
};

/// Two negatively correlated arms next to an independent one: after an
/// extreme observation elsewhere, conditioning on the first correlated arm
/// can raise the expected improvement of the second, so the marginal benefit
/// of an action is not monotone in the information gathered.
SubmodularityDemo nonsubmodularity_demo();

/// Per-episode generator for (master_seed, episode_index).
std::mt19937_64 episode_rng(std::uint64_t master_seed, std::uint64_t index);

/// Builds the finite instance described by a source (continuous sources are
/// reduced through their grid).
gp::ProblemInstance materialize_instance(const InstanceSource& source);

}  // namespace gpfewshot::sim
