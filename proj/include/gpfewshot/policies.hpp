#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gpfewshot/gp_model.hpp"

namespace gpfewshot::policies {

/// Action/observation history with incrementally maintained extremes.
struct Trajectory {
  std::vector<int> actions;
  std::vector<double> observations;
  double running_max = 0.0;
  double running_min = 0.0;

  bool empty() const { return actions.empty(); }
  double spread() const { return running_max - running_min; }
  void append(int arm, double value);
};

enum class PolicyKind { Ei2, Ucb2, Ei2Sum, OneSidedEi, OneSidedUcb, RandomWor };

/// Wire names: "ei2", "ucb2", "ei2_sum", "ei", "ucb", "random_wor".
PolicyKind policy_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

/// True when the policy's decisions use the posterior (random_wor does not).
bool uses_posterior(PolicyKind kind);

enum class TieBreak { LowestIndex, Random };

enum class Side { Up, Down };

/// Winning arm of an acquisition argmax, with the winning value and which
/// branch of the outer max produced it.
struct AcquisitionScore {
  int arm = 0;
  double score = 0.0;
  Side side = Side::Up;
};

/// Read-only view of the per-arm posterior marginals that the selectors are
/// allowed to see. Variances at or below var_floor score as deterministic.
struct PosteriorSummary {
  std::span<const double> mean;
  std::span<const double> variance;
  double var_floor = 0.0;

  int n_arms() const { return static_cast<int>(mean.size()); }
};

/// Score of a single arm under each acquisition rule, with thresholds
/// y_hat (running max) and y_check (running min).
double ei2_arm_score(const PosteriorSummary& s, int arm, double y_hat,
                     double y_check, Side* side);
double ucb2_arm_score(const PosteriorSummary& s, int arm, double y_hat,
                      double y_check, double log_n, Side* side);

/// argmax_n max{ei(y_hat | m_n, sd_n), ei(-y_check | -m_n, sd_n)};
/// ties break to the lowest arm index.
AcquisitionScore ei2_select(const PosteriorSummary& s, double y_hat,
                            double y_check);

/// argmax_n max{-y_hat + m_n + sd_n sqrt(2 log N),
///              y_check - m_n + sd_n sqrt(2 log N)}; requires N >= 2.
AcquisitionScore ucb2_select(const PosteriorSummary& s, double y_hat,
                             double y_check);

/// Sum-of-branches variant of ei2 (greedy one-step spread improvement).
AcquisitionScore ei2_sum_select(const PosteriorSummary& s, double y_hat,
                                double y_check);

/// Up-branch-only baselines.
AcquisitionScore one_sided_ei_select(const PosteriorSummary& s, double y_hat);
AcquisitionScore one_sided_ucb_select(const PosteriorSummary& s, double y_hat);

/// Uniform draw over arms not yet visited; exhaustion is an error.
int random_without_replacement_select(const Trajectory& traj, int n_arms,
                                      std::mt19937_64& rng);

/// Selection at t = 0, before any observation exists: both thresholds take
/// the prior convention y_hat = y_check = mean of the prior mean vector.
AcquisitionScore first_action(const PosteriorSummary& s,
                              const Eigen::VectorXd& prior_mean,
                              PolicyKind kind);

struct EpisodeOptions {
  TieBreak tie_break = TieBreak::LowestIndex;
};

/// Trajectory together with the extremes of the underlying sample.
struct EpisodeResult {
  Trajectory trajectory;
  double f_max = 0.0;
  double f_min = 0.0;
};

/// Episode loop on a pre-drawn function realization: select, observe
/// Y_t = F[A_t], condition, for `horizon` steps. Policies see only the
/// posterior and the trajectory, never F itself.
EpisodeResult run_episode_on_sample(const gp::ProblemInstance& instance,
                                    const gp::SampledFunction& sample,
                                    PolicyKind kind, std::mt19937_64& rng,
                                    const EpisodeOptions& opts = {});

/// Samples F from the prior, then runs the episode loop. Deterministic for
/// a fixed seed.
Trajectory run_episode(const gp::ProblemInstance& instance, PolicyKind kind,
                       std::uint64_t seed, const EpisodeOptions& opts = {});

}  // namespace gpfewshot::policies
