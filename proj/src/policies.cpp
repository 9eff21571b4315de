#include "gpfewshot/policies.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gpfewshot/errors.hpp"
#include "gpfewshot/gauss_math.hpp"

namespace gpfewshot::policies {

namespace {

double arm_sd(const PosteriorSummary& s, int arm) {
  const double var = s.variance[arm];
  if (var <= s.var_floor) return 0.0;
  return std::sqrt(var);
}

/// Argmax with the range of scoring rules factored out. Ties keep the lowest
/// index; TieBreak::Random instead reservoir-samples the tied set.
template <typename ScoreFn>
AcquisitionScore select_by(const PosteriorSummary& s, ScoreFn&& score_of,
                           TieBreak tie_break, std::mt19937_64* rng) {
  const int n = s.n_arms();
  if (n < 1) throw DomainError("selection requires at least one arm");
  AcquisitionScore best;
  Side side = Side::Up;
  best.arm = 0;
  best.score = score_of(0, &side);
  best.side = side;
  int tie_count = 1;
  for (int arm = 1; arm < n; ++arm) {
    const double score = score_of(arm, &side);
    if (score > best.score) {
      best = {arm, score, side};
      tie_count = 1;
    } else if (score == best.score && tie_break == TieBreak::Random) {
      ++tie_count;
      std::uniform_int_distribution<int> pick(0, tie_count - 1);
      if (pick(*rng) == 0) best = {arm, score, side};
    }
  }
  return best;
}

double log_arm_count(const PosteriorSummary& s) {
  if (s.n_arms() < 2) throw DomainError("UCB scoring requires N >= 2");
  return std::log(static_cast<double>(s.n_arms()));
}

AcquisitionScore select_for_kind(PolicyKind kind, const PosteriorSummary& s,
                                 double y_hat, double y_check,
                                 TieBreak tie_break, std::mt19937_64* rng) {
  switch (kind) {
    case PolicyKind::Ei2:
      return select_by(
          s,
          [&](int arm, Side* side) {
            return ei2_arm_score(s, arm, y_hat, y_check, side);
          },
          tie_break, rng);
    case PolicyKind::Ucb2: {
      const double log_n = log_arm_count(s);
      return select_by(
          s,
          [&](int arm, Side* side) {
            return ucb2_arm_score(s, arm, y_hat, y_check, log_n, side);
          },
          tie_break, rng);
    }
    case PolicyKind::Ei2Sum:
      return select_by(
          s,
          [&](int arm, Side* side) {
            Side up_down = Side::Up;
            const double up = gauss::ei_scaled(y_hat, s.mean[arm], arm_sd(s, arm));
            const double down =
                gauss::ei_scaled(-y_check, -s.mean[arm], arm_sd(s, arm));
            if (down > up) up_down = Side::Down;
            *side = up_down;
            return up + down;
          },
          tie_break, rng);
    case PolicyKind::OneSidedEi:
      return select_by(
          s,
          [&](int arm, Side* side) {
            *side = Side::Up;
            return gauss::ei_scaled(y_hat, s.mean[arm], arm_sd(s, arm));
          },
          tie_break, rng);
    case PolicyKind::OneSidedUcb: {
      const double log_n = log_arm_count(s);
      const double root = std::sqrt(2.0 * log_n);
      return select_by(
          s,
          [&](int arm, Side* side) {
            *side = Side::Up;
            return (s.mean[arm] - y_hat) + arm_sd(s, arm) * root;
          },
          tie_break, rng);
    }
    case PolicyKind::RandomWor:
      throw DomainError("random_wor has no acquisition score");
  }
  throw DomainError("unknown policy kind");
}

}  // namespace

void Trajectory::append(int arm, double value) {
  if (actions.empty()) {
    running_max = value;
    running_min = value;
  } else {
    running_max = std::max(running_max, value);
    running_min = std::min(running_min, value);
  }
  actions.push_back(arm);
  observations.push_back(value);
}

PolicyKind policy_from_string(const std::string& name) {
  if (name == "ei2") return PolicyKind::Ei2;
  if (name == "ucb2") return PolicyKind::Ucb2;
  if (name == "ei2_sum") return PolicyKind::Ei2Sum;
  if (name == "ei") return PolicyKind::OneSidedEi;
  if (name == "ucb") return PolicyKind::OneSidedUcb;
  if (name == "random_wor") return PolicyKind::RandomWor;
  throw DomainError("unknown policy kind: " + name);
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Ei2: return "ei2";
    case PolicyKind::Ucb2: return "ucb2";
    case PolicyKind::Ei2Sum: return "ei2_sum";
    case PolicyKind::OneSidedEi: return "ei";
    case PolicyKind::OneSidedUcb: return "ucb";
    case PolicyKind::RandomWor: return "random_wor";
  }
  return "unknown";
}

bool uses_posterior(PolicyKind kind) { return kind != PolicyKind::RandomWor; }

double ei2_arm_score(const PosteriorSummary& s, int arm, double y_hat,
                     double y_check, Side* side) {
  const double sd = arm_sd(s, arm);
  const double up = gauss::ei_scaled(y_hat, s.mean[arm], sd);
  const double down = gauss::ei_scaled(-y_check, -s.mean[arm], sd);
  *side = down > up ? Side::Down : Side::Up;
  return std::max(up, down);
}

double ucb2_arm_score(const PosteriorSummary& s, int arm, double y_hat,
                      double y_check, double log_n, Side* side) {
  const double bonus = arm_sd(s, arm) * std::sqrt(2.0 * log_n);
  const double up = (s.mean[arm] - y_hat) + bonus;
  const double down = (y_check - s.mean[arm]) + bonus;
  *side = down > up ? Side::Down : Side::Up;
  return std::max(up, down);
}

AcquisitionScore ei2_select(const PosteriorSummary& s, double y_hat,
                            double y_check) {
  return select_for_kind(PolicyKind::Ei2, s, y_hat, y_check,
                         TieBreak::LowestIndex, nullptr);
}

AcquisitionScore ucb2_select(const PosteriorSummary& s, double y_hat,
                             double y_check) {
  return select_for_kind(PolicyKind::Ucb2, s, y_hat, y_check,
                         TieBreak::LowestIndex, nullptr);
}

AcquisitionScore ei2_sum_select(const PosteriorSummary& s, double y_hat,
                                double y_check) {
  return select_for_kind(PolicyKind::Ei2Sum, s, y_hat, y_check,
                         TieBreak::LowestIndex, nullptr);
}

AcquisitionScore one_sided_ei_select(const PosteriorSummary& s, double y_hat) {
  return select_for_kind(PolicyKind::OneSidedEi, s, y_hat, 0.0,
                         TieBreak::LowestIndex, nullptr);
}

AcquisitionScore one_sided_ucb_select(const PosteriorSummary& s, double y_hat) {
  return select_for_kind(PolicyKind::OneSidedUcb, s, y_hat, 0.0,
                         TieBreak::LowestIndex, nullptr);
}

int random_without_replacement_select(const Trajectory& traj, int n_arms,
                                      std::mt19937_64& rng) {
  std::vector<char> visited(n_arms, 0);
  for (int a : traj.actions) visited[a] = 1;
  std::vector<int> open;
  open.reserve(n_arms);
  for (int a = 0; a < n_arms; ++a) {
    if (!visited[a]) open.push_back(a);
  }
  if (open.empty()) {
    throw DomainError("random_wor: all arms already visited");
  }
  std::uniform_int_distribution<size_t> pick(0, open.size() - 1);
  return open[pick(rng)];
}

AcquisitionScore first_action(const PosteriorSummary& s,
                              const Eigen::VectorXd& prior_mean,
                              PolicyKind kind) {
  const double level = prior_mean.mean();
  return select_for_kind(kind, s, level, level, TieBreak::LowestIndex, nullptr);
}

EpisodeResult run_episode_on_sample(const gp::ProblemInstance& instance,
                                    const gp::SampledFunction& sample,
                                    PolicyKind kind, std::mt19937_64& rng,
                                    const EpisodeOptions& opts) {
  if (sample.values.size() != instance.mean.size()) {
    throw DomainError("sample length does not match instance");
  }
  gp::IncrementalPosterior engine(instance);
  const double prior_level = instance.mean.mean();
  Trajectory traj;
  const int n = instance.n_arms();

  for (long long t = 0; t < instance.horizon; ++t) {
    int arm;
    if (kind == PolicyKind::RandomWor) {
      arm = random_without_replacement_select(traj, n, rng);
    } else {
      const double y_hat = traj.empty() ? prior_level : traj.running_max;
      const double y_check = traj.empty() ? prior_level : traj.running_min;
      const PosteriorSummary summary{engine.mean_view(), engine.variance_view(),
                                     engine.var_floor()};
      arm = select_for_kind(kind, summary, y_hat, y_check, opts.tie_break, &rng)
                .arm;
    }
    double value;
    if (engine.is_observed(arm)) {
      value = engine.observed_value(arm);
    } else {
      value = sample.values(arm);
      engine.observe(arm, value);
    }
    traj.append(arm, value);
  }
  return {std::move(traj), sample.f_max, sample.f_min};
}

Trajectory run_episode(const gp::ProblemInstance& instance, PolicyKind kind,
                       std::uint64_t seed, const EpisodeOptions& opts) {
  instance.validate();
  std::mt19937_64 rng(seed);
  gp::PriorSampler sampler(instance);
  const gp::SampledFunction sample = sampler.sample(rng);
  return run_episode_on_sample(instance, sample, kind, rng, opts).trajectory;
}

}  // namespace gpfewshot::policies
