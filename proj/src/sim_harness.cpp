#include "gpfewshot/sim_harness.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "gpfewshot/errors.hpp"
#include "gpfewshot/gauss_math.hpp"

namespace gpfewshot::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct EpisodeStats {
  double y_hat = 0.0;
  double y_check = 0.0;
  double f_hat = 0.0;
  double f_check = 0.0;
};

int resolve_threads(int requested, long long episodes) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  return static_cast<int>(std::min<long long>(threads, episodes));
}

/// Runs one work item per episode index on a small pool; the first failure
/// aborts the rest and is rethrown with its episode index.
template <typename Fn>
void parallel_for_episodes(long long episodes, int threads, Fn&& body) {
  std::atomic<long long> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const long long i = next.fetch_add(1);
      if (i >= episodes) break;
      try {
        body(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // sample variance
};

Moments moments_of(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, xs.size() > 1 ? ss / (n - 1.0) : 0.0};
}

double covariance_of(const std::vector<double>& xs, const std::vector<double>& ys,
                     double mean_x, double mean_y) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ss += (xs[i] - mean_x) * (ys[i] - mean_y);
  }
  return ss / (static_cast<double>(xs.size()) - 1.0);
}

Estimate estimate_of(const std::vector<double>& xs) {
  const Moments m = moments_of(xs);
  return {m.mean, std::sqrt(m.variance / static_cast<double>(xs.size()))};
}

/// Ratio of means num/den with the delta-method standard error.
Estimate ratio_estimate(const std::vector<double>& num,
                        const std::vector<double>& den) {
  const Moments mn = moments_of(num);
  const Moments md = moments_of(den);
  const double n = static_cast<double>(num.size());
  const double r = mn.mean / md.mean;
  const double cov = covariance_of(num, den, mn.mean, md.mean);
  const double var =
      (mn.variance - 2.0 * r * cov + r * r * md.variance) / (n * md.mean * md.mean);
  return {r, std::sqrt(std::max(var, 0.0))};
}

bool is_identity(const Eigen::MatrixXd& m) {
  return m.isIdentity(0.0);
}

void attach_finite_bounds(const gp::ProblemInstance& instance,
                          std::vector<bounds::BoundReport>& out) {
  const double n = static_cast<double>(instance.n_arms());
  const double t = static_cast<double>(instance.horizon);
  const bool zero_mean = instance.mean.isZero(0.0);
  if (t >= 500.0 && n >= t) {
    out.push_back({bounds::BoundKind::Thm1Spread, n, t, 0, 0.0, 0.0,
                   bounds::extremization_regret_bound(n, t)});
    if (zero_mean) {
      out.push_back({bounds::BoundKind::Cor1Normreg, n, t, 0, 0.0, 0.0,
                     bounds::maximization_normreg_bound(n, t)});
    }
  }
  if (zero_mean && is_identity(instance.covariance) && t >= 2.0) {
    out.push_back({bounds::BoundKind::LowerIid, n, t, 0, 0.0, 0.0,
                   bounds::iid_lower_bound(n, t)});
  }
  out.push_back({bounds::BoundKind::LowerPriorIndependent, n, t, 0, 0.0, 0.0,
                 bounds::prior_independent_lower_bound(n, t)});
}

void attach_continuous_bounds(const continuous::ContinuousInstance& cont,
                              std::vector<bounds::BoundReport>& out) {
  const double lipschitz = continuous::lipschitz_constant(cont.kernel);
  const double t = static_cast<double>(cont.horizon);
  const int d = cont.kernel.dim;
  const double sigma = std::sqrt(cont.kernel.variance);
  out.push_back({bounds::BoundKind::Grunewalder, 0.0, t, d, lipschitz, 0.0,
                 bounds::grunewalder_bound(d, t, lipschitz)});
  try {
    const double value = bounds::continuous_regret_bound(d, t, lipschitz, sigma);
    out.push_back({bounds::BoundKind::Thm2Continuous, 0.0, t, d, lipschitz,
                   sigma, value});
  } catch (const DomainError&) {
    // Outside the bound's validity region; nothing to attach.
  }
}

}  // namespace

std::mt19937_64 episode_rng(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t state = master_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  const std::uint64_t a = splitmix64(state);
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

gp::ProblemInstance materialize_instance(const InstanceSource& source) {
  if (const auto* iid = std::get_if<IidSource>(&source)) {
    gp::ProblemInstance instance;
    instance.mean = Eigen::VectorXd::Zero(iid->n_arms);
    instance.covariance =
        Eigen::MatrixXd::Identity(iid->n_arms, iid->n_arms);
    instance.horizon = iid->horizon;
    instance.validate();
    return instance;
  }
  if (const auto* spike = std::get_if<SpikeSource>(&source)) {
    gp::ProblemInstance instance =
        spike_instance(static_cast<int>(spike->n_arms), spike->spike_index,
                       spike->spike_variance, spike->horizon);
    instance.validate();
    return instance;
  }
  if (const auto* expl = std::get_if<ExplicitSource>(&source)) {
    expl->instance.validate();
    return expl->instance;
  }
  const auto& cont = std::get<ContinuousSource>(source);
  return continuous::build_grid_instance(cont.instance).instance;
}

RegretReport run_experiment(const SimConfig& config,
                            std::vector<TrajectoryDump>* dumps,
                            long long dump_limit) {
  if (config.episodes < 1) throw DomainError("episodes must be >= 1");

  const bool is_continuous =
      std::holds_alternative<ContinuousSource>(config.source);
  const int threads = resolve_threads(config.threads, config.episodes);

  std::vector<EpisodeStats> stats(config.episodes);
  std::vector<policies::Trajectory> kept;
  const long long keep = dumps ? std::min(dump_limit, config.episodes) : 0;
  if (keep > 0) kept.resize(keep);
  const policies::EpisodeOptions opts{config.tie_break};

  RegretReport report;
  report.episodes = config.episodes;
  report.master_seed = config.master_seed;
  report.policy = policies::to_string(config.policy);

  if (is_continuous) {
    const auto& cont = std::get<ContinuousSource>(config.source).instance;
    continuous::JointGridSampler sampler(cont);
    report.instance_kind = "continuous";
    report.n_arms = static_cast<long long>(sampler.grid().points.size());
    report.horizon = cont.horizon;

    parallel_for_episodes(config.episodes, threads, [&](long long i) {
      std::mt19937_64 rng = episode_rng(config.master_seed, i);
      continuous::ContinuousEpisodeResult episode = continuous::
          run_continuous_episode(sampler, cont.horizon, config.policy, rng, opts);
      const auto& traj = episode.trajectory;
      if (traj.running_max > episode.sup_estimate ||
          traj.running_min < episode.inf_estimate) {
        throw NumericalError("episode observed a value outside the joint sample range");
      }
      stats[i] = {traj.running_max, traj.running_min, episode.sup_estimate,
                  episode.inf_estimate};
      if (i < keep) kept[i] = traj;
    });
    attach_continuous_bounds(cont, report.applicable_bounds);
  } else {
    const gp::ProblemInstance instance = materialize_instance(config.source);
    const gp::PriorSampler sampler(instance);
    report.instance_kind =
        std::holds_alternative<IidSource>(config.source)    ? "iid"
        : std::holds_alternative<SpikeSource>(config.source) ? "spike"
                                                             : "explicit";
    report.n_arms = instance.n_arms();
    report.horizon = instance.horizon;

    parallel_for_episodes(config.episodes, threads, [&](long long i) {
      std::mt19937_64 rng = episode_rng(config.master_seed, i);
      const gp::SampledFunction sample = sampler.sample(rng);
      policies::EpisodeResult episode = policies::run_episode_on_sample(
          instance, sample, config.policy, rng, opts);
      const auto& traj = episode.trajectory;
      if (traj.running_max > episode.f_max || traj.running_min < episode.f_min) {
        // Observations are entries of F, so this cannot happen.
        throw NumericalError("episode observed a value outside the sampled range");
      }
      stats[i] = {traj.running_max, traj.running_min, episode.f_max,
                  episode.f_min};
      if (i < keep) kept[i] = traj;
    });
    attach_finite_bounds(instance, report.applicable_bounds);
  }

  // Deterministic in-order fold, independent of the worker schedule.
  std::vector<double> y_hats(config.episodes), f_hats(config.episodes);
  std::vector<double> y_spreads(config.episodes), f_spreads(config.episodes);
  for (long long i = 0; i < config.episodes; ++i) {
    y_hats[i] = stats[i].y_hat;
    f_hats[i] = stats[i].f_hat;
    y_spreads[i] = stats[i].y_hat - stats[i].y_check;
    f_spreads[i] = stats[i].f_hat - stats[i].f_check;
  }
  report.mean_yhat = estimate_of(y_hats);
  report.mean_fhat = estimate_of(f_hats);
  report.mean_spread_y = estimate_of(y_spreads);
  report.mean_spread_f = estimate_of(f_spreads);
  const Estimate ratio = ratio_estimate(y_hats, f_hats);
  report.normreg = {1.0 - ratio.value, ratio.stderr_};
  report.spread_ratio = ratio_estimate(y_spreads, f_spreads);

  if (dumps) {
    for (long long i = 0; i < keep; ++i) {
      dumps->push_back({i, std::move(kept[i])});
    }
  }
  return report;
}

double expected_max_iid(long long k) {
  if (k < 1) throw DomainError("expected_max_iid requires k >= 1");
  const double kd = static_cast<double>(k);

  auto integrand = [kd](double x) {
    const double log_cdf = std::log(gauss::std_normal_cdf(x));
    return kd * x * gauss::std_normal_pdf(x) * std::exp((kd - 1.0) * log_cdf);
  };

  // Adaptive Simpson on 64 base panels over [-12, 12].
  std::function<double(double, double, double, double, double, double, double,
                       int)>
      refine = [&](double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) -> double {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = integrand(lm);
    const double frm = integrand(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
      return left + right + delta / 15.0;
    }
    return refine(a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           refine(m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
  };

  constexpr int kPanels = 64;
  constexpr double kLo = -12.0, kHi = 12.0;
  const double width = (kHi - kLo) / kPanels;
  double total = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = kLo + p * width;
    const double b = a + width;
    const double m = 0.5 * (a + b);
    const double fa = integrand(a);
    const double fm = integrand(m);
    const double fb = integrand(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += refine(a, b, fa, fm, fb, whole, 1e-10 / kPanels, 40);
  }
  return total;
}

gp::ProblemInstance spike_instance(int n_arms, int spike_index,
                                   double spike_variance, long long horizon) {
  if (spike_index < 0 || spike_index >= n_arms) {
    throw DomainError("spike index out of range");
  }
  if (!(spike_variance > 0.0)) {
    throw DomainError("spike variance must be positive");
  }
  gp::ProblemInstance instance;
  instance.mean = Eigen::VectorXd::Zero(n_arms);
  instance.covariance = Eigen::MatrixXd::Zero(n_arms, n_arms);
  instance.covariance(spike_index, spike_index) = spike_variance;
  instance.horizon = horizon;
  return instance;
}

RegretReport adversarial_spike_demo(int n_arms, long long horizon,
                                    policies::PolicyKind policy,
                                    long long episodes, std::uint64_t seed) {
  if (policy != policies::PolicyKind::RandomWor) {
    throw DomainError(
        "the adversarial spike placement is only valid against "
        "prior-independent policies (random_wor)");
  }
  if (horizon > n_arms) throw DomainError("spike demo requires T <= N");

  // Visit frequencies under the zero prior decide where the spike goes.
  constexpr long long kCalibrationEpisodes = 10000;
  gp::ProblemInstance zero;
  zero.mean = Eigen::VectorXd::Zero(n_arms);
  zero.covariance = Eigen::MatrixXd::Zero(n_arms, n_arms);
  zero.horizon = horizon;
  const gp::SampledFunction flat =
      gp::SampledFunction::from_values(Eigen::VectorXd::Zero(n_arms));

  std::vector<long long> visits(n_arms, 0);
  for (long long e = 0; e < kCalibrationEpisodes; ++e) {
    std::mt19937_64 rng = episode_rng(seed ^ 0xCA11B7A7E5EEDULL, e);
    const policies::EpisodeResult episode =
        policies::run_episode_on_sample(zero, flat, policy, rng);
    for (int arm : episode.trajectory.actions) ++visits[arm];
  }
  int least_visited = 0;
  for (int a = 1; a < n_arms; ++a) {
    if (visits[a] < visits[least_visited]) least_visited = a;
  }

  SimConfig config;
  config.source = SpikeSource{n_arms, horizon, least_visited, 1.0};
  config.policy = policy;
  config.episodes = episodes;
  config.master_seed = seed;
  return run_experiment(config);
}

SubmodularityDemo nonsubmodularity_demo() {
  constexpr double kExtremeObservation = 5.0;
  constexpr double kCorrelation = -0.9;

  gp::ProblemInstance instance;
  instance.mean = Eigen::VectorXd::Zero(3);
  instance.covariance = Eigen::MatrixXd::Identity(3, 3);
  instance.covariance(1, 2) = kCorrelation;
  instance.covariance(2, 1) = kCorrelation;
  instance.horizon = 3;
  instance.validate();

  const gp::PosteriorState after_first =
      gp::PosteriorState::prior(instance).conditioned(0, kExtremeObservation);
  const double benefit_before =
      gauss::ei_scaled(kExtremeObservation, after_first.mean()(2),
                       after_first.posterior_sd(2));

  // Observation on arm 1 that drives arm 2's posterior mean to the running
  // max, solved from the rank-1 mean update.
  const double required =
      after_first.mean()(1) +
      (kExtremeObservation - after_first.mean()(2)) *
          after_first.cov()(1, 1) / after_first.cov()(2, 1);
  const gp::PosteriorState after_second = after_first.conditioned(1, required);

  SubmodularityDemo demo;
  demo.benefit_before = benefit_before;
  demo.posterior_sd_after = after_second.posterior_sd(2);
  demo.benefit_after = gauss::ei_scaled(
      kExtremeObservation, after_second.mean()(2), demo.posterior_sd_after);
  return demo;
}

}  // namespace gpfewshot::sim
