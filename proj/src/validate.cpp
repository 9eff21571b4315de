#include "gpfewshot/validate.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "gpfewshot/bounds.hpp"
#include "gpfewshot/config.hpp"
#include "gpfewshot/continuous.hpp"
#include "gpfewshot/figures.hpp"
#include "gpfewshot/gauss_math.hpp"
#include "gpfewshot/gp_model.hpp"
#include "gpfewshot/policies.hpp"
#include "gpfewshot/sim_harness.hpp"

namespace gpfewshot::validate {

namespace {

using gauss::ei;
using gauss::ei_sandwich;
using gauss::std_normal_ccdf;
using policies::PolicyKind;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool condition, const std::string& message) {
    if (!condition) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << message;
    }
  }

  void note(const std::string& message) {
    if (detail.tellp() > 0) detail << "; ";
    detail << message;
  }
};

std::string fmt(double v) { return jsonout::format_g12(v); }

// --------------------------------------------------------------------------
// Shared instance builders for the validation matrix.

gp::ProblemInstance sqexp_grid_instance(int n_arms, double length_scale,
                                        long long horizon) {
  gp::ProblemInstance instance;
  instance.mean = Eigen::VectorXd::Zero(n_arms);
  instance.covariance.resize(n_arms, n_arms);
  for (int i = 0; i < n_arms; ++i) {
    const double xi = (i + 0.5) / n_arms;
    for (int j = i; j < n_arms; ++j) {
      const double xj = (j + 0.5) / n_arms;
      const double d = xi - xj;
      const double v = std::exp(-d * d / (2.0 * length_scale * length_scale));
      instance.covariance(i, j) = v;
      instance.covariance(j, i) = v;
    }
  }
  instance.horizon = horizon;
  return instance;
}

gp::ProblemInstance random_psd_instance(int n_arms, long long horizon,
                                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(n_arms, n_arms);
  for (int i = 0; i < n_arms; ++i) {
    for (int j = 0; j < n_arms; ++j) a(i, j) = normal(rng);
  }
  gp::ProblemInstance instance;
  instance.mean = Eigen::VectorXd::Zero(n_arms);
  instance.covariance = (a * a.transpose()) / static_cast<double>(n_arms);
  instance.covariance = ((instance.covariance + instance.covariance.transpose()) * 0.5).eval();
  instance.horizon = horizon;
  return instance;
}

Eigen::MatrixXd random_unit_psd(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  Eigen::MatrixXd c = a * a.transpose();
  c = ((c + c.transpose()) * 0.5).eval();
  c *= static_cast<double>(n) / c.trace();
  return c;
}

// --------------------------------------------------------------------------
// Criterion bodies. Each returns pass/fail plus a short numeric trail.

Check criterion_gauss_brackets() {
  Check check;
  const int points = 1000;
  const double lo = std::log(1e-3), hi = std::log(10.0);
  for (int i = 0; i < points; ++i) {
    const double tau = std::exp(lo + (hi - lo) * i / (points - 1));
    const auto cs = gauss::ccdf_sandwich(tau);
    const double cc = std_normal_ccdf(tau);
    if (!(cs.lower <= cc && cc <= cs.upper)) {
      check.expect(false, "ccdf bracket violated at tau=" + fmt(tau));
      break;
    }
    const auto es = ei_sandwich(tau);
    const double e = ei(tau);
    if (!(es.lower <= e && e <= es.upper)) {
      check.expect(false, "ei bracket violated at tau=" + fmt(tau));
      break;
    }
  }
  double worst_reflection = 0.0;
  for (double tau = -8.0; tau <= 8.0; tau += 1e-3) {
    worst_reflection =
        std::max(worst_reflection, std::abs(ei(-tau) - ei(tau) - tau));
  }
  check.expect(worst_reflection <= 1e-12,
               "reflection residual " + fmt(worst_reflection) + " > 1e-12");

  std::mt19937_64 rng(7001);
  std::uniform_real_distribution<double> uni(-6.0, 6.0);
  std::uniform_real_distribution<double> lam(0.0, 1.0);
  double worst_convexity = -1e300;
  for (int i = 0; i < 10000; ++i) {
    double a = uni(rng), b = uni(rng);
    if (a > b) std::swap(a, b);
    const double l = lam(rng);
    const double mid = ei(l * a + (1.0 - l) * b);
    worst_convexity =
        std::max(worst_convexity, mid - (l * ei(a) + (1.0 - l) * ei(b)));
  }
  check.expect(worst_convexity <= 1e-12,
               "convexity residual " + fmt(worst_convexity) + " > 1e-12");
  check.note("reflection<=" + fmt(worst_reflection) +
             ", convexity<=" + fmt(worst_convexity));
  return check;
}

Check criterion_mei_dominance(bool quick) {
  Check check;
  const int instances = quick ? 60 : 200;
  const int samples = quick ? 20000 : 100000;
  std::mt19937_64 rng(7002);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 5);

  int violations = 0;
  double worst_margin = 1e300;
  for (int k = 0; k < instances; ++k) {
    const int n = size(rng);
    gauss::MeiInput input;
    input.cov = random_unit_psd(n, rng);
    input.mean.resize(n);
    for (int i = 0; i < n; ++i) input.mean(i) = normal(rng);
    input.tau = normal(rng);

    const double bound = gauss::mei_upper_bound(input);

    const Eigen::MatrixXd factor = gp::psd_factor(input.cov);
    double sum = 0.0, sum_sq = 0.0;
    Eigen::VectorXd z(n);
    for (int s = 0; s < samples; ++s) {
      for (int i = 0; i < n; ++i) z(i) = normal(rng);
      const Eigen::VectorXd f = input.mean + factor * z;
      const double value = std::max(f.maxCoeff() - input.tau, 0.0);
      sum += value;
      sum_sq += value * value;
    }
    const double mc = sum / samples;
    const double var = std::max(sum_sq / samples - mc * mc, 0.0);
    const double se = std::sqrt(var / samples);
    const double margin = bound - (mc - 3.0 * se);
    worst_margin = std::min(worst_margin, margin);
    if (margin < 0.0) ++violations;
  }
  check.expect(violations == 0,
               std::to_string(violations) + " dominance violations");
  check.note("instances=" + std::to_string(instances) +
             ", worst margin=" + fmt(worst_margin));
  return check;
}

Check criterion_conditioning(bool quick) {
  (void)quick;
  Check check;
  std::mt19937_64 rng(7003);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, 8);

  double worst_gap = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = size(rng);
    gp::ProblemInstance instance;
    instance.mean.resize(n);
    for (int i = 0; i < n; ++i) instance.mean(i) = normal(rng);
    instance.covariance = random_unit_psd(n, rng);
    instance.horizon = n;

    std::uniform_int_distribution<int> count(1, n);
    const int observed = count(rng);
    std::vector<int> arms(n);
    std::iota(arms.begin(), arms.end(), 0);
    std::shuffle(arms.begin(), arms.end(), rng);
    arms.resize(observed);
    const gp::SampledFunction sample =
        gp::PriorSampler(instance).sample(rng);

    gp::PosteriorState sequential = gp::PosteriorState::prior(instance);
    for (int arm : arms) {
      sequential.condition_in_place(arm, sample.values(arm));
    }

    // Batch Schur-complement oracle.
    Eigen::MatrixXd block(observed, observed);
    Eigen::MatrixXd cross(n, observed);
    Eigen::VectorXd shift(observed);
    for (int i = 0; i < observed; ++i) {
      shift(i) = sample.values(arms[i]) - instance.mean(arms[i]);
      cross.col(i) = instance.covariance.col(arms[i]);
      for (int j = 0; j < observed; ++j) {
        block(i, j) = instance.covariance(arms[i], arms[j]);
      }
    }
    Eigen::LDLT<Eigen::MatrixXd> solver(block);
    const Eigen::VectorXd batch_mean =
        instance.mean + cross * solver.solve(shift);
    const Eigen::MatrixXd batch_cov =
        instance.covariance - cross * solver.solve(cross.transpose());

    const double gap =
        std::max((sequential.mean() - batch_mean).cwiseAbs().maxCoeff(),
                 (sequential.cov() - batch_cov).cwiseAbs().maxCoeff());
    worst_gap = std::max(worst_gap, gap);
  }
  check.expect(worst_gap <= 1e-8,
               "sequential vs batch gap " + fmt(worst_gap) + " > 1e-8");

  // Full episodes with per-step invariants on the dense posterior, mirrored
  // against the fast episode engine.
  double worst_interp = 0.0, worst_eig = 0.0;
  for (int episode = 0; episode < 50; ++episode) {
    const int n = 5 + (episode % 8) * 5;
    gp::ProblemInstance instance;
    if (episode % 3 == 0) {
      instance.mean = Eigen::VectorXd::Zero(n);
      instance.covariance = Eigen::MatrixXd::Identity(n, n);
    } else if (episode % 3 == 1) {
      instance = sqexp_grid_instance(n, 0.15, n);
    } else {
      std::mt19937_64 inst_rng(9000 + episode);
      instance.mean = Eigen::VectorXd::Zero(n);
      instance.covariance = random_unit_psd(n, inst_rng);
    }
    instance.horizon = std::max(2, n / 2);

    const PolicyKind kind = episode % 2 == 0 ? PolicyKind::Ei2 : PolicyKind::Ucb2;
    std::mt19937_64 ep_rng = sim::episode_rng(7100, episode);
    const gp::SampledFunction sample = gp::PriorSampler(instance).sample(ep_rng);

    gp::PosteriorState state = gp::PosteriorState::prior(instance);
    policies::Trajectory traj;
    const double prior_level = instance.mean.mean();
    const double eig_floor =
        -1e-8 * instance.covariance.trace() / static_cast<double>(n);

    for (long long t = 0; t < instance.horizon; ++t) {
      Eigen::VectorXd variance = state.cov().diagonal();
      const policies::PosteriorSummary summary{
          {state.mean().data(), static_cast<size_t>(n)},
          {variance.data(), static_cast<size_t>(n)},
          state.var_floor()};
      const double y_hat = traj.empty() ? prior_level : traj.running_max;
      const double y_check = traj.empty() ? prior_level : traj.running_min;
      const policies::AcquisitionScore pick =
          kind == PolicyKind::Ei2 ? policies::ei2_select(summary, y_hat, y_check)
                                  : policies::ucb2_select(summary, y_hat, y_check);
      double value;
      if (auto it = state.observed().find(pick.arm); it != state.observed().end()) {
        value = it->second;
      } else {
        value = sample.values(pick.arm);
      }
      const Eigen::VectorXd previous_diag = state.cov().diagonal();
      state.condition_in_place(pick.arm, value);
      traj.append(pick.arm, value);

      for (const auto& [arm, observed_value] : state.observed()) {
        worst_interp = std::max(
            worst_interp, std::abs(state.mean()(arm) - observed_value));
        worst_interp =
            std::max(worst_interp, std::abs(state.cov()(arm, arm)));
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(state.cov(),
                                                        Eigen::EigenvaluesOnly);
      worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff());
      check.expect(es.eigenvalues().minCoeff() >= eig_floor,
                   "PSD invariant broken at episode " + std::to_string(episode));
      check.expect(
          ((previous_diag - state.cov().diagonal()).minCoeff()) >= -1e-10,
          "variance increased at episode " + std::to_string(episode));
      if (!check.ok) return check;
    }

    std::mt19937_64 engine_rng = sim::episode_rng(7100, episode);
    gp::PriorSampler(instance).sample(engine_rng);  // advance past the draw
    const policies::EpisodeResult fast = policies::run_episode_on_sample(
        instance, sample, kind, engine_rng);
    check.expect(fast.trajectory.actions == traj.actions,
                 "fast engine disagrees with dense posterior at episode " +
                     std::to_string(episode));
    if (!check.ok) return check;
  }
  check.expect(worst_interp <= 1e-8,
               "interpolation residual " + fmt(worst_interp) + " > 1e-8");
  check.note("batch gap<=" + fmt(worst_gap) + ", interpolation<=" +
             fmt(worst_interp) + ", min eig=" + fmt(worst_eig));
  return check;
}

Check criterion_figure1_anchor() {
  Check check;
  const double anchor = bounds::maximization_normreg_bound(1e20, 1e6);
  check.expect(std::abs(anchor - 0.572) <= 1e-3,
               "anchor " + fmt(anchor) + " not within 0.572 +- 0.001");

  const std::string csv = figures::figure1_csv();
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);  // header
  double current_n = -1.0, previous_bound = 0.0;
  bool monotone = true;
  bool anchor_row = false;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string n_str, t_str, b_str;
    std::getline(fields, n_str, ',');
    std::getline(fields, t_str, ',');
    std::getline(fields, b_str, ',');
    const double n = std::stod(n_str), t = std::stod(t_str), b = std::stod(b_str);
    if (n != current_n) {
      current_n = n;
      previous_bound = b;
    } else {
      if (b > previous_bound + 1e-12) monotone = false;
      previous_bound = b;
    }
    if (n == 1e20 && t == 1e6 && std::abs(b - 0.572) <= 1e-3) anchor_row = true;
  }
  check.expect(monotone, "figure 1 curve not monotone non-increasing in T");
  check.expect(anchor_row, "figure 1 misses the (1e20, 1e6) anchor row");
  check.note("anchor=" + fmt(anchor));
  return check;
}

Check criterion_regret_validation(bool quick, int threads,
                                  std::uint64_t seed) {
  Check check;
  const long long episodes = quick ? 200 : 2000;

  struct ConfigCase {
    std::string label;
    sim::InstanceSource source;
    long long n, t;
  };
  std::vector<ConfigCase> cases;
  cases.push_back({"iid(2000,500)", sim::IidSource{2000, 500}, 2000, 500});
  cases.push_back({"sqexp(1000,500,l=0.01)",
                   sim::ExplicitSource{sqexp_grid_instance(1000, 0.01, 500)},
                   1000, 500});
  cases.push_back({"sqexp(1000,500,l=0.05)",
                   sim::ExplicitSource{sqexp_grid_instance(1000, 0.05, 500)},
                   1000, 500});
  cases.push_back({"randpsd(600,500)",
                   sim::ExplicitSource{random_psd_instance(600, 500, 424242)},
                   600, 500});

  for (const auto& config_case : cases) {
    for (PolicyKind kind : {PolicyKind::Ei2, PolicyKind::Ucb2}) {
      sim::SimConfig config;
      config.source = config_case.source;
      config.policy = kind;
      config.episodes = episodes;
      config.master_seed = seed;
      config.threads = threads;
      const sim::RegretReport report = sim::run_experiment(config);

      const double n = static_cast<double>(config_case.n);
      const double t = static_cast<double>(config_case.t);
      const double spread_floor =
          1.0 - bounds::extremization_regret_bound(n, t);
      const double max_floor = 1.0 - bounds::maximization_normreg_bound(n, t);

      const double spread_ratio = report.spread_ratio.value;
      const double spread_slack = 3.0 * report.spread_ratio.stderr_;
      const double max_ratio = 1.0 - report.normreg.value;
      const double max_slack = 3.0 * report.normreg.stderr_;

      const std::string label =
          config_case.label + "/" + policies::to_string(kind);
      check.expect(spread_ratio >= spread_floor - spread_slack,
                   label + ": spread ratio " + fmt(spread_ratio) +
                       " below floor " + fmt(spread_floor));
      check.expect(max_ratio >= max_floor - max_slack,
                   label + ": max ratio " + fmt(max_ratio) + " below floor " +
                       fmt(max_floor));
      check.note(label + " spread=" + fmt(spread_ratio) + ">=" +
                 fmt(spread_floor) + ", max=" + fmt(max_ratio) + ">=" +
                 fmt(max_floor));
    }
  }
  return check;
}

Check criterion_spike_equality(bool quick, int, std::uint64_t seed) {
  Check check;
  const long long episodes = quick ? 2000 : 10000;
  const sim::RegretReport report = sim::adversarial_spike_demo(
      1000, 100, PolicyKind::RandomWor, episodes, seed);

  const double expected_normreg = 0.9;  // 1 - T/N
  const double expected_fhat = 0.39894228040143268;  // half-normal mean
  check.expect(std::abs(report.normreg.value - expected_normreg) <=
                   3.0 * report.normreg.stderr_,
               "normreg " + fmt(report.normreg.value) + " +- " +
                   fmt(report.normreg.stderr_) + " not at 0.9");
  check.expect(std::abs(report.mean_fhat.value - expected_fhat) <=
                   3.0 * report.mean_fhat.stderr_,
               "E[fhat] " + fmt(report.mean_fhat.value) + " not at " +
                   fmt(expected_fhat));
  check.note("normreg=" + fmt(report.normreg.value) + "+-" +
             fmt(report.normreg.stderr_) + ", fhat=" +
             fmt(report.mean_fhat.value) + "+-" + fmt(report.mean_fhat.stderr_));
  return check;
}

Check criterion_iid_trend(bool quick, int threads, std::uint64_t seed) {
  Check check;
  const double root_half = std::sqrt(0.5);
  double previous = 1e300;
  std::ostringstream seq;
  for (int j = 2; j <= 6; ++j) {
    const double t = sim::expected_max_iid(
        static_cast<long long>(std::pow(10.0, j)));
    const double n = sim::expected_max_iid(
        static_cast<long long>(std::pow(10.0, 2 * j)));
    const double gap = std::abs(t / n - root_half);
    check.expect(gap < previous,
                 "trend gap not decreasing at j=" + std::to_string(j));
    previous = gap;
    seq << (j > 2 ? "," : "") << fmt(gap);
  }

  sim::SimConfig config;
  config.source = sim::IidSource{10000, 100};
  config.policy = PolicyKind::RandomWor;
  config.episodes = quick ? 1000 : 4000;
  config.master_seed = seed;
  config.threads = threads;
  const sim::RegretReport report = sim::run_experiment(config);
  const double quad_ratio =
      sim::expected_max_iid(100) / sim::expected_max_iid(10000);
  const double mc_ratio = 1.0 - report.normreg.value;
  check.expect(std::abs(mc_ratio - quad_ratio) <= 3.0 * report.normreg.stderr_,
               "MC ratio " + fmt(mc_ratio) + " vs quadrature " +
                   fmt(quad_ratio) + " beyond 3 stderr");
  check.note("gaps=[" + seq.str() + "], mc=" + fmt(mc_ratio) +
             ", quad=" + fmt(quad_ratio));
  return check;
}

Check criterion_continuous_comparison(bool quick, int threads,
                                      std::uint64_t seed) {
  Check check;
  // Lipschitz sweep at D=5, T=1e5: once the two-term bound dips below the
  // a-priori grid bound it must stay below, with a growing gap.
  const int dim = 5;
  const double horizon = 1e5;
  std::vector<double> lks;
  for (int i = 0; i <= 24; ++i) {
    lks.push_back(std::pow(10.0, 1.0 + 11.0 * i / 24.0));
  }
  int transitions = 0;
  bool below_prev = false;
  double prev_gap = -1e300;
  bool gap_grows = true;
  for (std::size_t i = 0; i < lks.size(); ++i) {
    const double g = bounds::grunewalder_bound(dim, horizon, lks[i]);
    const double c = bounds::continuous_regret_bound(dim, horizon, lks[i], 1.0);
    const bool below = c < g;
    if (i > 0 && below != below_prev) ++transitions;
    if (below) {
      const double gap = g - c;
      if (gap <= prev_gap) gap_grows = false;
      prev_gap = gap;
    }
    below_prev = below;
  }
  check.expect(below_prev, "two-term bound not below the grid bound at max L");
  check.expect(transitions <= 1,
               "more than one crossover in the Lipschitz sweep");
  check.expect(gap_grows, "gap not growing with the Lipschitz constant");

  // Monte Carlo: empirical regret under the continuous bound.
  continuous::ContinuousInstance cont;
  cont.kernel = {continuous::KernelKind::SquaredExponential, 0.02, 1.0, 1};
  cont.horizon = 500;
  const double lipschitz = continuous::lipschitz_constant(cont.kernel);
  const double bound = bounds::continuous_regret_bound(
      1, 500.0, lipschitz, std::sqrt(cont.kernel.variance));

  sim::SimConfig config;
  config.source = sim::ContinuousSource{cont};
  config.policy = PolicyKind::Ei2;
  config.episodes = quick ? 100 : 500;
  config.master_seed = seed;
  config.threads = threads;
  const sim::RegretReport report = sim::run_experiment(config);
  const double regret = report.mean_fhat.value - report.mean_yhat.value;
  check.expect(regret <= bound, "empirical regret " + fmt(regret) +
                                     " above the bound " + fmt(bound));
  check.note("crossover transitions=" + std::to_string(transitions) +
             ", regret=" + fmt(regret) + " <= bound=" + fmt(bound));
  return check;
}

Check criterion_nonsubmodularity() {
  Check check;
  const sim::SubmodularityDemo demo = sim::nonsubmodularity_demo();
  check.expect(demo.benefit_before < 1e-6,
               "benefit before " + fmt(demo.benefit_before) + " >= 1e-6");
  check.expect(demo.benefit_after > 0.1 * demo.posterior_sd_after,
               "benefit after " + fmt(demo.benefit_after) +
                   " too small relative to sd " + fmt(demo.posterior_sd_after));
  check.expect(demo.benefit_after > demo.benefit_before,
               "marginal benefit did not increase");
  check.note("before=" + fmt(demo.benefit_before) +
             ", after=" + fmt(demo.benefit_after) +
             ", sd=" + fmt(demo.posterior_sd_after));
  return check;
}

Check criterion_determinism(int threads, std::uint64_t seed) {
  Check check;
  auto render_pair = [&]() {
    sim::SimConfig iid;
    iid.source = sim::IidSource{2000, 500};
    iid.policy = PolicyKind::Ei2;
    iid.episodes = 60;
    iid.master_seed = seed;
    iid.threads = threads;

    sim::SimConfig spike;
    spike.source = sim::SpikeSource{1000, 100, 733, 1.0};
    spike.policy = PolicyKind::RandomWor;
    spike.episodes = 1000;
    spike.master_seed = seed;
    spike.threads = threads;

    std::string out = config::report_to_json(sim::run_experiment(iid)).dump_pretty();
    out += config::report_to_json(sim::run_experiment(spike)).dump_pretty();
    return out;
  };
  const std::string first = render_pair();
  const std::string second = render_pair();
  check.expect(first == second, "reports differ between identical runs");
  check.note("bytes=" + std::to_string(first.size()));
  return check;
}

}  // namespace

Summary run_acceptance(const ValidateOptions& options, std::ostream* progress) {
  struct Entry {
    int id;
    const char* name;
    std::function<Check()> body;
  };

  const bool quick = options.quick;
  const int threads = options.threads;
  const std::uint64_t seed = options.master_seed;

  const std::vector<Entry> entries = {
      {1, "gauss-function-brackets", [] { return criterion_gauss_brackets(); }},
      {2, "mei-bound-dominance", [=] { return criterion_mei_dominance(quick); }},
      {3, "conditioning-oracle-equivalence",
       [=] { return criterion_conditioning(quick); }},
      {4, "figure1-anchor", [] { return criterion_figure1_anchor(); }},
      {5, "finite-domain-regret-validation",
       [=] { return criterion_regret_validation(quick, threads, seed); }},
      {6, "spike-equality-case",
       [=] { return criterion_spike_equality(quick, threads, seed); }},
      {7, "iid-trend-check", [=] { return criterion_iid_trend(quick, threads, seed); }},
      {8, "continuous-bound-comparison",
       [=] { return criterion_continuous_comparison(quick, threads, seed); }},
      {9, "non-submodularity-demo", [] { return criterion_nonsubmodularity(); }},
      {10, "determinism", [=] { return criterion_determinism(threads, seed); }},
  };

  Summary summary;
  summary.all_passed = true;
  for (const auto& entry : entries) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    result.id = entry.id;
    result.name = entry.name;
    try {
      Check check = entry.body();
      result.passed = check.ok;
      result.detail = check.detail.str();
    } catch (const std::exception& e) {
      result.passed = false;
      result.detail = std::string("exception: ") + e.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    summary.all_passed = summary.all_passed && result.passed;
    if (progress) {
      *progress << (result.passed ? "PASS" : "FAIL") << "  " << std::setw(2)
                << result.id << "  " << result.name << "  ("
                << std::fixed << std::setprecision(1) << result.seconds
                << "s)  " << result.detail << "\n"
                << std::defaultfloat;
      progress->flush();
    }
    summary.results.push_back(std::move(result));
  }
  return summary;
}

}  // namespace gpfewshot::validate
