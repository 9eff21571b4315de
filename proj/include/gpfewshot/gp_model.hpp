#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

namespace gpfewshot::gp {

/// Finite-domain bandit problem: horizon T and Gaussian prior N(mean, cov)
/// over the N arm values.
struct ProblemInstance {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  long long horizon = 0;

  int n_arms() const { return static_cast<int>(mean.size()); }

  /// Throws DomainError unless cov is square/symmetric/PSD (to rounding
  /// tolerance) and 1 <= T <= N.
  void validate() const;
};

/// One realization of the prior, with its extremes precomputed.
struct SampledFunction {
  Eigen::VectorXd values;
  double f_max = 0.0;
  double f_min = 0.0;
  double f_spread = 0.0;

  static SampledFunction from_values(Eigen::VectorXd v);
};

/// PSD factor L with L L^T ~= sigma, via pivoted Cholesky (LDLT) with
/// escalating diagonal jitter {1e-12, 1e-10, 1e-8} * mean diagonal.
/// Throws NumericalError with diagnostics when all jitters fail.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma);

/// Relative floor below which a posterior variance is treated as exactly
/// zero: 1e-10 * trace(prior covariance) / N.
double variance_floor(const ProblemInstance& instance);

/// Draws prior realizations mean + L z. The factor is computed once at
/// construction so independent episodes can share it; diagonal covariances
/// take an O(N) path with the same distribution.
class PriorSampler {
 public:
  explicit PriorSampler(const ProblemInstance& instance);

  SampledFunction sample(std::mt19937_64& rng) const;
  int n_arms() const { return static_cast<int>(mean_.size()); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;     // empty when diagonal_
  Eigen::VectorXd diag_sd_;    // used when diagonal_
  bool diagonal_ = false;
};

/// One-shot convenience wrapper around PriorSampler.
SampledFunction sample_function(const ProblemInstance& instance,
                                std::uint64_t rng_seed);

/// Exact noise-free Gaussian posterior with dense mean vector and covariance
/// matrix, updated one observation at a time by rank-1 downdates.
class PosteriorState {
 public:
  static PosteriorState prior(const ProblemInstance& instance);

  /// Test/diagnostic constructor from raw parts; no validation.
  PosteriorState(Eigen::VectorXd mean, Eigen::MatrixXd cov, double var_floor);

  /// Returns the posterior after observing value at arm. When the arm's
  /// variance is at or below the floor the state is returned unchanged
  /// if |value - mean[arm]| <= 1e-6, otherwise InconsistencyError: a
  /// noise-free arm cannot produce two different values.
  PosteriorState conditioned(int arm, double value) const;

  /// In-place variant of conditioned().
  void condition_in_place(int arm, double value);

  /// sqrt(max(cov[arm][arm], 0)); tiny negative diagonals from rounding
  /// clamp to zero.
  double posterior_sd(int arm) const;

  int n_arms() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  const std::map<int, double>& observed() const { return observed_; }
  double var_floor() const { return var_floor_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  std::map<int, double> observed_;
  double var_floor_ = 0.0;
  int steps_since_resym_ = 0;
};

/// Posterior tracker for long episodes: maintains the mean and variance
/// vectors plus the conditioning columns, so each update costs O(N t)
/// instead of the O(N^2) full-matrix downdate. Produces the same recursion
/// as PosteriorState (equality is covered by tests). Diagonal priors take
/// an exact O(N) shortcut.
class IncrementalPosterior {
 public:
  explicit IncrementalPosterior(const ProblemInstance& instance);

  void observe(int arm, double value);

  std::span<const double> mean_view() const {
    return {mean_.data(), static_cast<size_t>(mean_.size())};
  }
  std::span<const double> variance_view() const {
    return {variance_.data(), static_cast<size_t>(variance_.size())};
  }
  double var_floor() const { return var_floor_; }
  bool is_observed(int arm) const { return observed_value_.count(arm) != 0; }
  double observed_value(int arm) const { return observed_value_.at(arm); }
  int n_arms() const { return static_cast<int>(mean_.size()); }

 private:
  const Eigen::MatrixXd* sigma_;  // borrowed; instance outlives episodes
  Eigen::VectorXd mean_;
  Eigen::VectorXd variance_;
  Eigen::MatrixXd basis_;  // N x t conditioning columns
  int steps_ = 0;
  double var_floor_ = 0.0;
  bool diagonal_ = false;
  std::map<int, double> observed_value_;
};

/// True when the matrix has no nonzero off-diagonal entry.
bool is_diagonal(const Eigen::MatrixXd& m);

}  // namespace gpfewshot::gp
