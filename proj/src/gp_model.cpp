#include "gpfewshot/gp_model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "gpfewshot/errors.hpp"

namespace gpfewshot::gp {

namespace {

constexpr double kReobservationTolerance = 1e-6;
constexpr int kResymmetrizeEvery = 64;

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

void ProblemInstance::validate() const {
  const Eigen::Index n = mean.size();
  if (n < 1) throw DomainError("instance needs at least one arm");
  if (covariance.rows() != n || covariance.cols() != n) {
    throw DomainError("covariance shape does not match mean length");
  }
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  if (horizon > n) throw DomainError("horizon must not exceed the number of arms");
  const double scale = std::max(covariance.cwiseAbs().maxCoeff(), 1.0);
  if (!(covariance - covariance.transpose()).isZero(1e-10 * scale)) {
    throw DomainError("covariance not symmetric");
  }
  if (covariance.diagonal().minCoeff() < 0.0) {
    throw DomainError("covariance has a negative diagonal entry");
  }
  if (!mean.allFinite() || !covariance.allFinite()) {
    throw DomainError("instance contains non-finite entries");
  }
}

SampledFunction SampledFunction::from_values(Eigen::VectorXd v) {
  SampledFunction f;
  f.f_max = v.maxCoeff();
  f.f_min = v.minCoeff();
  f.f_spread = f.f_max - f.f_min;
  f.values = std::move(v);
  return f;
}

Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& sigma) {
  const Eigen::Index n = sigma.rows();
  const double mean_diag = sigma.trace() / static_cast<double>(n);
  const double neg_tol = 1e-8 * std::max(mean_diag, 0.0);
  const double jitters[] = {0.0, 1e-12, 1e-10, 1e-8};

  double worst_pivot = 0.0;
  for (double jitter_scale : jitters) {
    Eigen::MatrixXd work = sigma;
    if (jitter_scale > 0.0) {
      work.diagonal().array() += jitter_scale * std::max(mean_diag, 1e-300);
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(work);
    if (ldlt.info() != Eigen::Success) continue;
    Eigen::VectorXd d = ldlt.vectorD();
    worst_pivot = d.minCoeff();
    if (worst_pivot < -neg_tol) continue;
    d = d.cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd factor = Eigen::MatrixXd(ldlt.matrixL()) * d.asDiagonal();
    factor = ldlt.transpositionsP().transpose() * factor;
    return factor;
  }
  std::ostringstream os;
  os << "covariance factorization failed: most negative pivot " << worst_pivot
     << " after jitter up to 1e-8 * mean diagonal (" << mean_diag << ")";
  throw NumericalError(os.str());
}

double variance_floor(const ProblemInstance& instance) {
  return 1e-10 * instance.covariance.trace() /
         static_cast<double>(instance.n_arms());
}

PriorSampler::PriorSampler(const ProblemInstance& instance) : mean_(instance.mean) {
  instance.validate();
  if (is_diagonal(instance.covariance)) {
    diagonal_ = true;
    diag_sd_ = instance.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  } else {
    factor_ = psd_factor(instance.covariance);
  }
}

SampledFunction PriorSampler::sample(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  if (diagonal_) {
    return SampledFunction::from_values(mean_ + diag_sd_.cwiseProduct(z));
  }
  return SampledFunction::from_values(mean_ + factor_ * z);
}

SampledFunction sample_function(const ProblemInstance& instance,
                                std::uint64_t rng_seed) {
  PriorSampler sampler(instance);
  std::uint64_t state = rng_seed;
  const std::uint64_t a = splitmix64(state);
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::mt19937_64 rng(seq);
  return sampler.sample(rng);
}

PosteriorState PosteriorState::prior(const ProblemInstance& instance) {
  instance.validate();
  return PosteriorState(instance.mean, instance.covariance, variance_floor(instance));
}

PosteriorState::PosteriorState(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                               double var_floor)
    : mean_(std::move(mean)), cov_(std::move(cov)), var_floor_(var_floor) {}

PosteriorState PosteriorState::conditioned(int arm, double value) const {
  PosteriorState next = *this;
  next.condition_in_place(arm, value);
  return next;
}

void PosteriorState::condition_in_place(int arm, double value) {
  if (arm < 0 || arm >= n_arms()) throw DomainError("arm index out of range");
  if (!std::isfinite(value)) throw DomainError("observation must be finite");

  const double pivot = cov_(arm, arm);
  if (pivot <= var_floor_) {
    // Deterministic arm: the value is already pinned down.
    if (std::abs(value - mean_(arm)) > kReobservationTolerance) {
      std::ostringstream os;
      os << "arm " << arm << " is deterministic at " << mean_(arm)
         << " but was observed as " << value
         << "; noise-free observations cannot disagree";
      throw InconsistencyError(os.str());
    }
    observed_.emplace(arm, value);
    return;
  }

  const Eigen::VectorXd column = cov_.col(arm);
  mean_ += column * ((value - mean_(arm)) / pivot);
  cov_ -= (column / pivot) * column.transpose();
  observed_[arm] = value;

  if (++steps_since_resym_ >= kResymmetrizeEvery) {
    cov_ = ((cov_ + cov_.transpose()) * 0.5).eval();
    steps_since_resym_ = 0;
  }
}

double PosteriorState::posterior_sd(int arm) const {
  if (arm < 0 || arm >= n_arms()) throw DomainError("arm index out of range");
  return std::sqrt(std::max(cov_(arm, arm), 0.0));
}

IncrementalPosterior::IncrementalPosterior(const ProblemInstance& instance)
    : sigma_(&instance.covariance),
      mean_(instance.mean),
      variance_(instance.covariance.diagonal()),
      var_floor_(variance_floor(instance)),
      diagonal_(is_diagonal(instance.covariance)) {
  if (!diagonal_) {
    basis_.resize(instance.n_arms(),
                  std::min<long long>(instance.horizon, instance.n_arms()));
  }
}

void IncrementalPosterior::observe(int arm, double value) {
  if (arm < 0 || arm >= n_arms()) throw DomainError("arm index out of range");
  auto it = observed_value_.find(arm);
  if (it != observed_value_.end()) {
    if (std::abs(value - it->second) > kReobservationTolerance) {
      std::ostringstream os;
      os << "arm " << arm << " re-observed as " << value << " but recorded as "
         << it->second;
      throw InconsistencyError(os.str());
    }
    return;
  }

  const double pivot = variance_(arm);
  if (pivot <= var_floor_) {
    if (std::abs(value - mean_(arm)) > kReobservationTolerance) {
      std::ostringstream os;
      os << "arm " << arm << " is deterministic at " << mean_(arm)
         << " but was observed as " << value;
      throw InconsistencyError(os.str());
    }
    observed_value_.emplace(arm, value);
    return;
  }

  if (diagonal_) {
    // Off-diagonal prior entries are exactly zero, so the update touches
    // only the observed arm.
    mean_(arm) = value;
    variance_(arm) = 0.0;
  } else {
    Eigen::VectorXd column = sigma_->col(arm);
    if (steps_ > 0) {
      column.noalias() -=
          basis_.leftCols(steps_) * basis_.row(arm).head(steps_).transpose();
    }
    mean_ += column * ((value - mean_(arm)) / pivot);
    const Eigen::VectorXd unit = column / std::sqrt(pivot);
    variance_ -= unit.cwiseProduct(unit);
    if (steps_ >= basis_.cols()) {
      basis_.conservativeResize(Eigen::NoChange, basis_.cols() * 2 + 1);
    }
    basis_.col(steps_) = unit;
    ++steps_;
  }
  observed_value_.emplace(arm, value);
}

}  // namespace gpfewshot::gp
