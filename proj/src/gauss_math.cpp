#include "gpfewshot/gauss_math.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "gpfewshot/errors.hpp"

namespace gpfewshot::gauss {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kSqrt2Pi = 2.5066282746310005024;

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << name << " must be finite, got " << x;
    throw DomainError(os.str());
  }
}

}  // namespace

double std_normal_pdf(double x) {
  require_finite(x, "x");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_cdf(double x) {
  require_finite(x, "x");
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

double std_normal_ccdf(double tau) {
  require_finite(tau, "tau");
  return 0.5 * std::erfc(tau * kInvSqrt2);
}

Interval ccdf_sandwich(double tau) {
  require_finite(tau, "tau");
  if (tau <= 0.0) throw DomainError("ccdf_sandwich requires tau > 0");
  const double inv = 1.0 / tau;
  const double inv3 = inv * inv * inv;
  const double inv5 = inv3 * inv * inv;
  const double density = std_normal_pdf(tau);
  return {(inv - inv3) * density, (inv - inv3 + 3.0 * inv5) * density};
}

double ei(double tau) {
  require_finite(tau, "tau");
  return std_normal_pdf(tau) - tau * std_normal_ccdf(tau);
}

double ei_scaled(double tau, double mu, double sigma) {
  require_finite(tau, "tau");
  require_finite(mu, "mu");
  require_finite(sigma, "sigma");
  if (sigma < 0.0) throw DomainError("ei_scaled requires sigma >= 0");
  if (sigma == 0.0) return std::max(mu - tau, 0.0);
  return sigma * ei((tau - mu) / sigma);
}

Interval ei_sandwich(double tau) {
  require_finite(tau, "tau");
  if (tau <= 0.0) throw DomainError("ei_sandwich requires tau > 0");
  const double inv2 = 1.0 / (tau * tau);
  const double inv4 = inv2 * inv2;
  const double density = std_normal_pdf(tau);
  return {(inv2 - 3.0 * inv4) * density, inv2 * density};
}

double ei_second_derivative(double tau) { return std_normal_pdf(tau); }

double mei_upper_bound(const MeiInput& input) {
  const Eigen::Index n = input.mean.size();
  require_finite(input.tau, "tau");
  if (n < 2) {
    throw DomainError("mei_upper_bound requires N >= 2; use ei_scaled for a single arm");
  }
  if (input.cov.rows() != n || input.cov.cols() != n) {
    throw DomainError("mei_upper_bound: covariance shape does not match mean length");
  }

  const double scale = input.cov.cwiseAbs().maxCoeff();
  if (!(input.cov - input.cov.transpose()).isZero(1e-10 * std::max(scale, 1.0))) {
    throw DomainError("mei_upper_bound: covariance not symmetric");
  }
  if (input.cov.diagonal().minCoeff() < 0.0) {
    throw DomainError("mei_upper_bound: covariance has a negative diagonal entry");
  }
  // Rounding during conditioning routinely produces eigenvalues around
  // -1e-12 * scale; reject only beyond that tolerance.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(input.cov, Eigen::EigenvaluesOnly);
  const double tol = 1e-8 * (input.cov.trace() / static_cast<double>(n));
  if (es.eigenvalues().minCoeff() < -std::max(tol, 0.0)) {
    std::ostringstream os;
    os << "mei_upper_bound: covariance not PSD (min eigenvalue "
       << es.eigenvalues().minCoeff() << ")";
    throw DomainError(os.str());
  }

  const double log_n = std::log(static_cast<double>(n));
  double shifted_ucb = -std::numeric_limits<double>::infinity();
  double max_sd = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sd = std::sqrt(std::max(input.cov(i, i), 0.0));
    // Keep the (m - tau) grouping so that shifting mean by tau is exact.
    shifted_ucb = std::max(shifted_ucb,
                           (input.mean(i) - input.tau) + sd * std::sqrt(2.0 * log_n));
    max_sd = std::max(max_sd, sd);
  }
  return std::max(shifted_ucb, 0.0) + max_sd / (2.0 * kSqrt2Pi * log_n);
}

}  // namespace gpfewshot::gauss
