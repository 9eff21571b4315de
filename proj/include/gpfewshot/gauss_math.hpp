#pragma once

#include <Eigen/Core>

namespace gpfewshot::gauss {

/// A two-sided closed-form bracket around a scalar quantity.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Standard normal density.
double std_normal_pdf(double x);

/// Standard normal cumulative distribution function.
double std_normal_cdf(double x);

/// Upper tail P(X > tau), evaluated through erfc so that the tail keeps full
/// relative accuracy instead of cancelling against 1.
double std_normal_ccdf(double tau);

/// Closed-form tail bracket ((1/tau - 1/tau^3) * pdf, (1/tau - 1/tau^3 +
/// 3/tau^5) * pdf), valid for tau > 0.
Interval ccdf_sandwich(double tau);

/// Expected improvement of a standard normal over threshold tau:
/// ei(tau) = pdf(tau) - tau * ccdf(tau). Positive and strictly decreasing.
double ei(double tau);

/// ei for a N(mu, sigma^2) variable: sigma * ei((tau - mu) / sigma).
/// sigma == 0 takes the pointwise limit max(mu - tau, 0), which is the
/// expected improvement of a deterministic value.
double ei_scaled(double tau, double mu, double sigma);

/// Closed-form bracket ((1/tau^2 - 3/tau^4) * pdf, pdf / tau^2) around
/// ei(tau), valid for tau > 0.
Interval ei_sandwich(double tau);

/// Second derivative of ei; equals the standard normal density, so it
/// certifies convexity.
double ei_second_derivative(double tau);

/// Mean/covariance/threshold triple for the maximum of a Gaussian vector.
struct MeiInput {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  double tau = 0.0;
};

/// Upper bound on E[max{max_n F_n - tau, 0}] for F ~ N(mean, cov):
///   max{max_n ((m_n - tau) + sqrt(c_nn * 2 log N)), 0}
///     + max_n sqrt(c_nn) / (2 sqrt(2 pi) log N).
/// Requires N >= 2 (log N divides) and cov PSD up to rounding tolerance.
double mei_upper_bound(const MeiInput& input);

}  // namespace gpfewshot::gauss
