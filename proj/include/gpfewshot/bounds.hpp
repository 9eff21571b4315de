#pragma once

#include <cstdint>
#include <string>

namespace gpfewshot::bounds {

/// Identifiers used on the wire (JSON reports, CLI --kind values map to these).
enum class BoundKind {
  Thm1Spread,
  Cor1Normreg,
  LowerIid,
  LowerPriorIndependent,
  Thm2Continuous,
  Grunewalder,
};

std::string to_string(BoundKind kind);

/// One evaluated bound together with the inputs it was computed from.
/// Unused inputs stay at zero and are omitted from serialization.
struct BoundReport {
  BoundKind kind;
  double n_arms = 0.0;
  double horizon = 0.0;
  int dim = 0;
  double lipschitz = 0.0;
  double sigma_cap = 0.0;
  double value = 0.0;
};

/// Closed-form ceiling on the normalized extremization regret
/// 1 - E[spread of observations] / E[spread of the function],
/// valid for N >= T >= 500. Natural logs throughout.
double extremization_regret_bound(double n_arms, double horizon);

/// Same expression applied to the maximization regret for zero-mean priors.
double maximization_normreg_bound(double n_arms, double horizon);

/// Asymptotic envelope 1 - sqrt(log T / log N), for N >= T >= 2.
double asymptotic_normreg(double n_arms, double horizon);

/// Envelope on the evaluations needed to reach a target normalized regret:
/// N^((1 - target)^2). Accepts target in [0, 1].
double required_evaluations_envelope(double n_arms, double target_normreg);

/// Floor on the normalized regret of the optimal policy for the iid instance
/// (zero mean, identity covariance): 1 - sqrt(log T / log N).
double iid_lower_bound(double n_arms, double horizon);

/// Floor 1 - T/N attained against any policy that ignores the prior.
double prior_independent_lower_bound(double n_arms, double horizon);

/// Regret ceiling for the a-priori grid policy on the unit cube:
/// sqrt(2 L / floor(T^(1/D))) * (2 sqrt(log 2T) + 15 sqrt(D)).
double grunewalder_bound(int dim, double horizon, double lipschitz);

/// Number of segments per side of the unit-cube grid:
/// ceil((L / log L) * T^(1/D)). Requires L > e. Returned as a double because
/// sweeps push it beyond 2^53; integral exactly whenever it fits.
double grid_sides(int dim, double horizon, double lipschitz);

/// Two-term regret ceiling for grid pre-selection followed by finite-domain
/// optimization, with variance cap sigma. Valid for L > e and T >= 500
/// (the grid then automatically satisfies S^D >= T).
double continuous_regret_bound(int dim, double horizon, double lipschitz,
                               double sigma_cap);

/// Same expression without the T >= 500 validity guard; used to regenerate
/// figure curves over their full caption ranges. Still rejects parameters
/// where the formula itself is undefined (negative log arguments).
double continuous_regret_formula(int dim, double horizon, double lipschitz,
                                 double sigma_cap);

/// Smallest integer T in [500, N] with normreg bound <= target, found by
/// bisection; +infinity when no 64-bit T attains the target.
double required_horizon_bisect(double n_arms, double target_normreg);

}  // namespace gpfewshot::bounds
