#include "gpfewshot/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gpfewshot/errors.hpp"

namespace gpfewshot::bounds {

namespace {

const double kHalfInvSqrtPi = 0.5 / std::sqrt(M_PI);

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    std::ostringstream os;
    os << name << " must be finite";
    throw DomainError(os.str());
  }
}

// sqrt((log T - log(3 log^1.5 T)) / log N), shared by the finite-domain
// bounds and the second term of the continuous bound.
double log_ratio_factor(double log_n, double log_t) {
  const double adjusted = log_t - std::log(3.0 * std::pow(log_t, 1.5));
  return std::sqrt(adjusted / log_n);
}

double exploration_factor(double horizon) {
  return 1.0 - std::pow(horizon, -kHalfInvSqrtPi);
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::Thm1Spread: return "thm1_spread";
    case BoundKind::Cor1Normreg: return "cor1_normreg";
    case BoundKind::LowerIid: return "lower_iid";
    case BoundKind::LowerPriorIndependent: return "lower_prior_independent";
    case BoundKind::Thm2Continuous: return "thm2_continuous";
    case BoundKind::Grunewalder: return "grunewalder";
  }
  return "unknown";
}

double extremization_regret_bound(double n_arms, double horizon) {
  require_finite(n_arms, "n_arms");
  require_finite(horizon, "horizon");
  require(horizon >= 500.0, "extremization regret bound requires T >= 500");
  require(n_arms >= horizon, "extremization regret bound requires N >= T");
  return 1.0 - exploration_factor(horizon) *
                   log_ratio_factor(std::log(n_arms), std::log(horizon));
}

double maximization_normreg_bound(double n_arms, double horizon) {
  return extremization_regret_bound(n_arms, horizon);
}

double asymptotic_normreg(double n_arms, double horizon) {
  require_finite(n_arms, "n_arms");
  require_finite(horizon, "horizon");
  require(n_arms >= 2.0, "asymptotic normreg requires N >= 2");
  require(horizon >= 2.0 && horizon <= n_arms,
          "asymptotic normreg requires N >= T >= 2");
  return 1.0 - std::sqrt(std::log(horizon)) / std::sqrt(std::log(n_arms));
}

double required_evaluations_envelope(double n_arms, double target_normreg) {
  require_finite(n_arms, "n_arms");
  require_finite(target_normreg, "target_normreg");
  require(n_arms >= 2.0, "required evaluations envelope requires N >= 2");
  require(target_normreg >= 0.0 && target_normreg <= 1.0,
          "target normreg must lie in [0, 1]");
  const double exponent = (1.0 - target_normreg) * (1.0 - target_normreg);
  return std::pow(n_arms, exponent);
}

double iid_lower_bound(double n_arms, double horizon) {
  return asymptotic_normreg(n_arms, horizon);
}

double prior_independent_lower_bound(double n_arms, double horizon) {
  require_finite(n_arms, "n_arms");
  require_finite(horizon, "horizon");
  require(n_arms >= 1.0 && horizon >= 1.0, "N and T must be positive");
  require(horizon <= n_arms, "prior-independent lower bound requires T <= N");
  return 1.0 - horizon / n_arms;
}

double grunewalder_bound(int dim, double horizon, double lipschitz) {
  require_finite(horizon, "horizon");
  require_finite(lipschitz, "lipschitz");
  require(dim >= 1, "dimension must be >= 1");
  require(horizon >= 1.0, "horizon must be >= 1");
  require(lipschitz > 0.0, "Lipschitz constant must be positive");
  const double segments = std::floor(std::pow(horizon, 1.0 / dim));
  require(segments >= 1.0, "floor(T^(1/D)) must be >= 1");
  return std::sqrt(2.0 * lipschitz / segments) *
         (2.0 * std::sqrt(std::log(2.0 * horizon)) + 15.0 * std::sqrt(double(dim)));
}

double grid_sides(int dim, double horizon, double lipschitz) {
  require_finite(horizon, "horizon");
  require_finite(lipschitz, "lipschitz");
  require(dim >= 1, "dimension must be >= 1");
  require(horizon >= 1.0, "horizon must be >= 1");
  require(lipschitz > std::exp(1.0), "grid sizing requires L > e");
  return std::ceil(lipschitz / std::log(lipschitz) * std::pow(horizon, 1.0 / dim));
}

double continuous_regret_formula(int dim, double horizon, double lipschitz,
                                 double sigma_cap) {
  require_finite(sigma_cap, "sigma");
  require(sigma_cap > 0.0, "variance cap sigma must be positive");
  const double sides = grid_sides(dim, horizon, lipschitz);
  const double log_sides = std::log(sides);
  // log(2 S^D) in log space; S^D overflows a double in wide sweeps.
  const double log_grid_count = std::log(2.0) + dim * log_sides;
  const double log_t = std::log(horizon);
  const double tail = log_t - std::log(3.0 * std::pow(log_t, 1.5));
  require(tail >= 0.0,
          "continuous bound undefined: T < 3 log^1.5 T makes the log term negative");
  const double discretization =
      std::sqrt(2.0 * std::log(lipschitz) / std::pow(horizon, 1.0 / dim)) *
      (2.0 * std::sqrt(log_grid_count) + 15.0 * std::sqrt(double(dim)));
  const double optimization =
      std::sqrt(2.0) * sigma_cap *
      (std::sqrt(dim * log_sides) - exploration_factor(horizon) * std::sqrt(tail));
  return discretization + optimization;
}

double continuous_regret_bound(int dim, double horizon, double lipschitz,
                               double sigma_cap) {
  require(horizon >= 500.0, "continuous regret bound requires T >= 500");
  // S >= (L / log L) T^(1/D) with L > e makes S^D >= T automatic; verify in
  // log space anyway so a violation surfaces as a domain error, not NaN.
  const double sides = grid_sides(dim, horizon, lipschitz);
  require(dim * std::log(sides) >= std::log(horizon) - 1e-12,
          "continuous regret bound requires the grid count S^D >= T");
  return continuous_regret_formula(dim, horizon, lipschitz, sigma_cap);
}

double required_horizon_bisect(double n_arms, double target_normreg) {
  require_finite(n_arms, "n_arms");
  require_finite(target_normreg, "target_normreg");
  require(n_arms >= 500.0, "bisection requires N >= 500");
  require(target_normreg >= 0.0 && target_normreg <= 1.0,
          "target normreg must lie in [0, 1]");

  const std::uint64_t lo_start = 500;
  const std::uint64_t hi_cap = std::uint64_t{1} << 62;
  const std::uint64_t hi_start =
      n_arms >= static_cast<double>(hi_cap) ? hi_cap : static_cast<std::uint64_t>(n_arms);

  auto bound_at = [&](std::uint64_t t) {
    return extremization_regret_bound(n_arms, static_cast<double>(t));
  };
  if (bound_at(lo_start) <= target_normreg) return static_cast<double>(lo_start);
  if (bound_at(hi_start) > target_normreg) {
    return std::numeric_limits<double>::infinity();
  }
  // Invariant: bound(lo) > target >= bound(hi); the bound is non-increasing
  // in T, so the answer is the smallest T with bound(T) <= target.
  std::uint64_t lo = lo_start, hi = hi_start;
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (bound_at(mid) <= target_normreg) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return static_cast<double>(hi);
}

}  // namespace gpfewshot::bounds
