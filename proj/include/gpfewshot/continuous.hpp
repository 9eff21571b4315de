#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gpfewshot/gp_model.hpp"
#include "gpfewshot/policies.hpp"

namespace gpfewshot::continuous {

enum class KernelKind { SquaredExponential, Exponential };

/// Wire names: "sqexp", "exp".
KernelKind kernel_from_string(const std::string& name);
std::string to_string(KernelKind kind);

/// Stationary kernel on the unit cube [0,1]^D with k(x,x) = variance.
struct KernelSpec {
  KernelKind kind = KernelKind::SquaredExponential;
  double length_scale = 1.0;
  double variance = 1.0;
  int dim = 1;

  void validate() const;
};

/// Kernel value; points must lie inside the unit cube.
double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// Certified constant L with |k(x,x) - k(x,y)| <= L * ||x-y||_inf:
///   exponential:          variance * D / length_scale
///   squared exponential:  variance * sqrt(D) / (length_scale * sqrt(e)).
double lipschitz_constant(const KernelSpec& spec);

/// Continuous problem: kernel (zero mean) plus evaluation budget; the domain
/// is always the unit cube, rescaling being folded into the Lipschitz
/// constant.
struct ContinuousInstance {
  KernelSpec kernel;
  long long horizon = 0;

  void validate() const;
};

/// Dense-matrix budget for the reduced finite instance.
inline constexpr int kGridBudget = 20000;

struct GridInstance {
  gp::ProblemInstance instance;
  std::vector<std::vector<double>> points;  // cell centers, one per arm
  long long sides = 0;                      // segments per coordinate
};

/// Reduces a continuous instance to a finite one on the uniform grid with
/// ceil((L / log L) * T^(1/D)) segments per side, points at cell centers.
/// Deterministic: identical inputs give bit-identical covariance.
GridInstance build_grid_instance(const ContinuousInstance& cont);

/// Draws a single GP sample jointly over the coarse grid and a 4x-per-side
/// refinement grid. In one dimension both grids embed in a common uniform
/// lattice and sampling runs through an FFT circulant embedding; higher
/// dimensions factor the joint covariance densely under a budget guard.
class JointGridSampler {
 public:
  explicit JointGridSampler(const ContinuousInstance& cont);

  struct Draw {
    Eigen::VectorXd coarse;  // values on the grid-instance arms
    double joint_max = 0.0;  // max over coarse and refinement points
    double joint_min = 0.0;
  };
  Draw sample(std::mt19937_64& rng) const;

  const GridInstance& grid() const { return grid_; }

 private:
  Draw sample_circulant(std::mt19937_64& rng) const;
  Draw sample_dense(std::mt19937_64& rng) const;

  GridInstance grid_;
  long long fine_sides_ = 0;
  // 1-D circulant path
  bool use_circulant_ = false;
  std::vector<double> eigenvalue_roots_;  // sqrt(lambda_k / M)
  long long lattice_size_ = 0;            // union lattice points (8S)
  // dense path
  Eigen::MatrixXd joint_factor_;
  long long joint_points_ = 0;
};

struct ContinuousEpisodeResult {
  policies::Trajectory trajectory;
  double sup_estimate = 0.0;  // stand-in for the domain supremum
  double inf_estimate = 0.0;
  double coarse_max = 0.0;    // max of the sample over the coarse grid
};

/// Builds the grid instance, draws the joint sample, runs the finite-domain
/// episode on the coarse part and reports the refinement extremes.
ContinuousEpisodeResult continuous_episode(const ContinuousInstance& cont,
                                           policies::PolicyKind kind,
                                           std::uint64_t seed);

/// Same loop on a pre-built sampler, for experiment batches.
ContinuousEpisodeResult run_continuous_episode(const JointGridSampler& sampler,
                                               long long horizon,
                                               policies::PolicyKind kind,
                                               std::mt19937_64& rng,
                                               const policies::EpisodeOptions& opts = {});

/// Radix-2 complex FFT, in place; size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace gpfewshot::continuous
