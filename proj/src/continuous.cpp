#include "gpfewshot/continuous.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gpfewshot/bounds.hpp"
#include "gpfewshot/errors.hpp"

namespace gpfewshot::continuous {

namespace {

// Kernel as a function of distance; r2 is ||x-y||_2^2 and r1 is ||x-y||_1.
// In one dimension the two coincide.
double radial_eval(const KernelSpec& spec, double r2_squared, double r1) {
  switch (spec.kind) {
    case KernelKind::SquaredExponential:
      return spec.variance *
             std::exp(-r2_squared / (2.0 * spec.length_scale * spec.length_scale));
    case KernelKind::Exponential:
      return spec.variance * std::exp(-r1 / spec.length_scale);
  }
  throw DomainError("unknown kernel kind");
}

double radial_eval_1d(const KernelSpec& spec, double distance) {
  return radial_eval(spec, distance * distance, distance);
}

void check_in_cube(const KernelSpec& spec, std::span<const double> p,
                   const char* name) {
  if (static_cast<int>(p.size()) != spec.dim) {
    throw DomainError("point dimension does not match kernel dimension");
  }
  for (double c : p) {
    if (!(c >= 0.0 && c <= 1.0)) {
      std::ostringstream os;
      os << name << " lies outside the unit cube (coordinate " << c << ")";
      throw DomainError(os.str());
    }
  }
}

long long checked_grid_count(long long sides, int dim) {
  long long count = 1;
  for (int d = 0; d < dim; ++d) {
    if (count > kGridBudget / sides + 1) return kGridBudget + 1;
    count *= sides;
    if (count > kGridBudget) return count;
  }
  return count;
}

std::vector<std::vector<double>> cell_centers(long long sides, int dim) {
  const long long count = checked_grid_count(sides, dim);
  std::vector<std::vector<double>> points;
  points.reserve(count);
  std::vector<long long> index(dim, 0);
  for (long long flat = 0; flat < count; ++flat) {
    std::vector<double> p(dim);
    for (int d = 0; d < dim; ++d) {
      p[d] = (static_cast<double>(index[d]) + 0.5) / static_cast<double>(sides);
    }
    points.push_back(std::move(p));
    for (int d = dim - 1; d >= 0; --d) {
      if (++index[d] < sides) break;
      index[d] = 0;
    }
  }
  return points;
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec,
                              const std::vector<std::vector<double>>& pts) {
  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = spec.variance;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double r2 = 0.0, r1 = 0.0;
      for (int d = 0; d < spec.dim; ++d) {
        const double diff = pts[i][d] - pts[j][d];
        r2 += diff * diff;
        r1 += std::abs(diff);
      }
      const double value = radial_eval(spec, r2, r1);
      k(i, j) = value;
      k(j, i) = value;
    }
  }
  return k;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

constexpr long long kJointDenseBudget = 5000;

}  // namespace

KernelKind kernel_from_string(const std::string& name) {
  if (name == "sqexp") return KernelKind::SquaredExponential;
  if (name == "exp") return KernelKind::Exponential;
  throw DomainError("unknown kernel kind: " + name);
}

std::string to_string(KernelKind kind) {
  return kind == KernelKind::SquaredExponential ? "sqexp" : "exp";
}

void KernelSpec::validate() const {
  if (dim < 1) throw DomainError("kernel dimension must be >= 1");
  if (!(length_scale > 0.0) || !std::isfinite(length_scale)) {
    throw DomainError("length scale must be positive and finite");
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw DomainError("kernel variance must be positive and finite");
  }
}

double kernel_eval(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  spec.validate();
  check_in_cube(spec, x, "x");
  check_in_cube(spec, y, "y");
  double r2 = 0.0, r1 = 0.0;
  for (int d = 0; d < spec.dim; ++d) {
    const double diff = x[d] - y[d];
    r2 += diff * diff;
    r1 += std::abs(diff);
  }
  return radial_eval(spec, r2, r1);
}

double lipschitz_constant(const KernelSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::Exponential:
      // 1 - e^{-u} <= u and ||.||_1 <= D ||.||_inf.
      return spec.variance * spec.dim / spec.length_scale;
    case KernelKind::SquaredExponential:
      // Radial derivative peaks at r = length_scale; ||.||_2 <= sqrt(D) ||.||_inf.
      return spec.variance * std::sqrt(static_cast<double>(spec.dim)) /
             (spec.length_scale * std::sqrt(std::numbers::e));
  }
  throw DomainError("unknown kernel kind");
}

void ContinuousInstance::validate() const {
  kernel.validate();
  if (horizon < 1) throw DomainError("horizon must be >= 1");
}

GridInstance build_grid_instance(const ContinuousInstance& cont) {
  cont.validate();
  const double lipschitz = lipschitz_constant(cont.kernel);
  const double sides_real = bounds::grid_sides(cont.kernel.dim,
                                               static_cast<double>(cont.horizon),
                                               lipschitz);
  if (sides_real > static_cast<double>(kGridBudget)) {
    std::ostringstream os;
    os << "grid needs " << sides_real << " segments per side, beyond the dense "
       << "budget of " << kGridBudget << " arms; reduce T or increase the "
       << "length scale";
    throw ResourceError(os.str());
  }
  const long long sides = static_cast<long long>(sides_real);
  const long long count = checked_grid_count(sides, cont.kernel.dim);
  if (count > kGridBudget) {
    std::ostringstream os;
    os << "grid has " << sides << "^" << cont.kernel.dim
       << " arms, beyond the dense budget of " << kGridBudget
       << "; reduce T or increase the length scale";
    throw ResourceError(os.str());
  }

  GridInstance grid;
  grid.sides = sides;
  grid.points = cell_centers(sides, cont.kernel.dim);
  grid.instance.mean = Eigen::VectorXd::Zero(count);
  grid.instance.covariance = kernel_matrix(cont.kernel, grid.points);
  grid.instance.horizon = cont.horizon;
  return grid;
}

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw DomainError("fft size must be a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * std::numbers::pi / double(len);
    const std::complex<double> step(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
}

JointGridSampler::JointGridSampler(const ContinuousInstance& cont)
    : grid_(build_grid_instance(cont)) {
  fine_sides_ = 4 * grid_.sides;
  const KernelSpec& kernel = cont.kernel;

  if (kernel.dim == 1) {
    use_circulant_ = true;
    // Coarse centers (i+0.5)/S and fine centers (j+0.5)/(4S) both sit on the
    // lattice k/(8S): coarse at k = 8i+4, fine at odd k.
    lattice_size_ = 8 * grid_.sides;
    const double spacing = 1.0 / static_cast<double>(lattice_size_);
    const std::size_t embed =
        next_pow2(2 * static_cast<std::size_t>(lattice_size_ - 1));
    std::vector<std::complex<double>> row(embed);
    for (std::size_t j = 0; j < embed; ++j) {
      const std::size_t lag = std::min(j, embed - j);
      row[j] = radial_eval_1d(kernel, static_cast<double>(lag) * spacing);
    }
    fft_inplace(row, false);
    double max_eig = 0.0, min_eig = 0.0;
    for (const auto& v : row) {
      max_eig = std::max(max_eig, v.real());
      min_eig = std::min(min_eig, v.real());
    }
    if (min_eig < -1e-8 * max_eig) {
      std::ostringstream os;
      os << "circulant embedding of the kernel is not PSD (min eigenvalue "
         << min_eig << "); cannot sample the joint refinement";
      throw NumericalError(os.str());
    }
    eigenvalue_roots_.resize(embed);
    for (std::size_t j = 0; j < embed; ++j) {
      eigenvalue_roots_[j] =
          std::sqrt(std::max(row[j].real(), 0.0) / static_cast<double>(embed));
    }
  } else {
    const long long fine_count = checked_grid_count(fine_sides_, kernel.dim);
    joint_points_ = static_cast<long long>(grid_.points.size()) + fine_count;
    if (fine_count > kGridBudget || joint_points_ > kJointDenseBudget) {
      std::ostringstream os;
      os << "joint refinement sample needs " << joint_points_
         << " points, beyond the dense budget of " << kJointDenseBudget
         << "; reduce T or the dimension";
      throw ResourceError(os.str());
    }
    std::vector<std::vector<double>> all = grid_.points;
    std::vector<std::vector<double>> fine = cell_centers(fine_sides_, kernel.dim);
    all.insert(all.end(), fine.begin(), fine.end());
    joint_factor_ = gp::psd_factor(kernel_matrix(kernel, all));
  }
}

JointGridSampler::Draw JointGridSampler::sample_circulant(
    std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t embed = eigenvalue_roots_.size();
  std::vector<std::complex<double>> spectrum(embed);
  for (std::size_t k = 0; k < embed; ++k) {
    const double a = normal(rng);
    const double b = normal(rng);
    spectrum[k] = eigenvalue_roots_[k] * std::complex<double>(a, b);
  }
  // Unnormalized inverse transform of sqrt(lambda/M) * w gives two
  // independent real fields with the target covariance; keep the real part.
  fft_inplace(spectrum, true);

  Draw draw;
  const long long n_coarse = static_cast<long long>(grid_.points.size());
  draw.coarse.resize(n_coarse);
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (long long i = 0; i < n_coarse; ++i) {
    const double v = spectrum[static_cast<std::size_t>(8 * i + 4)].real();
    draw.coarse(i) = v;
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  const long long n_fine = fine_sides_;
  for (long long j = 0; j < n_fine; ++j) {
    const double v = spectrum[static_cast<std::size_t>(2 * j + 1)].real();
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  draw.joint_max = hi;
  draw.joint_min = lo;
  return draw;
}

JointGridSampler::Draw JointGridSampler::sample_dense(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(joint_points_);
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  const Eigen::VectorXd values = joint_factor_ * z;
  Draw draw;
  const long long n_coarse = static_cast<long long>(grid_.points.size());
  draw.coarse = values.head(n_coarse);
  draw.joint_max = values.maxCoeff();
  draw.joint_min = values.minCoeff();
  return draw;
}

JointGridSampler::Draw JointGridSampler::sample(std::mt19937_64& rng) const {
  return use_circulant_ ? sample_circulant(rng) : sample_dense(rng);
}

ContinuousEpisodeResult run_continuous_episode(
    const JointGridSampler& sampler, long long horizon,
    policies::PolicyKind kind, std::mt19937_64& rng,
    const policies::EpisodeOptions& opts) {
  const JointGridSampler::Draw draw = sampler.sample(rng);
  gp::SampledFunction sample = gp::SampledFunction::from_values(draw.coarse);

  gp::ProblemInstance instance = sampler.grid().instance;
  instance.horizon = horizon;
  policies::EpisodeResult episode =
      policies::run_episode_on_sample(instance, sample, kind, rng, opts);

  ContinuousEpisodeResult result;
  result.trajectory = std::move(episode.trajectory);
  result.sup_estimate = draw.joint_max;
  result.inf_estimate = draw.joint_min;
  result.coarse_max = sample.f_max;
  return result;
}

ContinuousEpisodeResult continuous_episode(const ContinuousInstance& cont,
                                           policies::PolicyKind kind,
                                           std::uint64_t seed) {
  JointGridSampler sampler(cont);
  std::mt19937_64 rng(seed);
  return run_continuous_episode(sampler, cont.horizon, kind, rng);
}

}  // namespace gpfewshot::continuous
