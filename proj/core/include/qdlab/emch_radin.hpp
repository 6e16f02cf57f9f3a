#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdlab/ensembles.hpp"

namespace qdlab {

enum class Summability { kL1, kL2Only, kNone };

const char* summability_name(Summability s);

/// Translation-invariant pair kernel eps(n) >= 0 on Z^d with eps(0) = 0.
/// The coupling amplitude is kept outside the kernel (see
/// DisorderedEmchModel::beta_coupling).
class InteractionKernel {
 public:
  /// eps = 1 on the 2d nearest neighbours, 0 elsewhere.
  static InteractionKernel nearest_neighbor(int dimension);
  /// eps(n) = |n|^-exponent (Euclidean norm).
  static InteractionKernel power_law(int dimension, double exponent);
  /// eps(n) = exp(-rate |n|).
  static InteractionKernel exponential(int dimension, double rate);

  int dimension() const { return dimension_; }
  bool is_nearest_neighbor() const { return nearest_neighbor_; }
  int coordination() const { return 2 * dimension_; }
  const std::string& description() const { return description_; }
  Summability summability() const { return summability_; }

  double operator()(std::span<const int> displacement) const;

 private:
  InteractionKernel(int dimension, std::string description, bool nearest_neighbor,
                    std::function<double(double)> radial);

  int dimension_;
  std::string description_;
  bool nearest_neighbor_;
  std::function<double(double)> radial_;
  Summability summability_ = Summability::kNone;
};

/// Classifies sum eps and sum eps^2 over Z^d from shell sums over doubling
/// sup-norm annuli: a series counts as convergent when the annulus
/// contributions shrink geometrically (ratio below 0.97) at the largest radii.
Summability classify_summability(int dimension, const std::function<double(std::span<const int>)>& eps);

struct DisorderedEmchModel {
  InteractionKernel kernel = InteractionKernel::nearest_neighbor(1);
  CouplingDistribution distribution = CouplingDistribution::bernoulli();
  double beta_coupling = 1.0;
  double gamma = 1.0;
  int volume_half_width = 1;  ///< V_n = [-n, n]^d

  void validate() const;
};

/// -tanh(gamma) = tr(sx e^{-gamma sx}) / tr(e^{-gamma sx}).
double delta_of_gamma(double gamma);

/// Sites of [-n, n]^d in lexicographic order (first coordinate slowest).
std::vector<std::vector<int>> volume_sites(int dimension, int half_width);

/// Symmetric matrix K_jk = beta J_(j,k) eps(j - k) over V_n with J drawn from
/// the (seed, coupling, sample_index) stream, one draw per pair j < k.
Eigen::MatrixXd volume_couplings(const DisorderedEmchModel& model, std::uint64_t seed, std::uint64_t sample_index);

/// delta * prod_{k != i0} cos(2 t K_{i0 k}).
double product_formula_magnetization(const Eigen::MatrixXd& pair_couplings, double gamma, double t, int i0);

inline constexpr int kMaxDenseSpins = 12;

/// <sx_i0>(t) for H = sum_{j<k} K_jk sz_j sz_k and the product state with
/// single-site density e^{-gamma sx} / tr, evaluated by evolving the full
/// 2^N x 2^N density matrix element by element: rho(t)_ab = rho_ab e^{-i(E_a - E_b)t}.
/// Throws ResourceLimit beyond kMaxDenseSpins.
std::vector<double> exact_magnetization_trace(const Eigen::MatrixXd& pair_couplings, double gamma,
                                              std::span<const double> times, int i0);
double exact_magnetization(const Eigen::MatrixXd& pair_couplings, double gamma, double t, int i0);

/// [E cos(2 beta t J)]^z, without the delta prefactor.
double closed_form_f(const CouplingDistribution& dist, int z, double beta_coupling, double t);

/// The forms as commonly printed with beta = 1 conventions:
/// cos(2 beta t)^z, (sin(2 beta t) / (2 t))^z and exp(-2 z t^2).
double printed_form_f(const CouplingDistribution& dist, int z, double beta_coupling, double t);

struct MagnetizationTrace {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> std_error;
};

/// delta * closed_form_f on a time grid (zero errors).
MagnetizationTrace closed_form_trace(const CouplingDistribution& dist, int z, double beta_coupling, double gamma,
                                     std::span<const double> times);

/// Monte Carlo estimate of delta * E prod_{i=1..z} cos(2 beta J_i t). Sample s
/// uses the (seed, monte-carlo, s) stream; the same draws serve every t.
MagnetizationTrace mc_average_f(const CouplingDistribution& dist, int z, double beta_coupling, double gamma,
                                std::span<const double> times, std::uint64_t samples, std::uint64_t seed);
MagnetizationTrace mc_average_f(const DisorderedEmchModel& model, std::span<const double> times,
                                std::uint64_t samples, std::uint64_t seed);

enum class DecayClass { kAlmostPeriodic, kPowerLaw, kGaussianLike };

const char* decay_class_name(DecayClass c);

struct DecayReport {
  DecayClass decay_class = DecayClass::kAlmostPeriodic;
  double power_exponent = 0.0;  ///< slope of log|f| against log t
  double power_r2 = 0.0;
  double gaussian_rate = 0.0;   ///< -slope of log|f| against t^2
  double gaussian_r2 = 0.0;
  std::size_t fit_points = 0;
};

/// Almost periodic when |f| returns above 0.9 |f|max after first falling below
/// 0.5 |f|max, or never falls below it. Otherwise the envelope (local maxima
/// of |f| above max(3 stderr, 1e-12), or all such points when there are fewer
/// than three maxima) is fitted both as a power law and as a Gaussian, and the
/// better R^2 wins.
DecayReport decay_classify(const MagnetizationTrace& trace);

struct StabilityReport {
  Summability kernel_class = Summability::kNone;
  bool stable = false;
  bool first_kind = false;
  bool second_kind = false;
  bool exponential_decay_excluded = false;
  std::string rationale;
};

StabilityReport stability_classify(const InteractionKernel& kernel, const CouplingDistribution& dist);

struct SpatialAverage {
  MagnetizationTrace trace;
  std::size_t sites = 0;
};

/// Spatial average over V_n of the per-site product formula
/// delta prod_{+-e_d} cos(2 beta J t) for one disorder realization. Bond
/// couplings come from per-bond streams, so boundary sites see the same
/// couplings as interior ones. With stride > 1 only every stride-th site is
/// averaged. The error estimate includes the covariance of neighbouring sites
/// that share a bond.
SpatialAverage finite_volume_average_f(const DisorderedEmchModel& model, std::span<const double> times,
                                       std::uint64_t seed, std::size_t stride = 1);

}  // namespace qdlab
