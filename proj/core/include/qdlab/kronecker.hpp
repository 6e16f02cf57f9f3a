#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdlab/spectral_dynamics.hpp"

namespace qdlab {

// Separable two-dimensional operator J1 (x) I + theta I (x) J2 built from two
// independent sparse realizations. Its dynamics factorise, so everything here
// works on the pair of one-dimensional spectral measures.

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool is_empty = true;

  static Interval empty() { return {}; }
  static Interval closed(double lo, double hi) { return {lo, hi, false}; }
  double length() const { return is_empty ? 0.0 : hi - lo; }
};

struct KroneckerParams {
  double theta = 1.0;
  SparseModelParams shared;
  SparsePotential realization_1;
  SparsePotential realization_2;

  /// Two realizations from independent seeds derived from shared.seed.
  static KroneckerParams make(const SparseModelParams& shared, double theta);
};

/// f1(t) f2(theta t): the amplitude <Phi, exp(-itJ) Psi> for product vectors.
std::complex<double> product_amplitude(const AtomicMeasure& mu1, const AtomicMeasure& mu2, double theta, double t);

/// Spectral measure of the product vector under the Kronecker sum: atoms
/// lambda_j + theta lambda'_k with weights w_j w'_k.
AtomicMeasure kronecker_measure(const AtomicMeasure& mu1, const AtomicMeasure& mu2, double theta);

struct WindowReport {
  Interval band;
  Interval pp_lower;  ///< [-2(1+theta), lambda_-(1+theta))
  Interval pp_upper;  ///< (lambda_+(1+theta), 2(1+theta)]
  Interval central;   ///< (lambda_-(1+theta), lambda_+(1+theta))
  Interval ac_candidate;
  bool sc_unknown = true;  ///< never resolved numerically
  bool hypothesis_violated = false;
  bool theta_near_rational = false;
  std::string diagnostic;
};

struct WindowOptions {
  /// Free constant of the hypothesis v^2 < a (sqrt(beta) - 1) < v_c^2, a < 4.
  /// When unset, only satisfiability v^2 < 4 (sqrt(beta) - 1) is checked.
  std::optional<double> a;
  /// Local dimension estimates alpha(lambda) on a grid inside (lambda_-, lambda_+)
  /// of a one-dimensional factor; drives ac_candidate.
  std::vector<double> lambda_grid;
  std::vector<double> alpha_estimates;
  int theta_max_denominator = 64;
};

WindowReport coupled_windows(double v, int beta_base, double theta, const WindowOptions& options = {});

/// Longest run of consecutive grid points with 2 alpha > 1, as
/// [first point, last point]. Empty interval when no point qualifies.
Interval two_alpha_indicator(std::span<const double> lambdas, std::span<const double> alphas);

/// Local Holder exponent of mu restricted to [lambda - half_window,
/// lambda + half_window] for each grid point.
std::vector<double> local_dimension_profile(const AtomicMeasure& mu, std::span<const double> lambda_grid,
                                            double half_window, std::span<const double> scales);

enum class SaturationLabel { kSaturating, kIntermediate, kLinear };

const char* saturation_label(SaturationLabel label);

struct SaturationReport {
  std::vector<double> horizons;
  std::vector<double> integrals;  ///< I(T) = int_0^T |f1(t) f2(theta t)|^2 dt
  double slope = 0.0;             ///< dI/dT over the last decade of the grid
  double normalized_slope = 0.0;  ///< slope / (mass1 mass2)^2
  SaturationLabel label = SaturationLabel::kIntermediate;
};

/// Bounded I(T) indicates an L^2 amplitude (absolutely continuous part); linear
/// growth at rate sum (w1 w2)^2 indicates atoms.
SaturationReport l2_saturation_test(const AtomicMeasure& mu1, const AtomicMeasure& mu2, double theta,
                                    std::span<const double> horizons);

/// Golden-ratio low-discrepancy points in [0, 1].
std::vector<double> low_discrepancy_thetas(std::size_t count, double offset = 0.5);

}  // namespace qdlab
