#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "qdlab/sparse_jacobi.hpp"

namespace qdlab {

/// Finite atomic measure sum_k w_k delta(lambda_k).
struct AtomicMeasure {
  std::vector<double> support;  ///< sorted, no two atoms closer than the merge tolerance
  std::vector<double> weights;  ///< non-negative

  static constexpr double kMergeTolerance = 1e-12;

  /// Sorts atoms and merges those within kMergeTolerance of each other.
  static AtomicMeasure from_atoms(std::vector<double> support, std::vector<double> weights);

  double mass() const;
  /// sum_k w_k^2, the long-time limit of the Cesaro average.
  double sum_squared_weights() const;
  std::size_t size() const { return support.size(); }
};

/// Measure of `vector` with respect to the eigenbasis: w_k = <e_k, v>^2.
AtomicMeasure spectral_measure(const Eigensystem& eig, std::span<const double> vector);

/// sum_k w_k exp(-i lambda_k t).
std::complex<double> fs_transform(const AtomicMeasure& mu, double t);

/// (1/T) int_0^T |mu^(t)|^2 dt in closed form:
/// sum_{k,l} w_k w_l sinc((lambda_k - lambda_l) T).
double cesaro_average(const AtomicMeasure& mu, double horizon);

struct CesaroSeries {
  std::vector<double> horizons;
  std::vector<double> values;
};

CesaroSeries cesaro_series(const AtomicMeasure& mu, std::span<const double> horizons);

/// n points spaced evenly in log between lo and hi.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct DecayFit {
  double exponent = 0.0;  ///< minus the log-log slope
  double intercept = 0.0;
  double residual = 0.0;  ///< RMS residual of the log-log fit
};

/// Least-squares power-law exponent; needs >= 5 horizons spanning two decades.
DecayFit fit_decay_exponent(const CesaroSeries& series);

/// prod_{j=1}^{depth} cos(2/3 u pi 3^{-j+1}).
double cantor_transform(double u, int depth);

/// Middle-thirds Cantor measure on [-pi, pi] truncated to `depth` levels:
/// 2^depth equal atoms at sum_j +-(2 pi / 3) 3^{-j+1}. Its transform is
/// cantor_transform(t, depth).
AtomicMeasure cantor_measure(int depth);

/// max |transform(t)| over the top decade of an increasing grid whose last
/// point is >= 1e3; stays near 1 for atoms and the Cantor measure.
double rajchman_indicator(const AtomicMeasure& mu, std::span<const double> t_grid);
double rajchman_indicator(const std::function<double(double)>& abs_transform, std::span<const double> t_grid);

struct HolderReport {
  double alpha = 0.0;
  double holder_constant = 0.0;
  std::vector<double> scales_tested;
  std::vector<double> max_masses;
  bool degenerate = false;  ///< single atom; alpha forced to 0
};

/// Uniform Holder exponent from the largest interval mass at each scale
/// (sliding windows with stride scale/4). Needs >= 3 scales, all < 1.
HolderReport holder_estimate(const AtomicMeasure& mu, std::span<const double> scales);

/// Dyadic scales 2^-k_first .. 2^-k_last.
std::vector<double> dyadic_scales(int k_first, int k_last);

/// (1/T) int_0^T |<psi, exp(-itH) psi>|^2 dt for the Hamiltonian whose
/// eigensystem is given.
double survival_cesaro(const Eigensystem& eig, std::span<const double> psi, double horizon);

}  // namespace qdlab
