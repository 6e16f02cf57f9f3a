#include "qdlab/kronecker.hpp"

#include <algorithm>
#include <cmath>

#include "qdlab/errors.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {

KroneckerParams KroneckerParams::make(const SparseModelParams& shared, double theta) {
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  KroneckerParams params;
  params.theta = theta;
  params.shared = shared;
  SparseModelParams first = shared;
  SparseModelParams second = shared;
  first.seed = CounterRng(shared.seed, StreamPurpose::kKronecker, 1)();
  second.seed = CounterRng(shared.seed, StreamPurpose::kKronecker, 2)();
  params.realization_1 = build_potential(first);
  params.realization_2 = build_potential(second);
  return params;
}

std::complex<double> product_amplitude(const AtomicMeasure& mu1, const AtomicMeasure& mu2, double theta, double t) {
  return fs_transform(mu1, t) * fs_transform(mu2, theta * t);
}

AtomicMeasure kronecker_measure(const AtomicMeasure& mu1, const AtomicMeasure& mu2, double theta) {
  std::vector<double> support;
  std::vector<double> weights;
  support.reserve(mu1.size() * mu2.size());
  weights.reserve(mu1.size() * mu2.size());
  for (std::size_t j = 0; j < mu1.size(); ++j) {
    for (std::size_t k = 0; k < mu2.size(); ++k) {
      support.push_back(mu1.support[j] + theta * mu2.support[k]);
      weights.push_back(mu1.weights[j] * mu2.weights[k]);
    }
  }
  return AtomicMeasure::from_atoms(std::move(support), std::move(weights));
}

Interval two_alpha_indicator(std::span<const double> lambdas, std::span<const double> alphas) {
  require(!lambdas.empty(), "two_alpha_indicator: empty grid");
  require(lambdas.size() == alphas.size(), "two_alpha_indicator: grid and estimates differ in length");
  std::size_t best_begin = 0, best_len = 0;
  std::size_t run_begin = 0, run_len = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (2.0 * alphas[i] > 1.0) {
      if (run_len == 0) run_begin = i;
      ++run_len;
      if (run_len > best_len) {
        best_len = run_len;
        best_begin = run_begin;
      }
    } else {
      run_len = 0;
    }
  }
  if (best_len == 0) return Interval::empty();
  return Interval::closed(lambdas[best_begin], lambdas[best_begin + best_len - 1]);
}

WindowReport coupled_windows(double v, int beta_base, double theta, const WindowOptions& options) {
  require(v > 0.0, "coupled_windows: v must be positive");
  require(beta_base >= 2, "coupled_windows: beta_base must be >= 2");
  require(theta >= 0.0 && theta <= 1.0, "coupled_windows: theta must lie in [0, 1]");
  const double scale = 1.0 + theta;
  WindowReport report;
  report.band = Interval::closed(-2.0 * scale, 2.0 * scale);
  report.theta_near_rational = near_rational(theta, options.theta_max_denominator, 1e-9);

  const MobilityEdges edges = mobility_edges(v, beta_base);
  if (edges.sc_window_empty) {
    report.pp_lower = report.band;
    report.pp_upper = Interval::empty();
    report.central = Interval::empty();
  } else {
    report.pp_lower = Interval::closed(-2.0 * scale, edges.lower * scale);
    report.pp_upper = Interval::closed(edges.upper * scale, 2.0 * scale);
    report.central = Interval::closed(edges.lower * scale, edges.upper * scale);
  }

  const double vc2 = 4.0 * (beta_base - 1.0);
  const double root_gap = std::sqrt(static_cast<double>(beta_base)) - 1.0;
  if (options.a) {
    const double a = *options.a;
    if (!(a < 4.0)) {
      report.hypothesis_violated = true;
      report.diagnostic = "a must be < 4";
    } else if (!(v * v < a * root_gap)) {
      report.hypothesis_violated = true;
      report.diagnostic = "v^2 >= a (sqrt(beta) - 1)";
    } else if (!(a * root_gap < vc2)) {
      report.hypothesis_violated = true;
      report.diagnostic = "a (sqrt(beta) - 1) >= v_c^2";
    }
  } else if (!(v * v < 4.0 * root_gap)) {
    report.hypothesis_violated = true;
    report.diagnostic = "v^2 >= 4 (sqrt(beta) - 1): no admissible a < 4";
  }

  if (report.hypothesis_violated || edges.sc_window_empty || options.lambda_grid.empty()) {
    report.ac_candidate = Interval::empty();
    if (!report.hypothesis_violated && !edges.sc_window_empty) report.diagnostic = "no local dimension estimates";
    return report;
  }

  std::vector<double> grid, alphas;
  require(options.lambda_grid.size() == options.alpha_estimates.size(),
          "coupled_windows: lambda grid and alpha estimates differ in length");
  for (std::size_t i = 0; i < options.lambda_grid.size(); ++i) {
    const double lambda = options.lambda_grid[i];
    if (lambda > edges.lower && lambda < edges.upper) {
      grid.push_back(lambda);
      alphas.push_back(options.alpha_estimates[i]);
    }
  }
  if (grid.empty()) {
    report.diagnostic = "no estimates inside the mobility edges";
    return report;
  }
  const Interval one_dim = two_alpha_indicator(grid, alphas);
  if (!one_dim.is_empty) report.ac_candidate = Interval::closed(one_dim.lo * scale, one_dim.hi * scale);
  return report;
}

std::vector<double> local_dimension_profile(const AtomicMeasure& mu, std::span<const double> lambda_grid,
                                            double half_window, std::span<const double> scales) {
  require(half_window > 0.0, "local_dimension_profile: half window must be positive");
  std::vector<double> alphas;
  alphas.reserve(lambda_grid.size());
  for (const double lambda : lambda_grid) {
    const auto first = std::lower_bound(mu.support.begin(), mu.support.end(), lambda - half_window);
    const auto last = std::upper_bound(mu.support.begin(), mu.support.end(), lambda + half_window);
    const auto begin = static_cast<std::size_t>(first - mu.support.begin());
    const auto end = static_cast<std::size_t>(last - mu.support.begin());
    AtomicMeasure local;
    local.support.assign(mu.support.begin() + static_cast<std::ptrdiff_t>(begin),
                         mu.support.begin() + static_cast<std::ptrdiff_t>(end));
    local.weights.assign(mu.weights.begin() + static_cast<std::ptrdiff_t>(begin),
                         mu.weights.begin() + static_cast<std::ptrdiff_t>(end));
    if (local.size() < 2 || local.mass() <= 0.0) {
      alphas.push_back(0.0);
      continue;
    }
    alphas.push_back(holder_estimate(local, scales).alpha);
  }
  return alphas;
}

const char* saturation_label(SaturationLabel label) {
  switch (label) {
    case SaturationLabel::kSaturating: return "saturating";
    case SaturationLabel::kIntermediate: return "intermediate";
    case SaturationLabel::kLinear: return "linear";
  }
  return "?";
}

SaturationReport l2_saturation_test(const AtomicMeasure& mu1, const AtomicMeasure& mu2, double theta,
                                    std::span<const double> horizons) {
  require(horizons.size() >= 2, "l2_saturation_test: need at least two horizons");
  require(std::is_sorted(horizons.begin(), horizons.end()) && horizons.front() > 0.0,
          "l2_saturation_test: horizons must be positive and increasing");
  const double t_end = horizons.back();
  // Start of the last decade: largest horizon <= t_end / 10.
  const auto decade = std::upper_bound(horizons.begin(), horizons.end(), t_end / 10.0 * (1.0 + 1e-12));
  require(decade != horizons.begin(), "l2_saturation_test: horizons must span at least a decade");
  const auto start_index = static_cast<std::size_t>(decade - horizons.begin()) - 1;

  const AtomicMeasure joint = kronecker_measure(mu1, mu2, theta);
  SaturationReport report;
  report.horizons.assign(horizons.begin(), horizons.end());
  for (const double T : horizons) report.integrals.push_back(T * cesaro_average(joint, T));

  const double t0 = horizons[start_index];
  report.slope = (report.integrals.back() - report.integrals[start_index]) / (t_end - t0);
  const double mass = mu1.mass() * mu2.mass();
  report.normalized_slope = report.slope / (mass * mass);
  if (report.normalized_slope > 0.9) {
    report.label = SaturationLabel::kLinear;
  } else if (report.normalized_slope < 0.1) {
    report.label = SaturationLabel::kSaturating;
  } else {
    report.label = SaturationLabel::kIntermediate;
  }
  return report;
}

std::vector<double> low_discrepancy_thetas(std::size_t count, double offset) {
  constexpr double kGoldenFraction = 0.6180339887498949;
  std::vector<double> thetas(count);
  double x = offset;
  for (std::size_t i = 0; i < count; ++i) {
    x += kGoldenFraction;
    x -= std::floor(x);
    thetas[i] = x;
  }
  return thetas;
}

}  // namespace qdlab
