#include "qdlab/spectral_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qdlab/errors.hpp"
#include "qdlab/parallel.hpp"

namespace qdlab {
namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

}  // namespace

AtomicMeasure AtomicMeasure::from_atoms(std::vector<double> support, std::vector<double> weights) {
  require(support.size() == weights.size(), "AtomicMeasure: support and weights differ in length");
  std::vector<std::size_t> order(support.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return support[a] < support[b]; });
  AtomicMeasure mu;
  for (const std::size_t k : order) {
    require(weights[k] >= 0.0, "AtomicMeasure: negative weight");
    if (!mu.support.empty() && support[k] - mu.support.back() <= kMergeTolerance) {
      mu.weights.back() += weights[k];
    } else {
      mu.support.push_back(support[k]);
      mu.weights.push_back(weights[k]);
    }
  }
  return mu;
}

double AtomicMeasure::mass() const { return pairwise_sum(weights); }

double AtomicMeasure::sum_squared_weights() const {
  std::vector<double> sq(weights.size());
  std::transform(weights.begin(), weights.end(), sq.begin(), [](double w) { return w * w; });
  return pairwise_sum(sq);
}

AtomicMeasure spectral_measure(const Eigensystem& eig, std::span<const double> vector) {
  const auto n = eig.vectors.rows();
  require(static_cast<Eigen::Index>(vector.size()) == n, "spectral_measure: vector dimension mismatch");
  const Eigen::Map<const Eigen::VectorXd> v(vector.data(), n);
  const Eigen::VectorXd overlaps = eig.vectors.transpose() * v;
  std::vector<double> support(eig.values.data(), eig.values.data() + eig.values.size());
  std::vector<double> weights(static_cast<std::size_t>(overlaps.size()));
  for (Eigen::Index k = 0; k < overlaps.size(); ++k) weights[static_cast<std::size_t>(k)] = overlaps[k] * overlaps[k];
  return AtomicMeasure::from_atoms(std::move(support), std::move(weights));
}

std::complex<double> fs_transform(const AtomicMeasure& mu, double t) {
  std::vector<double> re(mu.size()), im(mu.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    re[k] = mu.weights[k] * std::cos(mu.support[k] * t);
    im[k] = -mu.weights[k] * std::sin(mu.support[k] * t);
  }
  return {pairwise_sum(re), pairwise_sum(im)};
}

double cesaro_average(const AtomicMeasure& mu, double horizon) {
  require(horizon > 0.0, "cesaro_average: T must be positive");
  const std::size_t n = mu.size();
  std::vector<double> rows(n);
  parallel_for(n, [&](std::size_t k) {
    const double lk = mu.support[k];
    double acc = 0.0;
    for (std::size_t l = k + 1; l < n; ++l) acc += mu.weights[l] * sinc((mu.support[l] - lk) * horizon);
    rows[k] = mu.weights[k] * (mu.weights[k] + 2.0 * acc);
  });
  return pairwise_sum(rows);
}

CesaroSeries cesaro_series(const AtomicMeasure& mu, std::span<const double> horizons) {
  CesaroSeries series;
  series.horizons.assign(horizons.begin(), horizons.end());
  series.values.reserve(horizons.size());
  for (const double T : horizons) series.values.push_back(cesaro_average(mu, T));
  return series;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  require(lo > 0.0 && hi > lo && n >= 2, "log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> grid(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  grid.back() = hi;
  return grid;
}

DecayFit fit_decay_exponent(const CesaroSeries& series) {
  const auto& T = series.horizons;
  require(T.size() == series.values.size(), "fit_decay_exponent: mismatched series");
  require(T.size() >= 5, "fit_decay_exponent: need at least 5 horizons");
  require(T.front() > 0.0 && T.back() / T.front() >= 100.0 * (1.0 - 1e-12),
          "fit_decay_exponent: horizons must span at least two decades");
  std::vector<double> lx(T.size()), ly(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    require(series.values[i] > 0.0, "fit_decay_exponent: non-positive value in series");
    lx[i] = std::log(T[i]);
    ly[i] = std::log(series.values[i]);
  }
  const LineFit fit = least_squares(lx, ly);
  return {-fit.slope, fit.intercept, fit.rms};
}

double cantor_transform(double u, int depth) {
  require(depth >= 1, "cantor_transform: depth must be >= 1");
  double product = 1.0;
  double scale = 2.0 / 3.0 * std::numbers::pi * u;
  for (int j = 1; j <= depth; ++j) {
    product *= std::cos(scale);
    scale /= 3.0;
  }
  return product;
}

AtomicMeasure cantor_measure(int depth) {
  require(depth >= 1 && depth <= 24, "cantor_measure: depth must lie in [1, 24]");
  std::vector<double> points{0.0};
  double step = 2.0 / 3.0 * std::numbers::pi;
  for (int j = 1; j <= depth; ++j) {
    std::vector<double> next;
    next.reserve(points.size() * 2);
    for (const double p : points) {
      next.push_back(p - step);
      next.push_back(p + step);
    }
    points = std::move(next);
    step /= 3.0;
  }
  std::vector<double> weights(points.size(), 1.0 / static_cast<double>(points.size()));
  return AtomicMeasure::from_atoms(std::move(points), std::move(weights));
}

double rajchman_indicator(const std::function<double(double)>& abs_transform, std::span<const double> t_grid) {
  require(!t_grid.empty(), "rajchman_indicator: empty grid");
  require(std::is_sorted(t_grid.begin(), t_grid.end()) &&
              std::adjacent_find(t_grid.begin(), t_grid.end()) == t_grid.end(),
          "rajchman_indicator: grid must be increasing");
  require(t_grid.back() >= 1e3, "rajchman_indicator: grid must reach t >= 1e3");
  const double cutoff = t_grid.back() / 10.0;
  double best = 0.0;
  for (const double t : t_grid) {
    if (t >= cutoff) best = std::max(best, abs_transform(t));
  }
  return best;
}

double rajchman_indicator(const AtomicMeasure& mu, std::span<const double> t_grid) {
  return rajchman_indicator([&](double t) { return std::abs(fs_transform(mu, t)); }, t_grid);
}

std::vector<double> dyadic_scales(int k_first, int k_last) {
  require(k_first >= 1 && k_last >= k_first, "dyadic_scales: need 1 <= k_first <= k_last");
  std::vector<double> scales;
  for (int k = k_first; k <= k_last; ++k) scales.push_back(std::ldexp(1.0, -k));
  return scales;
}

HolderReport holder_estimate(const AtomicMeasure& mu, std::span<const double> scales) {
  require(scales.size() >= 3, "holder_estimate: need at least 3 scales");
  require(mu.size() >= 1, "holder_estimate: empty measure");
  for (const double s : scales) require(s > 0.0 && s < 1.0, "holder_estimate: scales must lie in (0, 1)");
  HolderReport report;
  report.scales_tested.assign(scales.begin(), scales.end());
  const double total = mu.mass();
  if (mu.size() == 1) {
    report.degenerate = true;
    report.max_masses.assign(scales.size(), total);
    report.holder_constant = total;
    return report;
  }

  std::vector<double> cumulative(mu.size() + 1, 0.0);
  std::partial_sum(mu.weights.begin(), mu.weights.end(), cumulative.begin() + 1);
  const double lo = mu.support.front();
  const double hi = mu.support.back();

  std::vector<double> log_s, log_m;
  for (const double s : scales) {
    const double stride = s / 4.0;
    const auto windows = static_cast<std::size_t>(std::ceil((hi - lo + s) / stride)) + 1;
    double best = 0.0;
    for (std::size_t w = 0; w < windows; ++w) {
      const double start = lo - s + stride * static_cast<double>(w);
      const auto first = std::lower_bound(mu.support.begin(), mu.support.end(), start) - mu.support.begin();
      const auto last = std::upper_bound(mu.support.begin(), mu.support.end(), start + s) - mu.support.begin();
      best = std::max(best, cumulative[static_cast<std::size_t>(last)] - cumulative[static_cast<std::size_t>(first)]);
    }
    report.max_masses.push_back(best);
    log_s.push_back(std::log(s));
    log_m.push_back(std::log(best));
  }
  const LineFit fit = least_squares(log_s, log_m);
  report.alpha = std::clamp(fit.slope, 0.0, 1.0);
  for (std::size_t i = 0; i < scales.size(); ++i) {
    report.holder_constant = std::max(report.holder_constant, report.max_masses[i] / std::pow(scales[i], report.alpha));
  }
  return report;
}

double survival_cesaro(const Eigensystem& eig, std::span<const double> psi, double horizon) {
  double norm2 = 0.0;
  for (const double x : psi) norm2 += x * x;
  require(std::abs(norm2 - 1.0) < 1e-9, "survival_cesaro: psi must be normalised");
  return cesaro_average(spectral_measure(eig, psi), horizon);
}

}  // namespace qdlab
