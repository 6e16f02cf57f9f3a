#include "qdlab/ensembles.hpp"

#include <cmath>
#include <numbers>

#include "qdlab/errors.hpp"

namespace qdlab {

CouplingDistribution CouplingDistribution::bernoulli() { return {DistributionKind::kBernoulli, 0.0}; }

CouplingDistribution CouplingDistribution::uniform() { return {DistributionKind::kUniform, 0.0}; }

CouplingDistribution CouplingDistribution::gaussian(double variance) {
  require(variance > 0.0 && std::isfinite(variance), "gaussian: variance must be positive");
  return {DistributionKind::kGaussian, variance};
}

CouplingDistribution CouplingDistribution::parse(std::string_view name) {
  if (name == "bernoulli") return bernoulli();
  if (name == "uniform") return uniform();
  if (name == "gaussian") return gaussian();
  if (name == "gaussian-unit") return gaussian(1.0);
  throw InvalidArgument("unknown distribution '" + std::string(name) +
                        "' (expected bernoulli, uniform, gaussian, gaussian-unit)");
}

double CouplingDistribution::variance() const {
  switch (kind_) {
    case DistributionKind::kBernoulli: return 1.0;
    case DistributionKind::kUniform: return 1.0 / 3.0;
    case DistributionKind::kGaussian: return gaussian_variance_;
  }
  return 0.0;
}

std::string CouplingDistribution::name() const {
  switch (kind_) {
    case DistributionKind::kBernoulli: return "bernoulli";
    case DistributionKind::kUniform: return "uniform";
    case DistributionKind::kGaussian: return gaussian_variance_ == 0.5 ? "gaussian" : "gaussian-unit";
  }
  return "unknown";
}

double CouplingDistribution::sample(CounterRng& stream) const {
  switch (kind_) {
    case DistributionKind::kBernoulli:
      return (stream() >> 63) != 0 ? 1.0 : -1.0;
    case DistributionKind::kUniform:
      return 2.0 * stream.uniform01() - 1.0;
    case DistributionKind::kGaussian: {
      // Box-Muller; the sine branch is discarded so each draw consumes
      // exactly two counter values.
      const double u1 = 1.0 - stream.uniform01();
      const double u2 = stream.uniform01();
      return std::sqrt(-2.0 * gaussian_variance_ * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
  }
  return 0.0;
}

double CouplingDistribution::char_function(double s) const {
  switch (kind_) {
    case DistributionKind::kBernoulli:
      return std::cos(s);
    case DistributionKind::kUniform:
      if (std::abs(s) < 1e-8) return 1.0 - s * s / 6.0;
      return std::sin(s) / s;
    case DistributionKind::kGaussian:
      return std::exp(-0.5 * gaussian_variance_ * s * s);
  }
  return 0.0;
}

double CouplingDistribution::abs_moment(int n) const {
  require(n >= 0, "abs_moment: order must be non-negative");
  if (n % 2 == 1) return 0.0;
  switch (kind_) {
    case DistributionKind::kBernoulli:
      return 1.0;
    case DistributionKind::kUniform:
      return 1.0 / (n + 1.0);
    case DistributionKind::kGaussian: {
      // (n-1)!! sigma^n
      double m = 1.0;
      for (int k = n - 1; k > 1; k -= 2) m *= k;
      return m * std::pow(gaussian_variance_, n / 2);
    }
  }
  return 0.0;
}

double CouplingDistribution::density(double x) const {
  switch (kind_) {
    case DistributionKind::kBernoulli: return 0.0;
    case DistributionKind::kUniform: return std::abs(x) <= 1.0 ? 0.5 : 0.0;
    case DistributionKind::kGaussian:
      return std::exp(-x * x / (2.0 * gaussian_variance_)) / std::sqrt(2.0 * std::numbers::pi * gaussian_variance_);
  }
  return 0.0;
}

double CouplingDistribution::cdf(double x) const {
  switch (kind_) {
    case DistributionKind::kBernoulli:
      if (x < -1.0) return 0.0;
      return x < 1.0 ? 0.5 : 1.0;
    case DistributionKind::kUniform:
      if (x <= -1.0) return 0.0;
      if (x >= 1.0) return 1.0;
      return 0.5 * (x + 1.0);
    case DistributionKind::kGaussian:
      return 0.5 * std::erfc(-x / std::sqrt(2.0 * gaussian_variance_));
  }
  return 0.0;
}

MomentBound moment_bound_check(const CouplingDistribution& dist, int n_max) {
  require(n_max >= 2, "moment_bound_check: n_max must be at least 2");
  MomentBound best;
  double log_factorial = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    log_factorial += std::log(static_cast<double>(n));
    const double m = dist.abs_moment(n);
    if (m == 0.0) continue;
    // |E J^n| <= n! c^n  <=>  c >= (|E J^n| / n!)^(1/n)
    const double needed = std::exp((std::log(m) - log_factorial) / n);
    if (needed > best.c) {
      best.c = needed;
      best.attained_at = n;
    }
  }
  return best;
}

}  // namespace qdlab
