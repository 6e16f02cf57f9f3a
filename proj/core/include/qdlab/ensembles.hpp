#pragma once

#include <string>
#include <string_view>

#include "qdlab/rng.hpp"

namespace qdlab {

enum class DistributionKind { kBernoulli, kUniform, kGaussian };

/// Centered coupling distribution.
///
///   Bernoulli: +1 / -1 with probability 1/2 each.
///   Uniform:   density 1/2 on [-1, 1].
///   Gaussian:  zero-mean normal; the default variance 1/2 corresponds to the
///              density exp(-x^2)/sqrt(pi). Other variances can be requested
///              to exercise the unit-variance convention.
class CouplingDistribution {
 public:
  static CouplingDistribution bernoulli();
  static CouplingDistribution uniform();
  static CouplingDistribution gaussian(double variance = 0.5);
  /// Accepts "bernoulli", "uniform", "gaussian" (variance 1/2) and
  /// "gaussian-unit" (variance 1).
  static CouplingDistribution parse(std::string_view name);

  DistributionKind kind() const { return kind_; }
  double variance() const;
  bool bounded_support() const { return kind_ != DistributionKind::kGaussian; }
  std::string name() const;

  /// One i.i.d. draw; advances the stream deterministically.
  double sample(CounterRng& stream) const;

  /// E[cos(s J)] (the characteristic function is real for symmetric laws).
  double char_function(double s) const;

  /// Exact |E J^n|; zero for odd n.
  double abs_moment(int n) const;

  /// Density (Bernoulli has none and returns 0).
  double density(double x) const;
  /// Cumulative distribution function.
  double cdf(double x) const;

  bool operator==(const CouplingDistribution&) const = default;

 private:
  CouplingDistribution(DistributionKind kind, double gaussian_variance)
      : kind_(kind), gaussian_variance_(gaussian_variance) {}

  DistributionKind kind_;
  double gaussian_variance_;
};

struct MomentBound {
  double c = 0.0;         ///< smallest c with |E J^n| <= n! c^n for all n <= n_max
  int attained_at = 0;    ///< the n that forces c
};

/// Smallest constant in the moment growth condition |E J^n| <= n! c^n,
/// checked for 1 <= n <= n_max.
MomentBound moment_bound_check(const CouplingDistribution& dist, int n_max);

}  // namespace qdlab
