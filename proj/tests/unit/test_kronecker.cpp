#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qdlab/errors.hpp"
#include "qdlab/kronecker.hpp"

using namespace qdlab;

namespace {

constexpr double kPi = std::numbers::pi;

AtomicMeasure smooth_proxy(int atoms, double mass = 1.0) {
  std::vector<double> s, w;
  double total = 0.0;
  for (int k = 0; k < atoms; ++k) {
    const double x = -1.0 + 2.0 * (k + 0.5) / atoms;
    s.push_back(x);
    w.push_back(std::pow(std::cos(kPi * x / 2.0), 2));
    total += w.back();
  }
  for (double& x : w) x *= mass / total;
  return AtomicMeasure::from_atoms(s, w);
}

}  // namespace

TEST_CASE("realizations use independent streams") {
  SparseModelParams shared;
  shared.max_bump_index = 30;
  shared.seed = 17;
  const auto p = KroneckerParams::make(shared, 0.4);
  CHECK(p.realization_1.omegas != p.realization_2.omegas);
  CHECK(KroneckerParams::make(shared, 0.4).realization_2.omegas == p.realization_2.omegas);
  CHECK_THROWS_AS(KroneckerParams::make(shared, 1.5), InvalidArgument);
}

TEST_CASE("product amplitude examples") {
  const auto mu1 = AtomicMeasure::from_atoms({-0.3, 0.8, 1.1}, {0.2, 0.5, 0.3});
  const auto mu2 = AtomicMeasure::from_atoms({0.1, 1.4}, {0.25, 0.5});
  for (const double t : {0.4, 3.0}) {
    const auto a = product_amplitude(mu1, mu2, 0.0, t);
    CHECK(std::abs(a - fs_transform(mu1, t) * mu2.mass()) < 1e-15);
    CHECK(std::abs(a) <= mu1.mass() * mu2.mass() + 1e-15);
  }
  CHECK(std::abs(product_amplitude(mu1, mu2, 0.7, 0.0) - mu1.mass() * mu2.mass()) < 1e-15);
  const auto a1 = AtomicMeasure::from_atoms({0.9}, {1.0});
  const auto a2 = AtomicMeasure::from_atoms({-1.3}, {1.0});
  const double theta = 0.61;
  for (const double t : {0.5, 2.0, 40.0}) {
    const auto z = product_amplitude(a1, a2, theta, t);
    CHECK(std::abs(z - std::exp(std::complex<double>(0.0, -(0.9 - theta * 1.3) * t))) < 1e-13);
  }
}

TEST_CASE("product amplitude is the transform of the Kronecker measure") {
  const auto mu1 = smooth_proxy(15);
  const auto mu2 = AtomicMeasure::from_atoms({-0.5, 0.2, 1.7}, {0.3, 0.3, 0.4});
  const double theta = 0.3819660112501051;
  const auto joint = kronecker_measure(mu1, mu2, theta);
  CHECK(joint.mass() == doctest::Approx(1.0).epsilon(1e-13));
  for (const double t : {0.1, 2.5, 19.0}) {
    CHECK(std::abs(fs_transform(joint, t) - product_amplitude(mu1, mu2, theta, t)) < 1e-12);
  }
}

TEST_CASE("window geometry") {
  auto r = coupled_windows(1.0, 4, 0.0);
  const double edge = std::sqrt(4.0 - 1.0 / 3.0);
  CHECK_FALSE(r.hypothesis_violated);
  CHECK(r.pp_lower.lo == -2.0);
  CHECK(r.pp_lower.hi == doctest::Approx(-edge).epsilon(1e-15));
  CHECK(r.pp_upper.lo == doctest::Approx(edge).epsilon(1e-15));
  CHECK(r.pp_upper.hi == 2.0);
  CHECK(r.sc_unknown);

  r = coupled_windows(0.5, 3, 1.0);
  CHECK(r.band.lo == -4.0);
  CHECK(r.band.hi == 4.0);
  CHECK(r.pp_lower.hi == -r.pp_upper.lo);
  CHECK(r.pp_lower.lo == -r.pp_upper.hi);
  CHECK(r.theta_near_rational);

  r = coupled_windows(1.9, 2, 0.5);
  CHECK(r.hypothesis_violated);
  CHECK(r.ac_candidate.is_empty);
  CHECK_FALSE(r.diagnostic.empty());

  WindowOptions with_a;
  with_a.a = 5.0;
  CHECK(coupled_windows(0.5, 4, 0.3, with_a).hypothesis_violated);
  with_a.a = 3.0;
  CHECK_FALSE(coupled_windows(0.5, 4, 0.3, with_a).hypothesis_violated);
  CHECK_THROWS_AS(coupled_windows(0.5, 4, 1.3), InvalidArgument);
}

TEST_CASE("theta = 0 reduces to the one-dimensional classification") {
  const double v = 0.8;
  const int beta = 3;
  const auto r = coupled_windows(v, beta, 0.0);
  ClassifyOptions plain;
  plain.max_denominator = 0;
  for (int i = 0; i <= 400; ++i) {
    const double lambda = -2.0 + 4.0 * i / 400.0;
    const auto label = classify_energy(lambda, v, beta, plain).label;
    const bool in_pp = (lambda >= r.pp_lower.lo && lambda < r.pp_lower.hi) ||
                       (lambda > r.pp_upper.lo && lambda <= r.pp_upper.hi);
    if (label == SpectralRegion::kPurePoint) CHECK(in_pp);
    if (label == SpectralRegion::kSingularContinuous) CHECK_FALSE(in_pp);
  }
}

TEST_CASE("two-alpha indicator") {
  std::vector<double> grid;
  for (int i = 0; i < 11; ++i) grid.push_back(-1.0 + 0.2 * i);
  std::vector<double> ones(grid.size(), 1.0), low(grid.size(), 0.4), ramp;
  for (std::size_t i = 0; i < grid.size(); ++i) ramp.push_back(0.3 + 0.05 * static_cast<double>(i));
  auto all = two_alpha_indicator(grid, ones);
  CHECK(all.lo == grid.front());
  CHECK(all.hi == grid.back());
  CHECK(two_alpha_indicator(grid, low).is_empty);
  // ramp crosses 0.5 at index 4 (0.5 exactly, not > 0.5); index 5 is first past.
  const auto past = two_alpha_indicator(grid, ramp);
  CHECK(past.lo == grid[5]);
  CHECK(past.hi == grid.back());
  CHECK_THROWS_AS(two_alpha_indicator(std::vector<double>{}, std::vector<double>{}), InvalidArgument);
}

TEST_CASE("ac candidate stays inside the central window") {
  WindowOptions opts;
  for (int i = 0; i <= 40; ++i) {
    opts.lambda_grid.push_back(-2.0 + 0.1 * i);
    opts.alpha_estimates.push_back(0.9);
  }
  const auto r = coupled_windows(0.5, 4, 0.5, opts);
  REQUIRE_FALSE(r.ac_candidate.is_empty);
  CHECK(r.ac_candidate.lo > r.central.lo);
  CHECK(r.ac_candidate.hi < r.central.hi);
}

TEST_CASE("local dimension profile of a Lebesgue-like measure") {
  std::vector<double> s, w;
  for (int k = 0; k < 20000; ++k) {
    s.push_back(-1.0 + 2.0 * k / 20000.0);
    w.push_back(1.0 / 20000.0);
  }
  const auto mu = AtomicMeasure::from_atoms(s, w);
  const std::vector<double> grid{-0.5, 0.0, 0.5};
  const auto alphas = local_dimension_profile(mu, grid, 0.25, dyadic_scales(4, 9));
  for (const double a : alphas) CHECK(a == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("saturation test separates atoms from smooth measures") {
  const auto horizons = log_grid(1.0, 100.0, 9);
  const auto atom = AtomicMeasure::from_atoms({0.3}, {1.0});
  auto r = l2_saturation_test(atom, atom, 0.7, horizons);
  CHECK(r.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.integrals.back() == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(r.label == SaturationLabel::kLinear);

  const auto smooth = smooth_proxy(60);
  r = l2_saturation_test(smooth, smooth, 0.6180339887498949, horizons);
  CHECK(r.normalized_slope < 0.1);
  CHECK(r.label == SaturationLabel::kSaturating);

  // 0.6 atom + 0.4 smooth, against a single atom: slope -> 0.6^2.
  auto mixed = smooth_proxy(60, 0.4);
  mixed.support.push_back(5.0);
  mixed.weights.push_back(0.6);
  mixed = AtomicMeasure::from_atoms(mixed.support, mixed.weights);
  r = l2_saturation_test(mixed, atom, 0.6180339887498949, horizons);
  CHECK(r.normalized_slope == doctest::Approx(0.36).epsilon(0.1));
  CHECK(r.label == SaturationLabel::kIntermediate);
}

TEST_CASE("atomic slope equals the sum of squared product weights") {
  const auto mu1 = AtomicMeasure::from_atoms({-0.4, 0.9}, {0.3, 0.7});
  const auto mu2 = AtomicMeasure::from_atoms({0.2, 1.5}, {0.45, 0.55});
  const double theta = 0.7548776662466927;
  double expected = 0.0;
  for (const double a : mu1.weights) {
    for (const double b : mu2.weights) expected += a * a * b * b;
  }
  const auto r = l2_saturation_test(mu1, mu2, theta, log_grid(10.0, 1e5, 9));
  CHECK(std::abs(r.slope / expected - 1.0) < 0.05);
}

TEST_CASE("low discrepancy thetas") {
  const auto t = low_discrepancy_thetas(100);
  CHECK(t.size() == 100);
  for (const double x : t) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
  // Every tenth of the unit interval receives points.
  std::vector<int> bins(10, 0);
  for (const double x : t) bins[std::min(9, static_cast<int>(x * 10))]++;
  for (const int b : bins) CHECK(b >= 5);
}
