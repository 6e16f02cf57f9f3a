#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "qdlab/emch_radin.hpp"
#include "qdlab/errors.hpp"
#include "spin_oracle.hpp"

using namespace qdlab;

namespace {

constexpr double kPi = std::numbers::pi;

using qdlab::testing::dense_magnetization_oracle;

std::vector<double> grid(double lo, double hi, int points) {
  std::vector<double> t;
  for (int i = 0; i < points; ++i) t.push_back(lo + (hi - lo) * i / (points - 1));
  return t;
}

}  // namespace

TEST_CASE("thermal polarisation") {
  CHECK(delta_of_gamma(0.0) == 0.0);
  CHECK(delta_of_gamma(1.0) == doctest::Approx(-0.7615941559557649).epsilon(1e-15));
  CHECK(delta_of_gamma(-2.0) == -delta_of_gamma(2.0));
  DisorderedEmchModel model;
  model.gamma = 0.0;
  CHECK_THROWS_AS(model.validate(), InvalidArgument);
  model.gamma = 1.0;
  model.beta_coupling = 0.0;
  CHECK_THROWS_AS(model.validate(), InvalidArgument);
}

TEST_CASE("two spins precess with cos(2 beta t)") {
  Eigen::MatrixXd k(2, 2);
  const double beta = 0.8;
  k << 0.0, beta, beta, 0.0;
  for (const double t : {0.0, 0.3, 1.7, 5.0}) {
    const double expected = -std::tanh(1.0) * std::cos(2.0 * beta * t);
    CHECK(exact_magnetization(k, 1.0, t, 0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(product_formula_magnetization(k, 1.0, t, 1) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(dense_magnetization_oracle(k, 1.0, t, 0) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("exact evolution matches the product formula and a dense oracle") {
  DisorderedEmchModel chain;
  chain.kernel = InteractionKernel::nearest_neighbor(1);
  chain.volume_half_width = 2;
  chain.distribution = CouplingDistribution::gaussian();
  chain.gamma = 0.7;
  DisorderedEmchModel longrange = chain;
  longrange.kernel = InteractionKernel::power_law(1, 1.5);
  longrange.distribution = CouplingDistribution::uniform();
  longrange.beta_coupling = 1.3;

  const auto times = grid(0.0, 6.0, 13);
  for (const auto* model : {&chain, &longrange}) {
    for (std::uint64_t s = 0; s < 4; ++s) {
      const auto k = volume_couplings(*model, 11, s);
      REQUIRE(k.rows() == 5);
      CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
      const int i0 = static_cast<int>(s % 5);
      const auto trace = exact_magnetization_trace(k, model->gamma, times, i0);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double pf = product_formula_magnetization(k, model->gamma, times[i], i0);
        CHECK(std::abs(trace[i] - pf) < 1e-12);
        CHECK(std::abs(dense_magnetization_oracle(k, model->gamma, times[i], i0) - pf) < 1e-10);
      }
    }
  }
  CHECK_THROWS_AS(exact_magnetization(Eigen::MatrixXd::Zero(13, 13), 1.0, 1.0, 0), ResourceLimit);
}

TEST_CASE("nearest-neighbour couplings vanish beyond distance one") {
  DisorderedEmchModel m;
  m.kernel = InteractionKernel::nearest_neighbor(2);
  m.volume_half_width = 1;
  const auto sites = volume_sites(2, 1);
  CHECK(sites.size() == 9);
  const auto k = volume_couplings(m, 3, 0);
  for (std::size_t a = 0; a < sites.size(); ++a) {
    for (std::size_t b = 0; b < sites.size(); ++b) {
      const int dist = std::abs(sites[a][0] - sites[b][0]) + std::abs(sites[a][1] - sites[b][1]);
      const double v = k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (dist == 1) {
        CHECK(std::abs(v) == 1.0);
      } else {
        CHECK(v == 0.0);
      }
    }
  }
}

TEST_CASE("closed forms") {
  const auto bern = CouplingDistribution::bernoulli();
  const auto unif = CouplingDistribution::uniform();
  const auto gauss = CouplingDistribution::gaussian();
  CHECK(closed_form_f(bern, 4, 1.0, kPi / 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(closed_form_f(gauss, 2, 1.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(closed_form_f(unif, 2, 1.0, 1.0) == doctest::Approx(std::pow(std::sin(2.0) / 2.0, 2)).epsilon(1e-14));
  CHECK(closed_form_f(unif, 3, 1.0, 0.0) == 1.0);
  for (const double beta : {0.5, 1.0, 2.0}) {
    for (const double t : {0.1, 0.9, 2.3}) {
      CHECK(closed_form_f(bern, 4, beta, t + kPi / beta) == doctest::Approx(closed_form_f(bern, 4, beta, t)).epsilon(1e-12));
    }
  }
  for (const double t : {0.2, 1.1, 3.0}) {
    CHECK(printed_form_f(bern, 3, 1.0, t) == doctest::Approx(closed_form_f(bern, 3, 1.0, t)).epsilon(1e-14));
    CHECK(printed_form_f(unif, 3, 1.0, t) == doctest::Approx(closed_form_f(unif, 3, 1.0, t)).epsilon(1e-12));
    // The printed Gaussian form assumes unit-variance couplings.
    CHECK(printed_form_f(gauss, 3, 1.0, t) ==
          doctest::Approx(closed_form_f(CouplingDistribution::gaussian(1.0), 3, 1.0, t)).epsilon(1e-12));
  }
  const auto trace = closed_form_trace(gauss, 2, 1.0, 1.0, std::vector<double>{0.0, 1.0});
  CHECK(trace.values[0] == delta_of_gamma(1.0));
  CHECK(trace.std_error[1] == 0.0);
}

TEST_CASE("Monte Carlo agrees with the closed forms") {
  const auto times = grid(0.0, 5.0, 26);
  for (const auto& dist :
       {CouplingDistribution::bernoulli(), CouplingDistribution::uniform(), CouplingDistribution::gaussian()}) {
    const auto mc = mc_average_f(dist, 4, 1.0, 1.0, times, 20000, 31);
    const auto exact = closed_form_trace(dist, 4, 1.0, 1.0, times);
    // 26 correlated points, so a family-wise 4 sigma band.
    for (std::size_t i = 0; i < times.size(); ++i) {
      CHECK(std::abs(mc.values[i] - exact.values[i]) <= 4.0 * mc.std_error[i] + 1e-12);
    }
  }
  CHECK_THROWS_AS(mc_average_f(CouplingDistribution::uniform(), 4, 1.0, 1.0, times, 10, 1), InvalidArgument);
}

TEST_CASE("Monte Carlo standard error scales as one over root n") {
  const std::vector<double> t{0.7};
  const auto dist = CouplingDistribution::uniform();
  const auto small = mc_average_f(dist, 2, 1.0, 1.0, t, 10000, 2);
  const auto large = mc_average_f(dist, 2, 1.0, 1.0, t, 40000, 2);
  CHECK(small.std_error[0] / large.std_error[0] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("Monte Carlo coverage over independent seeds") {
  const std::vector<double> t{0.9};
  const auto dist = CouplingDistribution::gaussian();
  const double exact = closed_form_trace(dist, 2, 1.0, 1.0, t).values[0];
  int inside = 0;
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    const auto mc = mc_average_f(dist, 2, 1.0, 1.0, t, 2000, seed);
    if (std::abs(mc.values[0] - exact) <= 3.0 * mc.std_error[0]) ++inside;
  }
  CHECK(inside >= 48);
}

TEST_CASE("decay classes of the closed-form traces") {
  const auto times = grid(0.0, 10.0, 100);
  CHECK(decay_classify(closed_form_trace(CouplingDistribution::bernoulli(), 4, 1.0, 1.0, times)).decay_class ==
        DecayClass::kAlmostPeriodic);
  const auto power = decay_classify(closed_form_trace(CouplingDistribution::uniform(), 4, 1.0, 1.0, times));
  CHECK(power.decay_class == DecayClass::kPowerLaw);
  CHECK(power.power_exponent == doctest::Approx(-4.0).epsilon(0.15));
  const auto gauss = decay_classify(closed_form_trace(CouplingDistribution::gaussian(), 4, 1.0, 1.0, times));
  CHECK(gauss.decay_class == DecayClass::kGaussianLike);
  CHECK(gauss.gaussian_rate == doctest::Approx(4.0).epsilon(0.05));
  CHECK(std::string(decay_class_name(DecayClass::kPowerLaw)) == "POWER_LAW");
}

TEST_CASE("kernel summability and stability") {
  CHECK(InteractionKernel::nearest_neighbor(2).summability() == Summability::kL1);
  CHECK(InteractionKernel::exponential(3, 0.5).summability() == Summability::kL1);
  CHECK(InteractionKernel::power_law(1, 0.75).summability() == Summability::kL2Only);
  CHECK(InteractionKernel::power_law(2, 1.5).summability() == Summability::kL2Only);
  CHECK(InteractionKernel::power_law(3, 4.0).summability() == Summability::kL1);
  CHECK(InteractionKernel::power_law(1, 0.4).summability() == Summability::kNone);
  CHECK(InteractionKernel::power_law(2, 0.9).summability() == Summability::kNone);

  auto r = stability_classify(InteractionKernel::nearest_neighbor(1), CouplingDistribution::bernoulli());
  CHECK(r.stable);
  CHECK(r.second_kind);
  CHECK(r.exponential_decay_excluded);
  r = stability_classify(InteractionKernel::nearest_neighbor(1), CouplingDistribution::gaussian());
  CHECK_FALSE(r.first_kind);
  CHECK_FALSE(r.second_kind);
  r = stability_classify(InteractionKernel::power_law(1, 0.75), CouplingDistribution::uniform());
  CHECK(r.kernel_class == Summability::kL2Only);
  CHECK(r.stable);
  CHECK_FALSE(r.second_kind);
  CHECK_FALSE(r.rationale.empty());
}

TEST_CASE("finite-volume spatial average") {
  DisorderedEmchModel model;
  model.kernel = InteractionKernel::nearest_neighbor(1);
  model.distribution = CouplingDistribution::bernoulli();
  model.volume_half_width = 500;
  const auto times = grid(0.0, 3.0, 16);
  const auto avg = finite_volume_average_f(model, times, 4);
  CHECK(avg.sites == 1001);
  CHECK(avg.trace.values[0] == doctest::Approx(delta_of_gamma(1.0)).epsilon(1e-14));
  // Bernoulli couplings give cos^2 exactly, so there is no spatial noise.
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = closed_form_trace(model.distribution, 2, 1.0, 1.0, times).values[i];
    CHECK(std::abs(avg.trace.values[i] - expected) <= 3.0 / std::sqrt(1001.0));
  }

  model.distribution = CouplingDistribution::uniform();
  model.kernel = InteractionKernel::nearest_neighbor(2);
  model.volume_half_width = 20;
  const auto a = finite_volume_average_f(model, times, 1);
  const auto b = finite_volume_average_f(model, times, 2);
  const auto exact = closed_form_trace(model.distribution, 4, 1.0, 1.0, times);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double combined = std::hypot(a.trace.std_error[i], b.trace.std_error[i]);
    CHECK(std::abs(a.trace.values[i] - b.trace.values[i]) <= 4.0 * combined + 1e-12);
    CHECK(std::abs(a.trace.values[i] - exact.values[i]) <= 4.0 * a.trace.std_error[i] + 1e-12);
  }
  CHECK(finite_volume_average_f(model, times, 1).trace.values == a.trace.values);

  model.kernel = InteractionKernel::power_law(1, 2.0);
  CHECK_THROWS_AS(finite_volume_average_f(model, times, 1), InvalidArgument);
}
