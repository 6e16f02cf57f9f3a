// Acceptance suite: one PASS/FAIL line per criterion, indented detail lines
// below it. Tolerances and budgets are fixed here; the exit status is the
// number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "qdlab/ea_spin_glass.hpp"
#include "qdlab/emch_radin.hpp"
#include "qdlab/kronecker.hpp"
#include "qdlab/rng.hpp"
#include "qdlab/sparse_jacobi.hpp"
#include "qdlab/spectral_dynamics.hpp"
#include "spin_oracle.hpp"

using namespace qdlab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string num(double x, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return t;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// ------------------------------------------------------------------ criteria

Outcome cluster_bounds() {
  Outcome o;
  struct Case {
    int d;
    const char* exact;
    double value;
    std::uint64_t couplings;
    std::uint64_t spins;
  };
  for (const Case c : {Case{2, "-48/32", -1.5, 16, 16}, Case{3, "-36096/16384", -2.203125, 4096, 256}}) {
    const auto start = std::chrono::steady_clock::now();
    const auto b = cluster_lower_bound(c.d, CouplingDistribution::bernoulli());
    const double t = seconds_since(start);
    const std::string got = b.exact ? b.exact->str() : "none";
    o.check(got == c.exact && b.per_site_bound == c.value,
            "d=" + std::to_string(c.d) + ": " + got + " = " + num(b.per_site_bound, 17) + " (want " + c.exact + ")");
    o.check(b.coupling_configs == c.couplings && b.spin_configs == c.spins,
            "d=" + std::to_string(c.d) + ": " + std::to_string(b.coupling_configs) + " coupling and " +
                std::to_string(b.spin_configs) + " spin configurations");
    o.check(t < 1.0, "d=" + std::to_string(c.d) + ": " + num(t, 3) + " s < 1 s");
  }
  o.check(cluster_lower_bound(2, CouplingDistribution::bernoulli()).exact->reduced().str() == "-3/2",
          "d=2 reduces to -3/2");
  return o;
}

Outcome misfit_values() {
  Outcome o;
  const double m2 = misfit(2.0, 1.5);
  const double m3 = misfit(3.0, 2.203125);
  o.check(m2 == 0.25, "misfit(2, 3/2) = " + num(m2, 17));
  o.check(m3 == 0.265625, "misfit(3, 2.203125) = " + num(m3, 17));
  return o;
}

Outcome dense_vs_product_formula() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto times = linspace(0.0, 10.0, 50);
  const CouplingDistribution dists[] = {CouplingDistribution::bernoulli(), CouplingDistribution::uniform(),
                                        CouplingDistribution::gaussian()};
  constexpr int kInstances = 24;
  constexpr int kOracleMaxSpins = 8;
  double worst_library = 0.0, worst_oracle = 0.0;
  int oracle_runs = 0, max_spins = 0;
  for (int i = 0; i < kInstances; ++i) {
    CounterRng rng(2024, StreamPurpose::kRealization, static_cast<std::uint64_t>(i));
    const int n = 2 + i % 11;
    const auto& dist = dists[i % 3];
    const double beta = 0.5 + rng.uniform01();
    const double gamma = 0.2 + 1.5 * rng.uniform01();
    const bool long_range = i % 2 == 1;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        const int r = b - a;
        const double eps = long_range ? std::pow(static_cast<double>(r), -1.5) : (r == 1 ? 1.0 : 0.0);
        k(a, b) = k(b, a) = beta * dist.sample(rng) * eps;
      }
    }
    const int i0 = static_cast<int>(rng.uniform_int(0, n - 1));
    const auto exact = exact_magnetization_trace(k, gamma, times, i0);
    std::vector<double> oracle;
    if (n <= kOracleMaxSpins) {
      oracle = testing::dense_magnetization_oracle(k, gamma, times, i0);
      ++oracle_runs;
    }
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double pf = product_formula_magnetization(k, gamma, times[j], i0);
      worst_library = std::max(worst_library, std::abs(exact[j] - pf));
      if (!oracle.empty()) worst_oracle = std::max(worst_oracle, std::abs(oracle[j] - pf));
    }
    max_spins = std::max(max_spins, n);
  }
  const double t = seconds_since(start);
  o.check(worst_library <= 1e-10, std::to_string(kInstances) + " instances, 2.." + std::to_string(max_spins) +
                                      " spins, 50 times on [0, 10]: max |exact - product| = " + num(worst_library));
  o.check(worst_oracle <= 1e-10, std::to_string(oracle_runs) + " instances with <= " +
                                     std::to_string(kOracleMaxSpins) +
                                     " spins through a Pauli tensor-product eigensolver: max deviation " +
                                     num(worst_oracle));
  o.check(t < 60.0, "runtime " + num(t, 3) + " s < 60 s");
  return o;
}

Outcome mc_cross_validation() {
  Outcome o;
  const auto times = linspace(0.0, 10.0, 100);
  constexpr std::uint64_t kSamples = 100000;
  constexpr std::uint64_t kSeed = 1;
  constexpr double kSigmas = 3.0;
  constexpr double kFloor = 1e-12;
  struct Case {
    CouplingDistribution dist;
    DecayClass expected;
  };
  for (const auto& c : {Case{CouplingDistribution::bernoulli(), DecayClass::kAlmostPeriodic},
                        Case{CouplingDistribution::uniform(), DecayClass::kPowerLaw},
                        Case{CouplingDistribution::gaussian(), DecayClass::kGaussianLike}}) {
    const auto exact = closed_form_trace(c.dist, 4, 1.0, 1.0, times);
    const auto mc = mc_average_f(c.dist, 4, 1.0, 1.0, times, kSamples, kSeed);
    int outside = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double dev = std::abs(mc.values[i] - exact.values[i]);
      const double band = kSigmas * mc.std_error[i] + kFloor;
      if (dev > band) ++outside;
      worst = std::max(worst, dev / std::max(mc.std_error[i], kFloor));
    }
    o.check(outside == 0, c.dist.name() + ": " + std::to_string(outside) +
                              " of 100 points outside 3 sigma (largest deviation " + num(worst, 3) + " sigma)");
    const auto decay = decay_classify(exact);
    o.check(decay.decay_class == c.expected,
            c.dist.name() + ": closed form classified " + decay_class_name(decay.decay_class) + " (power r2 " +
                num(decay.power_r2, 4) + ", gaussian r2 " + num(decay.gaussian_r2, 4) + ")");
    o.note(c.dist.name() + ": Monte Carlo trace classified " + decay_class_name(decay_classify(mc).decay_class));
  }
  return o;
}

Outcome cantor_oracle() {
  Outcome o;
  double worst = 0.0;
  for (int n = 1; n <= 100; ++n) {
    worst = std::max(worst, std::abs(cantor_transform(n, 60) - cantor_transform(3.0 * n, 60)));
  }
  o.check(worst <= 1e-12, "max_n<=100 |gamma(n) - gamma(3n)| at depth 60 = " + num(worst));
  const auto mu = cantor_measure(12);
  const auto fit = fit_decay_exponent(cesaro_series(mu, log_grid(10.0, 1e4, 13)));
  const double target = std::log(2.0) / std::log(3.0);
  o.check(std::abs(fit.exponent - target) <= 0.05, "Cesaro exponent " + num(fit.exponent) + " vs log 2 / log 3 = " +
                                                       num(target) + " (depth 12, T in [10, 1e4])");
  return o;
}

Outcome criterion_consistency() {
  Outcome o;
  constexpr int kTriples = 1000;
  // No rational-angle exclusion and no tolerance band around the edges, so
  // the bisection sees the raw decision boundary.
  ClassifyOptions plain;
  plain.max_denominator = 0;
  plain.edge_tol = 0.0;
  double worst_edge = 0.0, worst_flat = 0.0, worst_cocycle = 0.0;
  int label_mismatch = 0, cocycle_checks = 0;
  for (int i = 0; i < kTriples; ++i) {
    CounterRng rng(77, StreamPurpose::kRealization, static_cast<std::uint64_t>(i));
    const double v = 0.05 + 0.9 * rng.uniform01();
    const int beta = static_cast<int>(rng.uniform_int(2, 6));
    const double lambda = -1.98 + 3.96 * rng.uniform01();
    const auto edges = mobility_edges(v, beta);

    // Bisect the SC/PP switch of classify_energy on [0, 2].
    if (!edges.sc_window_empty) {
      double lo = 0.0, hi = 2.0;
      for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const auto label = classify_energy(mid, v, beta, plain).label;
        (label == SpectralRegion::kSingularContinuous ? lo : hi) = mid;
      }
      worst_edge = std::max(worst_edge, std::abs(lo - edges.upper));
    }
    const auto label = classify_energy(lambda, v, beta, plain).label;
    const double a = std::abs(lambda);
    if (label == SpectralRegion::kSingularContinuous && (edges.sc_window_empty || a >= edges.upper)) ++label_mismatch;
    if (label == SpectralRegion::kPurePoint && !edges.sc_window_empty && a <= edges.upper) ++label_mismatch;

    SparseModelParams p;
    p.beta_base = beta;
    p.v = v;
    p.phi = kPi * rng.uniform01();
    p.max_bump_index = 12;
    p.seed = static_cast<std::uint64_t>(i);
    const auto pot = build_potential(p);
    constexpr std::int64_t kSites = 2000;
    const auto path = prufer_radius_path(lambda, pot, p.phi, kSites);
    for (std::size_t s = 1; s < path.size(); ++s) {
      if (!std::binary_search(pot.positions.begin(), pot.positions.end(), static_cast<std::int64_t>(s))) {
        worst_flat = std::max(worst_flat, std::abs(path[s] / path[s - 1] - 1.0));
      }
    }
    const auto traj = prufer_evolve(lambda, pot, p.phi);
    const Eigen::Matrix2d frame = prufer_frame(traj.angle);
    for (std::size_t j = 0; j < pot.positions.size() && pot.positions[j] < kSites; ++j) {
      const double direct = (frame * direct_transfer(lambda, pot, p.phi, pot.positions[j])).norm();
      worst_cocycle = std::max(worst_cocycle, std::abs(traj.radii[j] / direct - 1.0));
      ++cocycle_checks;
    }
  }
  o.check(worst_edge <= 1e-12, "classification switch vs closed-form mobility edge over " + std::to_string(kTriples) +
                                   " (v, beta) pairs: max gap " + num(worst_edge));
  o.check(label_mismatch == 0, std::to_string(label_mismatch) + " of " + std::to_string(kTriples) +
                                   " random energies labelled against the closed-form edges");
  o.check(worst_flat <= 1e-12, "Prufer radius between bumps, 2000 sites per triple: max relative drift " +
                                   num(worst_flat));
  o.check(worst_cocycle <= 1e-9, std::to_string(cocycle_checks) +
                                     " bump sites: max relative Prufer vs direct-product deviation " +
                                     num(worst_cocycle));
  return o;
}

Outcome localization_signature() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  constexpr int kRealizations = 10;
  constexpr std::int64_t kSize = 2000;
  constexpr double kRequiredRatio = 5.0;
  std::vector<double> pp, sc;
  for (int r = 0; r < kRealizations; ++r) {
    SparseModelParams p;
    p.beta_base = 2;
    p.v = 0.9;
    p.max_bump_index = 20;
    p.seed = static_cast<std::uint64_t>(r);
    const auto pot = build_potential(p);
    const auto eig = truncated_spectrum(pot, kSize, p.phi);
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      const double lambda = eig.values(k);
      if (std::abs(lambda) >= 2.0) continue;
      const auto label = classify_energy(lambda, p).label;
      if (label == SpectralRegion::kPurePoint) pp.push_back(participation_ratio(eig.vectors.col(k)));
      if (label == SpectralRegion::kSingularContinuous) sc.push_back(participation_ratio(eig.vectors.col(k)));
    }
  }
  const double t = seconds_since(start);
  const double ratio = median(sc) / median(pp);
  o.check(ratio >= kRequiredRatio, "beta=2, v=0.9, n=2000, " + std::to_string(kRealizations) +
                                       " realizations: median PR SC " + num(median(sc)) + " / PP " +
                                       num(median(pp)) + " = " + num(ratio, 4) + " (need >= 5)");
  o.note(std::to_string(sc.size()) + " SC and " + std::to_string(pp.size()) + " PP eigenvectors");
  o.check(t < 120.0, "runtime " + num(t, 3) + " s < 120 s");

  const auto horizons = log_grid(1.0, 100.0, 9);
  const auto atom1 = AtomicMeasure::from_atoms({0.3}, {1.0});
  const auto atom2 = AtomicMeasure::from_atoms({-0.8}, {1.0});
  const auto atoms = l2_saturation_test(atom1, atom2, 0.6180339887498949, horizons);
  std::vector<double> s, w;
  double total = 0.0;
  for (int k = 0; k < 60; ++k) {
    s.push_back(-1.0 + 2.0 * (k + 0.5) / 60.0);
    w.push_back(std::pow(std::cos(kPi * s.back() / 2.0), 2));
    total += w.back();
  }
  for (double& x : w) x /= total;
  const auto smooth_measure = AtomicMeasure::from_atoms(s, w);
  const auto smooth = l2_saturation_test(smooth_measure, smooth_measure, 0.6180339887498949, horizons);
  o.check(atoms.normalized_slope > 0.9, "pure atoms: normalized slope " + num(atoms.normalized_slope) + " > 0.9");
  o.check(smooth.normalized_slope < 0.1,
          "smooth proxy (60 atoms): normalized slope " + num(smooth.normalized_slope) + " < 0.1");
  return o;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(QDLAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("qdlab_acceptance_" + std::to_string(::getpid()));
  const std::vector<std::string> runs = {
      "spectrum --n 400",
      "prufer --lambda 0.7",
      "cesaro --n 300",
      "cantor",
      "kronecker --n 30",
      "ea ground-state --side 4",
      "ea ground-state --side 3 --ax 0.3 --ay 0.2",
      "ea cluster-bound --d 3",
      "ea cluster-bound --d 2 --dist gaussian --samples 5000",
      "ea scan --sides 2,3 --samples 50",
      "emch trace --samples 20000",
      "emch exact --kernel power_law --kernel_param 1.5",
      "emch stability --kernel power_law --kernel_param 0.75 --dist uniform",
      "emch average --half_width 1000 --dist uniform",
      "ensemble check",
  };
  int index = 0;
  for (const auto& args : runs) {
    const fs::path a = root / ("a" + std::to_string(index));
    const fs::path b = root / ("b" + std::to_string(index));
    ++index;
    const int ca = run_cli("--seed 7 --out " + a.string() + " " + args);
    const int cb = run_cli("--seed 7 --out " + b.string() + " " + args);
    bool same = ca == 0 && cb == 0;
    std::size_t files = 0;
    if (same) {
      for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        ++files;
        same = same && slurp(entry.path()) == slurp(b / entry.path().filename());
      }
    }
    o.check(same && files > 0, args + ": " + std::to_string(files) + " CSV file(s) byte-identical");
  }
  fs::remove_all(root);
  return o;
}

Outcome self_averaging() {
  Outcome o;
  DisorderedEmchModel model;
  model.kernel = InteractionKernel::nearest_neighbor(1);
  model.distribution = CouplingDistribution::gaussian();
  model.volume_half_width = 5000;
  const auto times = linspace(0.0, 3.0, 31);
  const auto a = finite_volume_average_f(model, times, 1);
  const auto b = finite_volume_average_f(model, times, 2);
  int outside = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double combined = std::hypot(a.trace.std_error[i], b.trace.std_error[i]);
    const double dev = std::abs(a.trace.values[i] - b.trace.values[i]);
    if (dev > 3.0 * combined + 1e-12) ++outside;
    if (combined > 0.0) worst = std::max(worst, dev / combined);
  }
  o.check(a.sites >= 10000, std::to_string(a.sites) + " sites in [-5000, 5000]");
  o.check(outside == 0, "seeds 1 and 2, 31 times on [0, 3]: " + std::to_string(outside) +
                            " points outside combined 3 sigma (largest " + num(worst, 3) + " sigma)");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"EA cluster bounds by exact enumeration", cluster_bounds},
      {"misfit values", misfit_values},
      {"dense evolution matches the product formula", dense_vs_product_formula},
      {"Monte Carlo agrees with the closed forms; decay classes", mc_cross_validation},
      {"Cantor self-similarity and Cesaro exponent", cantor_oracle},
      {"spectral criterion, Prufer radius and cocycle consistency", criterion_consistency},
      {"localization signature and L2 saturation separation", localization_signature},
      {"CLI determinism", cli_determinism},
      {"self-averaging of the finite-volume spatial average", self_averaging},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s  %s  [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.name, seconds_since(start));
    for (const auto& d : o.details) std::printf("      %s\n", d.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed;
}
