#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

#include "qdlab/ea_spin_glass.hpp"
#include "qdlab/emch_radin.hpp"
#include "qdlab/ensembles.hpp"
#include "qdlab/errors.hpp"
#include "qdlab/kronecker.hpp"
#include "qdlab/parallel.hpp"
#include "qdlab/rng.hpp"
#include "qdlab/sparse_jacobi.hpp"
#include "qdlab/spectral_dynamics.hpp"

#ifndef QDLAB_VERSION
#define QDLAB_VERSION "unknown"
#endif

namespace qdlab::cli {

namespace fs = std::filesystem;

CsvWriter RunContext::csv(const std::string& name, const std::vector<std::string>& comments,
                          std::vector<std::string> columns) {
  outputs.push_back(name);
  return CsvWriter(out_dir_ / name, comments, std::move(columns));
}

std::string Command::name() const {
  std::string s;
  for (const auto& p : path) s += (s.empty() ? "" : " ") + p;
  return s;
}

namespace {

using PT = ParamType;

std::vector<ParamSpec> operator+(std::vector<ParamSpec> a, const std::vector<ParamSpec>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

const std::vector<ParamSpec> kSparseParams = {
    {"beta", PT::kInt, 2, "gap growth base (integer >= 2)"},
    {"v", PT::kDouble, 0.9, "bump height, 0 < v < 1"},
    {"phi", PT::kDouble, 0.0, "boundary phase in [0, pi)"},
    {"bumps", PT::kInt, 20, "number of bumps"},
};

const std::vector<ParamSpec> kTimeGrid = {
    {"tmin", PT::kDouble, 0.0, "first time"},
    {"tmax", PT::kDouble, 10.0, "last time"},
    {"points", PT::kInt, 100, "number of grid points"},
};

SparseModelParams sparse_params(const RunContext& ctx) {
  SparseModelParams p;
  p.beta_base = static_cast<int>(ctx.params.integer("beta"));
  p.v = ctx.params.real("v");
  p.phi = ctx.params.real("phi");
  p.max_bump_index = static_cast<int>(ctx.params.integer("bumps"));
  p.seed = ctx.seed;
  p.validate();
  return p;
}

std::vector<double> linear_grid(const RunContext& ctx) {
  const double lo = ctx.params.real("tmin");
  const double hi = ctx.params.real("tmax");
  const auto n = ctx.params.integer("points");
  require(n >= 2, "points must be >= 2");
  require(hi > lo, "tmax must exceed tmin");
  std::vector<double> t(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

std::vector<double> horizon_grid(const RunContext& ctx) {
  const auto n = ctx.params.integer("points");
  require(n >= 2, "points must be >= 2");
  return log_grid(ctx.params.real("tmin"), ctx.params.real("tmax"), static_cast<std::size_t>(n));
}

std::vector<double> unit_vector(std::int64_t n, std::int64_t site) {
  require(site >= 0 && site < n, "site must lie in [0, n)");
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  e[static_cast<std::size_t>(site)] = 1.0;
  return e;
}

std::string interval_note(const Interval& iv) {
  return iv.is_empty ? "empty" : "[" + format_double(iv.lo) + ", " + format_double(iv.hi) + "]";
}

// ---------------------------------------------------------------- sparse

void run_spectrum(RunContext& ctx) {
  const auto sp = sparse_params(ctx);
  const auto n = ctx.params.integer("n");
  ClassifyOptions opts;
  opts.max_denominator = static_cast<int>(ctx.params.integer("max_denominator"));
  const auto pot = build_potential(sp);
  const auto eig = truncated_spectrum(pot, n, sp.phi);
  const auto edges = mobility_edges(sp.v, sp.beta_base);

  auto out = ctx.csv("spectrum.csv",
                     {"qdlab spectrum: eigenvalues of the sparse Jacobi operator truncated to n sites",
                      "criterion = (beta - 1) * (4 - lambda^2) / v^2; SC where > 1, PP where < 1",
                      "mobility edges lambda_pm = pm sqrt(4 - v^2 / (beta - 1))",
                      "participation_ratio = (sum_x psi(x)^2)^2 / sum_x psi(x)^4",
                      "eigenvalues pushed outside [-2, 2] by the bumps are labelled OUTSIDE_BAND"},
                     {"index", "lambda", "classification", "criterion", "participation_ratio"});
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double lambda = eig.values(k);
    const double pr = participation_ratio(eig.vectors.col(k));
    if (std::abs(lambda) > 2.0) {
      out.row({static_cast<std::int64_t>(k), lambda, std::string("OUTSIDE_BAND"), std::nan(""), pr});
      continue;
    }
    const auto c = classify_energy(lambda, sp.v, sp.beta_base, opts);
    out.row({static_cast<std::int64_t>(k), lambda, std::string(region_label(c.label)), c.criterion_value, pr});
  }
  ctx.summary["mobility_edges"] = {{"lower", edges.lower}, {"upper", edges.upper},
                                   {"sc_window_empty", edges.sc_window_empty}};
  ctx.summary["bumps_inside_box"] =
      std::count_if(pot.positions.begin(), pot.positions.end(), [&](std::int64_t x) { return x < n; });
}

void run_prufer(RunContext& ctx) {
  const auto sp = sparse_params(ctx);
  const double lambda = ctx.params.real("lambda");
  const auto pot = build_potential(sp);
  const auto traj = prufer_evolve(lambda, pot, sp.phi);
  const double v = sp.v;
  const double gamma = 0.5 * std::log1p(v * v / (4.0 - lambda * lambda));

  auto out = ctx.csv("prufer.csv",
                     {"qdlab prufer: Prufer radius and angle just after each bump",
                      "lambda = 2 cos(alpha); radius = |F(alpha) (u(m+1), u(m))|, F = [[1, -cos alpha], [0, sin alpha]]",
                      "mean_log_growth = log(radius / initial_radius) / bump, expected 0.5 log(1 + v^2 / (4 - lambda^2))"},
                     {"bump", "position", "radius", "log_radius", "phase", "mean_log_growth"});
  for (std::size_t j = 0; j < traj.radii.size(); ++j) {
    const double r = traj.radii[j];
    out.row({static_cast<std::int64_t>(j + 1), pot.positions[j], r, std::log(r), traj.phases[j],
             std::log(r / traj.initial_radius) / static_cast<double>(j + 1)});
  }
  ctx.summary["alpha"] = traj.angle;
  ctx.summary["expected_log_growth_per_bump"] = gamma;
  ctx.summary["classification"] = region_label(classify_energy(lambda, v, sp.beta_base).label);
}

void run_cesaro(RunContext& ctx) {
  const auto sp = sparse_params(ctx);
  const auto n = ctx.params.integer("n");
  const auto pot = build_potential(sp);
  const auto eig = truncated_spectrum(pot, n, sp.phi);
  const auto psi = unit_vector(n, ctx.params.integer("site"));
  const auto mu = spectral_measure(eig, psi);
  const auto series = cesaro_series(mu, horizon_grid(ctx));
  const auto fit = fit_decay_exponent(series);

  auto out = ctx.csv("cesaro.csv",
                     {"qdlab cesaro: time-averaged return probability of delta_site",
                      "cesaro(T) = (1/T) int_0^T |<delta, e^{-iHt} delta>|^2 dt = sum_jk w_j w_k sin((E_j - E_k) T) / ((E_j - E_k) T)"},
                     {"T", "cesaro"});
  for (std::size_t i = 0; i < series.horizons.size(); ++i) out.row({series.horizons[i], series.values[i]});
  auto fit_out = ctx.csv("cesaro-fit.csv",
                         {"qdlab cesaro: log-log fit cesaro(T) ~ C T^-exponent",
                          "wiener_limit = sum_j w_j^2, the T -> infinity limit"},
                         {"exponent", "intercept", "residual", "atoms", "wiener_limit"});
  fit_out.row({fit.exponent, fit.intercept, fit.residual, static_cast<std::uint64_t>(mu.size()),
               mu.sum_squared_weights()});
}

// ---------------------------------------------------------------- cantor

void run_cantor(RunContext& ctx) {
  const int depth = static_cast<int>(ctx.params.integer("depth"));
  const int identity_depth = static_cast<int>(ctx.params.integer("identity_depth"));
  const auto nmax = ctx.params.integer("nmax");
  require(nmax >= 1, "nmax must be >= 1");

  auto id = ctx.csv("cantor-identity.csv",
                    {"qdlab cantor: transform of the middle-thirds Cantor measure",
                     "gamma(u) = prod_{k=1..depth} cos(2 pi u / 3^k); self-similarity gamma(n) = gamma(3n)"},
                    {"n", "gamma_n", "gamma_3n", "abs_diff"});
  double worst = 0.0;
  for (std::int64_t n = 1; n <= nmax; ++n) {
    const double a = cantor_transform(static_cast<double>(n), identity_depth);
    const double b = cantor_transform(3.0 * static_cast<double>(n), identity_depth);
    worst = std::max(worst, std::abs(a - b));
    id.row({n, a, b, std::abs(a - b)});
  }

  const auto mu = cantor_measure(depth);
  const auto series = cesaro_series(mu, horizon_grid(ctx));
  const auto fit = fit_decay_exponent(series);
  auto out = ctx.csv("cantor-cesaro.csv",
                     {"qdlab cantor: Cesaro average of |gamma|^2 for the depth-limited Cantor measure"},
                     {"T", "cesaro"});
  for (std::size_t i = 0; i < series.horizons.size(); ++i) out.row({series.horizons[i], series.values[i]});
  const double expected = std::log(2.0) / std::log(3.0);
  auto fit_out = ctx.csv("cantor-fit.csv",
                         {"qdlab cantor: fitted decay exponent against the dimension log 2 / log 3"},
                         {"exponent", "expected", "deviation", "residual", "atoms"});
  fit_out.row({fit.exponent, expected, fit.exponent - expected, fit.residual, static_cast<std::uint64_t>(mu.size())});
  ctx.summary["max_identity_deviation"] = worst;
}

// ---------------------------------------------------------------- kronecker

void run_kronecker(RunContext& ctx) {
  const auto sp = sparse_params(ctx);
  const double theta = ctx.params.real("theta");
  const auto n = ctx.params.integer("n");
  const auto kp = KroneckerParams::make(sp, theta);
  WindowOptions wopts;
  wopts.a = ctx.params.optional_real("a");
  const auto windows = coupled_windows(sp.v, sp.beta_base, theta, wopts);

  auto w = ctx.csv("kronecker-windows.csv",
                   {"qdlab kronecker: spectral windows of H1 + theta H2 on l2(N^2)",
                    "band = [-2(1 + theta), 2(1 + theta)]; PP windows lie outside lambda_pm (1 + theta)"},
                   {"window", "lo", "hi", "empty"});
  const std::pair<const char*, const Interval*> rows[] = {{"band", &windows.band},
                                                          {"pp_lower", &windows.pp_lower},
                                                          {"pp_upper", &windows.pp_upper},
                                                          {"central", &windows.central},
                                                          {"ac_candidate", &windows.ac_candidate}};
  for (const auto& [name, iv] : rows) {
    w.row({std::string(name), iv->is_empty ? std::nan("") : iv->lo, iv->is_empty ? std::nan("") : iv->hi,
           iv->is_empty});
  }

  const auto psi = unit_vector(n, 0);
  const auto mu1 = spectral_measure(truncated_spectrum(kp.realization_1, n, sp.phi), psi);
  const auto mu2 = spectral_measure(truncated_spectrum(kp.realization_2, n, sp.phi), psi);
  const auto sat = l2_saturation_test(mu1, mu2, theta, horizon_grid(ctx));
  auto s = ctx.csv("kronecker-saturation.csv",
                   {"qdlab kronecker: I(T) = int_0^T |f1(t) f2(theta t)|^2 dt for delta_0 spectral measures"},
                   {"T", "integral"});
  for (std::size_t i = 0; i < sat.horizons.size(); ++i) s.row({sat.horizons[i], sat.integrals[i]});
  auto f = ctx.csv("kronecker-saturation-fit.csv",
                   {"qdlab kronecker: slope of I(T) over the last decade; normalized by (mass1 mass2)^2"},
                   {"slope", "normalized_slope", "label"});
  f.row({sat.slope, sat.normalized_slope, std::string(saturation_label(sat.label))});

  ctx.summary["hypothesis_violated"] = windows.hypothesis_violated;
  ctx.summary["theta_near_rational"] = windows.theta_near_rational;
  ctx.summary["sc_unknown"] = windows.sc_unknown;
  ctx.summary["diagnostic"] = windows.diagnostic;
  ctx.summary["central"] = interval_note(windows.central);
}

// ---------------------------------------------------------------- ea

Anisotropy anisotropy(const RunContext& ctx) {
  return {ctx.params.real("ax"), ctx.params.real("ay"), ctx.params.real("az")};
}

QuantumSolver parse_solver(const std::string& s) {
  if (s == "auto") return QuantumSolver::kAuto;
  if (s == "dense") return QuantumSolver::kDense;
  if (s == "lanczos") return QuantumSolver::kLanczos;
  throw InvalidArgument("solver must be auto, dense or lanczos, got '" + s + "'");
}

void run_ea_ground_state(RunContext& ctx) {
  const Lattice lat(static_cast<int>(ctx.params.integer("d")), static_cast<int>(ctx.params.integer("side")),
                    parse_boundary(ctx.params.text("boundary")));
  const auto dist = CouplingDistribution::parse(ctx.params.text("dist"));
  const auto inst = EAInstance::sample(lat, dist, ctx.seed, ctx.params.unsigned_integer("sample"), anisotropy(ctx));
  const double n = lat.site_count();

  auto out = ctx.csv("ea-ground-state.csv",
                     {"qdlab ea ground-state: H = sum_<ij> J_ij (ax sx_i sx_j + ay sy_i sy_j + az sz_i sz_j)",
                      "classical case (ax, ay, az) = (0, 0, 1) by exhaustive Gray-code enumeration",
                      "degeneracy counts sigma and -sigma separately; witness lists sigma_i as +/-"},
                     {"mode", "sites", "bonds", "energy", "energy_per_site", "degeneracy", "degeneracy_mod_flip",
                      "witness"});
  if (inst.anisotropy.is_classical()) {
    const auto gs = ground_state_exhaustive(inst);
    std::string witness;
    for (const auto s : gs.witness) witness += s > 0 ? '+' : '-';
    out.row({std::string("classical"), static_cast<std::int64_t>(n), static_cast<std::uint64_t>(lat.bonds().size()),
             gs.energy, gs.energy / n, gs.degeneracy, gs.degeneracy_mod_flip, witness});
  } else {
    const double e = quantum_ground_energy(inst, parse_solver(ctx.params.text("solver")));
    out.row({std::string("quantum"), static_cast<std::int64_t>(n), static_cast<std::uint64_t>(lat.bonds().size()), e,
             e / n, std::string(""), std::string(""), std::string("")});
  }
}

double mean_abs_coupling(const CouplingDistribution& dist) {
  switch (dist.kind()) {
    case DistributionKind::kBernoulli:
      return 1.0;
    case DistributionKind::kUniform:
      return 0.5;
    case DistributionKind::kGaussian:
      return std::sqrt(2.0 * dist.variance() / std::numbers::pi);
  }
  return 0.0;
}

void run_ea_cluster_bound(RunContext& ctx) {
  const int d = static_cast<int>(ctx.params.integer("d"));
  const auto dist = CouplingDistribution::parse(ctx.params.text("dist"));
  const auto b = cluster_lower_bound(d, dist, {ctx.params.unsigned_integer("samples"), ctx.seed});
  const double ideal = d * mean_abs_coupling(dist);

  auto out = ctx.csv("ea-cluster-bound.csv",
                     {"qdlab ea cluster-bound: e_d = c_d Av(ground energy of the side-2 cluster), c_2 = 1/2, c_3 = 1/4",
                      "per-site energy of any finite volume is bounded below by e_d",
                      "misfit = (ideal - |e_d|) / ideal with ideal = d E|J|",
                      "exact is the unreduced ratio c_d * sum / configurations when enumerated"},
                     {"d", "distribution", "c_d", "exact", "exact_reduced", "e0_d", "per_site_bound", "std_error",
                      "coupling_configs", "spin_configs", "ideal", "misfit"});
  out.row({static_cast<std::int64_t>(d), dist.name(), b.c_d.str(), b.exact ? b.exact->str() : std::string(""),
           b.exact ? b.exact->reduced().str() : std::string(""), b.e0_d, b.per_site_bound, b.std_error,
           b.coupling_configs, b.spin_configs, ideal, misfit(ideal, -b.per_site_bound)});
}

void run_ea_scan(RunContext& ctx) {
  ScanConfig cfg;
  cfg.dimension = static_cast<int>(ctx.params.integer("d"));
  cfg.sides = ctx.params.int_list("sides");
  cfg.samples = ctx.params.unsigned_integer("samples");
  cfg.distribution = CouplingDistribution::parse(ctx.params.text("dist"));
  cfg.seed = ctx.seed;
  cfg.max_sites = static_cast<int>(ctx.params.integer("max_sites"));
  const auto rows = energy_density_scan(cfg);

  auto out = ctx.csv("ea-scan.csv",
                     {"qdlab ea scan: disorder-averaged classical ground energy per site",
                      "bound_ok = mean_per_site >= cluster_bound - 3 std_error; boundary_gap = |free - periodic|"},
                     {"side", "boundary", "sites", "bonds", "samples", "mean_per_site", "std_error", "cluster_bound",
                      "bound_ok", "boundary_gap"});
  for (const auto& r : rows) {
    out.row({static_cast<std::int64_t>(r.side), std::string(boundary_name(r.boundary)),
             static_cast<std::int64_t>(r.sites), static_cast<std::int64_t>(r.bonds), r.samples, r.mean_per_site,
             r.std_error, r.cluster_bound, r.bound_ok, r.boundary_gap});
  }
}

// ---------------------------------------------------------------- emch

InteractionKernel make_kernel(const RunContext& ctx) {
  const int d = static_cast<int>(ctx.params.integer("d"));
  const auto& kind = ctx.params.text("kernel");
  if (kind == "nearest_neighbor") return InteractionKernel::nearest_neighbor(d);
  if (kind == "power_law") return InteractionKernel::power_law(d, ctx.params.real("kernel_param"));
  if (kind == "exponential") return InteractionKernel::exponential(d, ctx.params.real("kernel_param"));
  throw InvalidArgument("kernel must be nearest_neighbor, power_law or exponential, got '" + kind + "'");
}

void write_decay(CsvWriter& out, const std::string& source, const DecayReport& r) {
  out.row({source, std::string(decay_class_name(r.decay_class)), r.power_exponent, r.power_r2, r.gaussian_rate,
           r.gaussian_r2, static_cast<std::uint64_t>(r.fit_points)});
}

void run_emch_trace(RunContext& ctx) {
  const auto dist = CouplingDistribution::parse(ctx.params.text("dist"));
  const int z = static_cast<int>(ctx.params.integer("z"));
  const double beta = ctx.params.real("beta");
  const double gamma = ctx.params.real("gamma");
  DisorderedEmchModel model;
  model.distribution = dist;
  model.beta_coupling = beta;
  model.gamma = gamma;
  model.validate();
  const auto times = linear_grid(ctx);
  const auto exact = closed_form_trace(dist, z, beta, gamma, times);
  const auto mc = mc_average_f(dist, z, beta, gamma, times, ctx.params.unsigned_integer("samples"), ctx.seed);
  const double delta = delta_of_gamma(gamma);

  auto out = ctx.csv("emch-trace.csv",
                     {"qdlab emch trace: disorder-averaged <sx>(t) = delta [E cos(2 beta J t)]^z, delta = -tanh(gamma)",
                      "printed_form = delta times cos(2 beta t)^z, (sin(2 beta t) / (2 t))^z or exp(-2 z t^2)",
                      "mc_mean averages delta prod_{i=1..z} cos(2 beta J_i t) over independent draws"},
                     {"t", "closed_form", "printed_form", "mc_mean", "mc_stderr"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.row({times[i], exact.values[i], delta * printed_form_f(dist, z, beta, times[i]), mc.values[i],
             mc.std_error[i]});
  }
  auto decay = ctx.csv("emch-trace-decay.csv",
                       {"qdlab emch trace: envelope classification of |f(t)|",
                        "power fit log|f| ~ p log t; gaussian fit log|f| ~ -rate t^2"},
                       {"source", "class", "power_exponent", "power_r2", "gaussian_rate", "gaussian_r2", "fit_points"});
  write_decay(decay, "closed_form", decay_classify(exact));
  write_decay(decay, "monte_carlo", decay_classify(mc));
}

void run_emch_exact(RunContext& ctx) {
  DisorderedEmchModel model;
  model.kernel = make_kernel(ctx);
  model.distribution = CouplingDistribution::parse(ctx.params.text("dist"));
  model.beta_coupling = ctx.params.real("beta");
  model.gamma = ctx.params.real("gamma");
  model.volume_half_width = static_cast<int>(ctx.params.integer("half_width"));
  model.validate();
  const auto k = volume_couplings(model, ctx.seed, ctx.params.unsigned_integer("sample"));
  const int spins = static_cast<int>(k.rows());
  auto i0 = ctx.params.integer("i0");
  if (i0 < 0) i0 = spins / 2;
  require(i0 < spins, "i0 must lie inside the volume");
  const auto times = linear_grid(ctx);
  const auto exact = exact_magnetization_trace(k, model.gamma, times, static_cast<int>(i0));

  auto out = ctx.csv("emch-exact.csv",
                     {"qdlab emch exact: <sx_i0>(t) for H = sum_{j<k} K_jk sz_j sz_k, K = beta J eps, on a finite volume",
                      "exact evolves the full density matrix; product_formula = delta prod_k cos(2 t K_{i0 k})"},
                     {"t", "exact", "product_formula", "abs_diff"});
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double pf = product_formula_magnetization(k, model.gamma, times[i], static_cast<int>(i0));
    worst = std::max(worst, std::abs(exact[i] - pf));
    out.row({times[i], exact[i], pf, std::abs(exact[i] - pf)});
  }
  ctx.summary["spins"] = spins;
  ctx.summary["i0"] = i0;
  ctx.summary["max_abs_diff"] = worst;
}

void run_emch_stability(RunContext& ctx) {
  const auto kernel = make_kernel(ctx);
  const auto dist = CouplingDistribution::parse(ctx.params.text("dist"));
  const auto r = stability_classify(kernel, dist);
  auto out = ctx.csv("emch-stability.csv",
                     {"qdlab emch stability: summability of eps and support of the coupling law",
                      "first_kind: couplings bounded; second_kind: bounded couplings and sum eps < infinity"},
                     {"kernel", "distribution", "summability", "stable", "first_kind", "second_kind",
                      "exponential_decay_excluded", "rationale"});
  out.row({kernel.description(), dist.name(), std::string(summability_name(r.kernel_class)), r.stable, r.first_kind,
           r.second_kind, r.exponential_decay_excluded, r.rationale});
}

void run_emch_average(RunContext& ctx) {
  DisorderedEmchModel model;
  model.kernel = InteractionKernel::nearest_neighbor(static_cast<int>(ctx.params.integer("d")));
  model.distribution = CouplingDistribution::parse(ctx.params.text("dist"));
  model.beta_coupling = ctx.params.real("beta");
  model.gamma = ctx.params.real("gamma");
  model.volume_half_width = static_cast<int>(ctx.params.integer("half_width"));
  const auto times = linear_grid(ctx);
  const auto avg = finite_volume_average_f(model, times, ctx.seed, ctx.params.unsigned_integer("stride"));
  const auto exact =
      closed_form_trace(model.distribution, model.kernel.coordination(), model.beta_coupling, model.gamma, times);

  auto out = ctx.csv("emch-average.csv",
                     {"qdlab emch average: spatial average over [-n, n]^d of one disorder realization",
                      "std_error includes the covariance of neighbouring sites sharing a bond",
                      "closed_form = delta [E cos(2 beta J t)]^(2d)"},
                     {"t", "average", "std_error", "closed_form"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    out.row({times[i], avg.trace.values[i], avg.trace.std_error[i], exact.values[i]});
  }
  ctx.summary["sites"] = avg.sites;
}

// ---------------------------------------------------------------- ensemble

void run_ensemble_check(RunContext& ctx) {
  const auto dist = CouplingDistribution::parse(ctx.params.text("dist"));
  const auto samples = ctx.params.unsigned_integer("samples");
  const int nmax = static_cast<int>(ctx.params.integer("nmax"));
  auto bins = static_cast<std::size_t>(ctx.params.integer("bins"));
  require(samples >= 100, "samples must be >= 100");
  require(bins >= 2, "bins must be >= 2");
  require(nmax >= 1, "nmax must be >= 1");

  std::vector<double> x(samples);
  parallel_for(samples, [&](std::size_t i) {
    CounterRng stream(ctx.seed, StreamPurpose::kEnsembleCheck, i);
    x[i] = dist.sample(stream);
  });

  // Histogram edges; Gaussian outer bins extend to infinity.
  double lo = -1.0, hi = 1.0;
  if (dist.kind() == DistributionKind::kBernoulli) {
    bins = 2;
    lo = -2.0;
    hi = 2.0;
  } else if (dist.kind() == DistributionKind::kGaussian) {
    lo = -4.0 * std::sqrt(dist.variance());
    hi = -lo;
  }
  const bool open_tails = dist.kind() == DistributionKind::kGaussian;
  std::vector<double> edges(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
  std::vector<std::uint64_t> counts(bins, 0);
  for (const double v : x) {
    auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
    b = std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    ++counts[static_cast<std::size_t>(b)];
  }
  auto hist = ctx.csv("ensemble-histogram.csv",
                      {"qdlab ensemble check: observed counts against samples * (F(hi) - F(lo))"},
                      {"bin_lo", "bin_hi", "observed", "expected"});
  double chi2 = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = (open_tails && b == 0) ? -INFINITY : edges[b];
    const double c = (open_tails && b + 1 == bins) ? INFINITY : edges[b + 1];
    const double fa = std::isinf(a) ? 0.0 : dist.cdf(a);
    const double fc = std::isinf(c) ? 1.0 : dist.cdf(c);
    const double expected = static_cast<double>(samples) * (fc - fa);
    chi2 += (static_cast<double>(counts[b]) - expected) * (static_cast<double>(counts[b]) - expected) / expected;
    hist.row({a, c, counts[b], expected});
  }

  const auto bound = moment_bound_check(dist, nmax);
  auto moments = ctx.csv("ensemble-moments.csv",
                         {"qdlab ensemble check: sample moments E J^n against exact |E J^n|",
                          "bound = n! c^n with the smallest c valid for n <= nmax"},
                         {"n", "exact_abs_moment", "sample_moment", "sample_stderr", "bound"});
  std::vector<double> powers(samples), squares(samples);
  double factorial = 1.0;
  for (int n = 1; n <= nmax; ++n) {
    factorial *= n;
    parallel_for(samples, [&](std::size_t i) {
      powers[i] = std::pow(x[i], n);
      squares[i] = powers[i] * powers[i];
    });
    const double m = pairwise_sum(powers) / static_cast<double>(samples);
    const double m2 = pairwise_sum(squares) / static_cast<double>(samples);
    const double se = std::sqrt(std::max(0.0, m2 - m * m) / static_cast<double>(samples));
    moments.row({static_cast<std::int64_t>(n), dist.abs_moment(n), m, se, factorial * std::pow(bound.c, n)});
  }
  auto summary = ctx.csv("ensemble-summary.csv",
                         {"qdlab ensemble check: chi-square goodness of fit and moment growth constant"},
                         {"distribution", "samples", "chi_square", "dof", "moment_c", "attained_at"});
  summary.row({dist.name(), samples, chi2, static_cast<std::uint64_t>(bins - 1), bound.c,
               static_cast<std::int64_t>(bound.attained_at)});
}

std::vector<Command> build_commands() {
  const std::vector<ParamSpec> emch_common = {
      {"dist", PT::kString, "gaussian", "coupling law: bernoulli, uniform, gaussian, gaussian-unit"},
      {"beta", PT::kDouble, 1.0, "coupling amplitude beta > 0"},
      {"gamma", PT::kDouble, 1.0, "single-site field gamma != 0"},
  };
  const std::vector<ParamSpec> kernel_params = {
      {"kernel", PT::kString, "nearest_neighbor", "nearest_neighbor, power_law or exponential"},
      {"kernel_param", PT::kDouble, 2.0, "power-law exponent or exponential rate"},
      {"d", PT::kInt, 1, "lattice dimension"},
  };
  return {
      {{"spectrum"},
       "classify eigenvalues of the truncated sparse Jacobi operator",
       kSparseParams + std::vector<ParamSpec>{{"n", PT::kInt, 2000, "truncation size"},
                                              {"max_denominator", PT::kInt, 64,
                                               "exclude energies with rational angle of denominator <= this (0 disables)"}},
       run_spectrum},
      {{"prufer"},
       "Prufer radius and phase after each bump",
       kSparseParams + std::vector<ParamSpec>{{"lambda", PT::kDouble, 0.5, "energy in (-2, 2)"}},
       run_prufer},
      {{"cesaro"},
       "Cesaro-averaged return probability of the truncated operator",
       kSparseParams + std::vector<ParamSpec>{{"n", PT::kInt, 1000, "truncation size"},
                                              {"site", PT::kInt, 0, "initial site"},
                                              {"tmin", PT::kDouble, 1.0, "first horizon"},
                                              {"tmax", PT::kDouble, 1e4, "last horizon"},
                                              {"points", PT::kInt, 25, "log-spaced horizons"}},
       run_cesaro},
      {{"cantor"},
       "Cantor measure self-similarity and Cesaro decay",
       {{"depth", PT::kInt, 12, "depth of the atomic Cantor approximation"},
        {"identity_depth", PT::kInt, 60, "product depth for the self-similarity table"},
        {"nmax", PT::kInt, 100, "largest n in the self-similarity table"},
        {"tmin", PT::kDouble, 10.0, "first horizon"},
        {"tmax", PT::kDouble, 1e4, "last horizon"},
        {"points", PT::kInt, 13, "log-spaced horizons"}},
       run_cantor},
      {{"kronecker"},
       "windows and L2 saturation for H1 + theta H2",
       kSparseParams + std::vector<ParamSpec>{{"theta", PT::kDouble, 0.6180339887498949, "coupling ratio in [0, 1]"},
                                              {"a", PT::kOptionalDouble, nullptr, "optional bound constant a"},
                                              {"n", PT::kInt, 60, "truncation size per factor (cost grows as n^4)"},
                                              {"tmin", PT::kDouble, 1.0, "first horizon"},
                                              {"tmax", PT::kDouble, 1e3, "last horizon"},
                                              {"points", PT::kInt, 9, "log-spaced horizons"}},
       run_kronecker},
      {{"ea", "ground-state"},
       "ground state of one Edwards-Anderson instance",
       {{"d", PT::kInt, 2, "lattice dimension"},
        {"side", PT::kInt, 4, "lattice side L"},
        {"boundary", PT::kString, "periodic", "periodic or free"},
        {"dist", PT::kString, "bernoulli", "coupling law"},
        {"sample", PT::kUInt, 0, "disorder sample index"},
        {"ax", PT::kDouble, 0.0, "x anisotropy"},
        {"ay", PT::kDouble, 0.0, "y anisotropy"},
        {"az", PT::kDouble, 1.0, "z anisotropy"},
        {"solver", PT::kString, "auto", "quantum solver: auto, dense or lanczos"}},
       run_ea_ground_state},
      {{"ea", "cluster-bound"},
       "lower bound on the ground energy per site from elementary clusters",
       {{"d", PT::kInt, 2, "dimension 2 or 3"},
        {"dist", PT::kString, "bernoulli", "coupling law"},
        {"samples", PT::kUInt, 20000, "Monte Carlo samples for continuous laws"}},
       run_ea_cluster_bound},
      {{"ea", "scan"},
       "ground energy per site against lattice size",
       {{"d", PT::kInt, 2, "lattice dimension"},
        {"sides", PT::kIntList, json::array({2, 3, 4}), "comma-separated sides"},
        {"samples", PT::kUInt, 200, "disorder samples per size"},
        {"dist", PT::kString, "bernoulli", "coupling law"},
        {"max_sites", PT::kInt, kMaxExhaustiveSites, "enumeration budget in sites"}},
       run_ea_scan},
      {{"emch", "trace"},
       "disorder-averaged magnetization: closed form against Monte Carlo",
       emch_common + std::vector<ParamSpec>{{"z", PT::kInt, 4, "coordination number"},
                                            {"samples", PT::kUInt, 100000, "Monte Carlo samples"}} +
           kTimeGrid,
       run_emch_trace},
      {{"emch", "exact"},
       "dense evolution of a small volume against the product formula",
       emch_common + kernel_params +
           std::vector<ParamSpec>{{"half_width", PT::kInt, 2, "volume [-n, n]^d"},
                                  {"sample", PT::kUInt, 0, "disorder sample index"},
                                  {"i0", PT::kInt, -1, "observed site (-1 for the centre)"},
                                  {"tmin", PT::kDouble, 0.0, "first time"},
                                  {"tmax", PT::kDouble, 10.0, "last time"},
                                  {"points", PT::kInt, 50, "number of grid points"}},
       run_emch_exact},
      {{"emch", "stability"},
       "stability class of a kernel and coupling law",
       std::vector<ParamSpec>{{"dist", PT::kString, "bernoulli", "coupling law"}} + kernel_params,
       run_emch_stability},
      {{"emch", "average"},
       "spatial average of one realization on a large volume",
       emch_common + std::vector<ParamSpec>{{"d", PT::kInt, 1, "lattice dimension"},
                                            {"half_width", PT::kInt, 5000, "volume [-n, n]^d"},
                                            {"stride", PT::kUInt, 1, "average every stride-th site"},
                                            {"tmin", PT::kDouble, 0.0, "first time"},
                                            {"tmax", PT::kDouble, 3.0, "last time"},
                                            {"points", PT::kInt, 50, "number of grid points"}},
       run_emch_average},
      {{"ensemble", "check"},
       "sampling check of a coupling law",
       {{"dist", PT::kString, "gaussian", "coupling law"},
        {"samples", PT::kUInt, 100000, "number of draws"},
        {"bins", PT::kInt, 50, "histogram bins (Bernoulli uses 2)"},
        {"nmax", PT::kInt, 12, "largest moment order"}},
       run_ensemble_check},
  };
}

}  // namespace

const std::vector<Command>& all_commands() {
  static const std::vector<Command> commands = build_commands();
  return commands;
}

const Command* find_command(const std::string& name) {
  for (const auto& c : all_commands()) {
    if (c.name() == name) return &c;
  }
  return nullptr;
}

json execute(const RunRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  const Params params(request.command->params, request.config_params, request.flags);
  std::error_code ec;
  fs::create_directories(request.out_dir, ec);
  require(!ec && fs::is_directory(request.out_dir), "cannot create output directory " + request.out_dir.string());

  RunContext ctx(params, request.seed, request.out_dir);
  request.command->run(ctx);

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest = {
      {"command", request.command->name()},
      {"seed", request.seed},
      {"params", params.as_json()},
      {"version", QDLAB_VERSION},
      {"threads", worker_count()},
      {"wall_time_seconds", seconds},
      {"outputs", ctx.outputs},
      {"summary", ctx.summary},
  };
  std::ofstream out(request.out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest.json");
  return manifest;
}

}  // namespace qdlab::cli
