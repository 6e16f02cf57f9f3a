#include "qdlab/emch_radin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdlab/errors.hpp"
#include "qdlab/parallel.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {

const char* summability_name(Summability s) {
  switch (s) {
    case Summability::kL1: return "L1";
    case Summability::kL2Only: return "L2_ONLY";
    case Summability::kNone: return "NONE";
  }
  return "?";
}

namespace {

int annulus_levels(int dimension) {
  switch (dimension) {
    case 1: return 16;
    case 2: return 8;
    default: return 5;
  }
}

// Visits every lattice point with 2^k <= |n|_inf < 2^(k+1).
void for_each_in_annulus(int dimension, int k, const std::function<void(std::span<const int>)>& visit) {
  const int inner = 1 << k;
  const int outer = (1 << (k + 1)) - 1;
  std::vector<int> n(static_cast<std::size_t>(dimension), -outer);
  while (true) {
    int sup = 0;
    for (const int x : n) sup = std::max(sup, std::abs(x));
    if (sup >= inner) visit(n);
    std::size_t axis = 0;
    while (axis < n.size() && n[axis] == outer) n[axis++] = -outer;
    if (axis == n.size()) return;
    ++n[axis];
  }
}

bool tail_converges(const std::vector<double>& shells) {
  const double last = shells.back();
  const double before = shells[shells.size() - 2];
  if (last == 0.0) return true;
  if (before == 0.0) return false;
  return last / before < 0.97;
}

}  // namespace

Summability classify_summability(int dimension, const std::function<double(std::span<const int>)>& eps) {
  require(dimension >= 1 && dimension <= 3, "kernel dimension must be 1, 2 or 3");
  const int levels = annulus_levels(dimension);
  std::vector<double> s1, s2;
  for (int k = 0; k <= levels; ++k) {
    double a = 0.0, b = 0.0;
    for_each_in_annulus(dimension, k, [&](std::span<const int> n) {
      const double e = eps(n);
      a += e;
      b += e * e;
    });
    s1.push_back(a);
    s2.push_back(b);
  }
  if (tail_converges(s1)) return Summability::kL1;
  if (tail_converges(s2)) return Summability::kL2Only;
  return Summability::kNone;
}

InteractionKernel::InteractionKernel(int dimension, std::string description, bool nearest_neighbor,
                                     std::function<double(double)> radial)
    : dimension_(dimension),
      description_(std::move(description)),
      nearest_neighbor_(nearest_neighbor),
      radial_(std::move(radial)) {
  require(dimension >= 1 && dimension <= 3, "kernel dimension must be 1, 2 or 3");
  summability_ = classify_summability(dimension_, [this](std::span<const int> n) { return (*this)(n); });
}

InteractionKernel InteractionKernel::nearest_neighbor(int dimension) {
  return InteractionKernel(dimension, "nearest-neighbor", true, nullptr);
}

InteractionKernel InteractionKernel::power_law(int dimension, double exponent) {
  require(exponent > 0.0, "power-law kernel: exponent must be positive");
  return InteractionKernel(dimension, "power-law |n|^-" + std::to_string(exponent), false,
                           [exponent](double r) { return std::pow(r, -exponent); });
}

InteractionKernel InteractionKernel::exponential(int dimension, double rate) {
  require(rate > 0.0, "exponential kernel: rate must be positive");
  return InteractionKernel(dimension, "exponential exp(-" + std::to_string(rate) + " |n|)", false,
                           [rate](double r) { return std::exp(-rate * r); });
}

double InteractionKernel::operator()(std::span<const int> displacement) const {
  require(static_cast<int>(displacement.size()) == dimension_, "kernel: displacement has the wrong dimension");
  if (nearest_neighbor_) {
    int l1 = 0;
    for (const int x : displacement) l1 += std::abs(x);
    return l1 == 1 ? 1.0 : 0.0;
  }
  double r2 = 0.0;
  for (const int x : displacement) r2 += static_cast<double>(x) * x;
  if (r2 == 0.0) return 0.0;
  return radial_(std::sqrt(r2));
}

void DisorderedEmchModel::validate() const {
  require(gamma != 0.0, "gamma must be non-zero (delta = -tanh(gamma) would vanish)");
  require(std::isfinite(gamma), "gamma must be finite");
  require(std::isfinite(beta_coupling) && beta_coupling > 0.0, "beta_coupling must be positive");
  require(volume_half_width >= 0, "volume half width must be >= 0");
}

double delta_of_gamma(double gamma) { return -std::tanh(gamma); }

std::vector<std::vector<int>> volume_sites(int dimension, int half_width) {
  require(dimension >= 1 && dimension <= 3, "volume dimension must be 1, 2 or 3");
  require(half_width >= 0, "volume half width must be >= 0");
  const int side = 2 * half_width + 1;
  std::size_t count = 1;
  for (int k = 0; k < dimension; ++k) count *= static_cast<std::size_t>(side);
  std::vector<std::vector<int>> sites;
  sites.reserve(count);
  std::vector<int> x(static_cast<std::size_t>(dimension), -half_width);
  for (std::size_t i = 0; i < count; ++i) {
    sites.push_back(x);
    for (int axis = dimension - 1; axis >= 0; --axis) {
      auto& c = x[static_cast<std::size_t>(axis)];
      if (c < half_width) {
        ++c;
        break;
      }
      c = -half_width;
    }
  }
  return sites;
}

Eigen::MatrixXd volume_couplings(const DisorderedEmchModel& model, std::uint64_t seed, std::uint64_t sample_index) {
  model.validate();
  const auto sites = volume_sites(model.kernel.dimension(), model.volume_half_width);
  const auto n = static_cast<Eigen::Index>(sites.size());
  require(n <= 4096, "volume_couplings: volume too large for a dense pair matrix");
  CounterRng stream(seed, StreamPurpose::kCoupling, sample_index);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  std::vector<int> diff(static_cast<std::size_t>(model.kernel.dimension()));
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double j = model.distribution.sample(stream);
      for (std::size_t c = 0; c < diff.size(); ++c) {
        diff[c] = sites[static_cast<std::size_t>(a)][c] - sites[static_cast<std::size_t>(b)][c];
      }
      k(a, b) = k(b, a) = model.beta_coupling * j * model.kernel(diff);
    }
  }
  return k;
}

double product_formula_magnetization(const Eigen::MatrixXd& pair_couplings, double gamma, double t, int i0) {
  require(pair_couplings.rows() == pair_couplings.cols(), "pair couplings must be square");
  require(i0 >= 0 && i0 < pair_couplings.rows(), "site i0 outside the volume");
  double value = delta_of_gamma(gamma);
  for (Eigen::Index k = 0; k < pair_couplings.rows(); ++k) {
    if (k != i0) value *= std::cos(2.0 * t * pair_couplings(i0, k));
  }
  return value;
}

std::vector<double> exact_magnetization_trace(const Eigen::MatrixXd& pair_couplings, double gamma,
                                              std::span<const double> times, int i0) {
  const auto n = static_cast<int>(pair_couplings.rows());
  require(pair_couplings.cols() == n && n >= 1, "pair couplings must be a non-empty square matrix");
  require(i0 >= 0 && i0 < n, "site i0 outside the volume");
  if (n > kMaxDenseSpins) {
    throw ResourceLimit("exact magnetization: " + std::to_string(n) + " spins exceed the dense budget of " +
                        std::to_string(kMaxDenseSpins));
  }
  const std::size_t dim = std::size_t{1} << n;

  // Diagonal of H in the sz basis (bit 0 <-> sz = +1, site 0 most significant).
  std::vector<double> energy(dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a) {
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
      const double zj = ((a >> (n - 1 - j)) & 1U) ? -1.0 : 1.0;
      for (int k = j + 1; k < n; ++k) {
        const double zk = ((a >> (n - 1 - k)) & 1U) ? -1.0 : 1.0;
        e += pair_couplings(j, k) * zj * zk;
      }
    }
    energy[a] = e;
  }

  // Single-site density (I - tanh(gamma) sx) / 2.
  const double diag = 0.5;
  const double off = -0.5 * std::tanh(gamma);
  const std::size_t flip = std::size_t{1} << (n - 1 - i0);

  std::vector<double> out;
  out.reserve(times.size());
  std::vector<double> terms(dim);
  for (const double t : times) {
    // tr(rho(t) sx_i0) = sum_a rho(t)_{a, a^flip}; rho_{ab} is a product of
    // single-site entries, all diagonal except at i0.
    for (std::size_t a = 0; a < dim; ++a) {
      const std::size_t b = a ^ flip;
      double rho = 1.0;
      for (int j = 0; j < n; ++j) {
        const std::size_t m = std::size_t{1} << (n - 1 - j);
        rho *= ((a & m) == (b & m)) ? diag : off;
      }
      terms[a] = rho * std::cos((energy[a] - energy[b]) * t);
    }
    out.push_back(pairwise_sum(terms));
  }
  return out;
}

double exact_magnetization(const Eigen::MatrixXd& pair_couplings, double gamma, double t, int i0) {
  const double times[] = {t};
  return exact_magnetization_trace(pair_couplings, gamma, times, i0).front();
}

double closed_form_f(const CouplingDistribution& dist, int z, double beta_coupling, double t) {
  require(z >= 1, "coordination number z must be >= 1");
  return std::pow(dist.char_function(2.0 * beta_coupling * t), z);
}

double printed_form_f(const CouplingDistribution& dist, int z, double beta_coupling, double t) {
  require(z >= 1, "coordination number z must be >= 1");
  switch (dist.kind()) {
    case DistributionKind::kBernoulli: return std::pow(std::cos(2.0 * beta_coupling * t), z);
    case DistributionKind::kUniform:
      if (t == 0.0) return std::pow(beta_coupling, z);
      return std::pow(std::sin(2.0 * beta_coupling * t) / (2.0 * t), z);
    case DistributionKind::kGaussian: return std::exp(-2.0 * z * t * t);
  }
  return 0.0;
}

MagnetizationTrace closed_form_trace(const CouplingDistribution& dist, int z, double beta_coupling, double gamma,
                                     std::span<const double> times) {
  const double delta = delta_of_gamma(gamma);
  MagnetizationTrace trace;
  trace.times.assign(times.begin(), times.end());
  for (const double t : times) trace.values.push_back(delta * closed_form_f(dist, z, beta_coupling, t));
  trace.std_error.assign(times.size(), 0.0);
  return trace;
}

MagnetizationTrace mc_average_f(const CouplingDistribution& dist, int z, double beta_coupling, double gamma,
                                std::span<const double> times, std::uint64_t samples, std::uint64_t seed) {
  require(samples >= 100, "mc_average_f: need at least 100 samples");
  require(z >= 1, "coordination number z must be >= 1");
  const auto zs = static_cast<std::size_t>(z);
  std::vector<double> couplings(samples * zs);
  parallel_for(samples, [&](std::size_t s) {
    CounterRng stream(seed, StreamPurpose::kMonteCarlo, s);
    for (std::size_t i = 0; i < zs; ++i) couplings[s * zs + i] = dist.sample(stream);
  });

  const double delta = delta_of_gamma(gamma);
  const double n = static_cast<double>(samples);
  MagnetizationTrace trace;
  trace.times.assign(times.begin(), times.end());
  std::vector<double> values(samples), dev(samples);
  for (const double t : times) {
    parallel_for(samples, [&](std::size_t s) {
      double p = 1.0;
      for (std::size_t i = 0; i < zs; ++i) p *= std::cos(2.0 * beta_coupling * couplings[s * zs + i] * t);
      values[s] = p;
    });
    const double mean = pairwise_sum(values) / n;
    for (std::size_t s = 0; s < samples; ++s) dev[s] = (values[s] - mean) * (values[s] - mean);
    const double var = pairwise_sum(dev) / (n - 1.0);
    trace.values.push_back(delta * mean);
    trace.std_error.push_back(std::abs(delta) * std::sqrt(var / n));
  }
  return trace;
}

MagnetizationTrace mc_average_f(const DisorderedEmchModel& model, std::span<const double> times,
                                std::uint64_t samples, std::uint64_t seed) {
  model.validate();
  require(model.kernel.is_nearest_neighbor(), "mc_average_f: the model needs the nearest-neighbor kernel");
  return mc_average_f(model.distribution, model.kernel.coordination(), model.beta_coupling, model.gamma, times,
                      samples, seed);
}

const char* decay_class_name(DecayClass c) {
  switch (c) {
    case DecayClass::kAlmostPeriodic: return "ALMOST_PERIODIC";
    case DecayClass::kPowerLaw: return "POWER_LAW";
    case DecayClass::kGaussianLike: return "GAUSSIAN_LIKE";
  }
  return "?";
}

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.r2 = syy == 0.0 ? 1.0 : sxy * sxy / (sxx * syy);
  return fit;
}

}  // namespace

DecayReport decay_classify(const MagnetizationTrace& trace) {
  const std::size_t n = trace.times.size();
  require(n >= 10, "decay_classify: trace too short (need at least 10 points)");
  require(trace.values.size() == n, "decay_classify: times and values differ in length");
  require(std::is_sorted(trace.times.begin(), trace.times.end()), "decay_classify: times must be increasing");
  std::vector<double> err = trace.std_error;
  err.resize(n, 0.0);

  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(trace.values[i]);
  const double peak = *std::max_element(mag.begin(), mag.end());
  require(peak > 0.0, "decay_classify: trace is identically zero");

  DecayReport report;
  const auto drop = std::find_if(mag.begin(), mag.end(), [&](double m) { return m < 0.5 * peak; });
  if (drop == mag.end() || std::any_of(drop, mag.end(), [&](double m) { return m > 0.9 * peak; })) {
    report.decay_class = DecayClass::kAlmostPeriodic;
    return report;
  }

  auto usable = [&](std::size_t i) { return trace.times[i] > 0.0 && mag[i] > std::max(3.0 * err[i], 1e-12); };
  std::vector<std::size_t> picked;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (mag[i] >= mag[i - 1] && mag[i] > mag[i + 1] && usable(i)) picked.push_back(i);
  }
  if (picked.size() < 3) {
    picked.clear();
    for (std::size_t i = 0; i < n; ++i) {
      if (usable(i)) picked.push_back(i);
    }
  }
  require(picked.size() >= 3, "decay_classify: fewer than 3 points above the noise floor");

  std::vector<double> log_t, t2, log_f;
  for (const std::size_t i : picked) {
    log_t.push_back(std::log(trace.times[i]));
    t2.push_back(trace.times[i] * trace.times[i]);
    log_f.push_back(std::log(mag[i]));
  }
  const LineFit power = fit_line(log_t, log_f);
  const LineFit gauss = fit_line(t2, log_f);
  report.power_exponent = power.slope;
  report.power_r2 = power.r2;
  report.gaussian_rate = -gauss.slope;
  report.gaussian_r2 = gauss.r2;
  report.fit_points = picked.size();
  report.decay_class = gauss.r2 > power.r2 ? DecayClass::kGaussianLike : DecayClass::kPowerLaw;
  return report;
}

StabilityReport stability_classify(const InteractionKernel& kernel, const CouplingDistribution& dist) {
  StabilityReport report;
  report.kernel_class = kernel.summability();
  report.stable = report.kernel_class != Summability::kNone;
  report.first_kind = dist.bounded_support();
  report.second_kind = report.kernel_class == Summability::kL1 && dist.bounded_support();
  report.exponential_decay_excluded = report.second_kind;

  std::string why = "kernel " + kernel.description() + " is " + summability_name(report.kernel_class);
  why += "; couplings " + dist.name() + (dist.bounded_support() ? " have bounded support" : " are unbounded");
  if (report.second_kind) {
    why += "; H >= -c|V| holds, so the GNS Hamiltonian is semibounded and f cannot decay exponentially";
  } else if (!report.first_kind) {
    why += "; H_V is not bounded below uniformly in the couplings";
  } else {
    why += "; sum eps diverges, so no bound linear in |V|";
  }
  report.rationale = why;
  return report;
}

SpatialAverage finite_volume_average_f(const DisorderedEmchModel& model, std::span<const double> times,
                                       std::uint64_t seed, std::size_t stride) {
  model.validate();
  require(model.kernel.is_nearest_neighbor(), "finite_volume_average_f: the kernel must be nearest-neighbor");
  require(stride >= 1, "finite_volume_average_f: stride must be >= 1");
  const int d = model.kernel.dimension();
  const int h = model.volume_half_width;
  const std::size_t side = static_cast<std::size_t>(2 * h + 1);
  const std::size_t ext = side + 1;  // lower bond endpoints run over [-h-1, h]
  std::size_t sites = 1, ext_points = 1;
  for (int k = 0; k < d; ++k) {
    sites *= side;
    ext_points *= ext;
  }
  require(ext_points <= (std::size_t{1} << 26), "finite_volume_average_f: volume too large");

  // J for the bond from lower endpoint p (extended box) along axis a.
  std::vector<double> bond_j(ext_points * static_cast<std::size_t>(d));
  parallel_for(bond_j.size(), [&](std::size_t b) {
    CounterRng stream(seed, StreamPurpose::kCoupling, b);
    bond_j[b] = model.distribution.sample(stream);
  });

  // Site i (box coordinates c in [0, side)) touches the bonds with lower
  // endpoint c and c - e_a, i.e. extended coordinates c + 1 and c.
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < sites; i += stride) selected.push_back(i);
  const std::size_t m = selected.size();
  const auto z = static_cast<std::size_t>(2 * d);
  std::vector<double> site_j(m * z);
  std::vector<std::size_t> position(sites, SIZE_MAX);
  for (std::size_t s = 0; s < m; ++s) {
    position[selected[s]] = s;
    std::size_t rest = selected[s];
    std::vector<std::size_t> c(static_cast<std::size_t>(d));
    for (int k = d - 1; k >= 0; --k) {
      c[static_cast<std::size_t>(k)] = rest % side;
      rest /= side;
    }
    for (int a = 0; a < d; ++a) {
      for (int shift = 0; shift < 2; ++shift) {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) {
          std::size_t e = c[static_cast<std::size_t>(k)] + 1;
          if (k == a && shift == 1) e -= 1;
          idx = idx * ext + e;
        }
        site_j[s * z + static_cast<std::size_t>(2 * a + shift)] = bond_j[idx * static_cast<std::size_t>(d) + static_cast<std::size_t>(a)];
      }
    }
  }

  // Neighbour pairs (i, i + e_a) that are both selected.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs(static_cast<std::size_t>(d));
  std::size_t axis_stride = 1;
  for (int a = d - 1; a >= 0; --a) {
    for (std::size_t s = 0; s < m; ++s) {
      const std::size_t i = selected[s];
      if ((i / axis_stride) % side + 1 < side && position[i + axis_stride] != SIZE_MAX) {
        pairs[static_cast<std::size_t>(a)].push_back({s, position[i + axis_stride]});
      }
    }
    axis_stride *= side;
  }

  const double delta = delta_of_gamma(model.gamma);
  const double beta = model.beta_coupling;
  SpatialAverage out;
  out.sites = m;
  out.trace.times.assign(times.begin(), times.end());
  std::vector<double> values(m), dev(m);
  for (const double t : times) {
    parallel_for(m, [&](std::size_t s) {
      double p = delta;
      for (std::size_t k = 0; k < z; ++k) p *= std::cos(2.0 * beta * site_j[s * z + k] * t);
      values[s] = p;
    });
    const double mean = pairwise_sum(values) / static_cast<double>(m);
    for (std::size_t s = 0; s < m; ++s) dev[s] = (values[s] - mean) * (values[s] - mean);
    double var = m > 1 ? pairwise_sum(dev) / static_cast<double>(m - 1) : 0.0;
    for (const auto& axis_pairs : pairs) {
      if (axis_pairs.empty()) continue;
      std::vector<double> cov(axis_pairs.size());
      for (std::size_t q = 0; q < axis_pairs.size(); ++q) {
        cov[q] = (values[axis_pairs[q].first] - mean) * (values[axis_pairs[q].second] - mean);
      }
      // Each site has a forward and a backward neighbour along the axis.
      var += 2.0 * pairwise_sum(cov) / static_cast<double>(axis_pairs.size());
    }
    out.trace.values.push_back(mean);
    out.trace.std_error.push_back(std::sqrt(std::max(var, 0.0) / static_cast<double>(m)));
  }
  return out;
}

}  // namespace qdlab
