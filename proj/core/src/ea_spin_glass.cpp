#include "qdlab/ea_spin_glass.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "qdlab/errors.hpp"
#include "qdlab/parallel.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {

const char* boundary_name(Boundary b) { return b == Boundary::kFree ? "free" : "periodic"; }

Boundary parse_boundary(const std::string& name) {
  if (name == "free") return Boundary::kFree;
  if (name == "periodic") return Boundary::kPeriodic;
  throw InvalidArgument("unknown boundary '" + name + "' (expected free or periodic)");
}

Lattice::Lattice(int dimension, int side, Boundary boundary)
    : dimension_(dimension), side_(side), boundary_(boundary), site_count_(1) {
  require(dimension >= 1 && dimension <= 3, "lattice dimension must be 1, 2 or 3");
  require(side >= 2, "lattice side must be >= 2");
  for (int k = 0; k < dimension; ++k) {
    require(site_count_ <= (1 << 24) / side, "lattice too large");
    site_count_ *= side;
  }
  bond_from_.assign(static_cast<std::size_t>(site_count_ * dimension), -1);
  std::vector<int> c;
  for (int site = 0; site < site_count_; ++site) {
    c = coords(site);
    for (int axis = 0; axis < dimension; ++axis) {
      if (boundary == Boundary::kFree && c[static_cast<std::size_t>(axis)] == side - 1) continue;
      std::vector<int> next = c;
      next[static_cast<std::size_t>(axis)] = (next[static_cast<std::size_t>(axis)] + 1) % side;
      bond_from_[static_cast<std::size_t>(site * dimension + axis)] = static_cast<int>(bonds_.size());
      bonds_.push_back({site, site_index(next), axis});
    }
  }
}

int Lattice::site_index(std::span<const int> coords) const {
  require(static_cast<int>(coords.size()) == dimension_, "site_index: wrong coordinate count");
  int index = 0;
  for (int k = dimension_ - 1; k >= 0; --k) {
    const int x = coords[static_cast<std::size_t>(k)];
    require(x >= 0 && x < side_, "site_index: coordinate out of range");
    index = index * side_ + x;
  }
  return index;
}

std::vector<int> Lattice::coords(int site) const {
  std::vector<int> c(static_cast<std::size_t>(dimension_));
  for (int k = 0; k < dimension_; ++k) {
    c[static_cast<std::size_t>(k)] = site % side_;
    site /= side_;
  }
  return c;
}

int Lattice::bond_from(int site, int axis) const {
  return bond_from_[static_cast<std::size_t>(site * dimension_ + axis)];
}

std::vector<std::array<int, 4>> Lattice::plaquettes() const {
  std::vector<std::array<int, 4>> out;
  for (int site = 0; site < site_count_; ++site) {
    for (int p = 0; p < dimension_; ++p) {
      for (int q = p + 1; q < dimension_; ++q) {
        const int bp = bond_from(site, p);
        const int bq = bond_from(site, q);
        if (bp < 0 || bq < 0) continue;
        const int across_p = bond_from(bonds_[static_cast<std::size_t>(bp)].b, q);
        const int across_q = bond_from(bonds_[static_cast<std::size_t>(bq)].b, p);
        if (across_p < 0 || across_q < 0) continue;
        out.push_back({bp, across_p, across_q, bq});
      }
    }
  }
  return out;
}

EAInstance::EAInstance(Lattice lat, std::vector<double> j, Anisotropy aniso)
    : lattice(std::move(lat)), couplings(std::move(j)), anisotropy(aniso) {
  require(couplings.size() == lattice.bonds().size(), "EAInstance: one coupling per bond required");
}

EAInstance EAInstance::sample(const Lattice& lat, const CouplingDistribution& dist, std::uint64_t seed,
                              std::uint64_t sample_index, Anisotropy aniso) {
  CounterRng stream(seed, StreamPurpose::kCoupling, sample_index);
  std::vector<double> j(lat.bonds().size());
  for (double& x : j) x = dist.sample(stream);
  return EAInstance(lat, std::move(j), aniso);
}

double classical_energy(const EAInstance& instance, std::span<const std::int8_t> sigma) {
  require(static_cast<int>(sigma.size()) == instance.lattice.site_count(), "classical_energy: configuration size mismatch");
  const auto& bonds = instance.lattice.bonds();
  double energy = 0.0;
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    const std::int8_t sa = sigma[static_cast<std::size_t>(bonds[k].a)];
    const std::int8_t sb = sigma[static_cast<std::size_t>(bonds[k].b)];
    require(std::abs(sa) == 1 && std::abs(sb) == 1, "classical_energy: spins must be +-1");
    energy += instance.couplings[k] * sa * sb;
  }
  return energy;
}

namespace {

struct Neighbour {
  int site;
  double coupling;
};

std::vector<std::vector<Neighbour>> adjacency(const EAInstance& instance) {
  std::vector<std::vector<Neighbour>> adj(static_cast<std::size_t>(instance.lattice.site_count()));
  const auto& bonds = instance.lattice.bonds();
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    adj[static_cast<std::size_t>(bonds[k].a)].push_back({bonds[k].b, instance.couplings[k]});
    adj[static_cast<std::size_t>(bonds[k].b)].push_back({bonds[k].a, instance.couplings[k]});
  }
  return adj;
}

}  // namespace

GroundStateResult ground_state_exhaustive(const EAInstance& instance, int max_sites) {
  require(instance.anisotropy.is_classical(), "ground_state_exhaustive: needs the classical anisotropy (0, 0, 1)");
  const int n = instance.lattice.site_count();
  if (n > max_sites) {
    throw ResourceLimit("exhaustive ground state: " + std::to_string(n) + " sites exceed the enumeration budget of " +
                        std::to_string(max_sites) + "; use a branch-and-bound solver for larger systems");
  }
  const auto adj = adjacency(instance);
  double scale = 1.0;
  for (const double j : instance.couplings) scale += std::abs(j);
  const double tol = 1e-9 * scale;

  SpinConfig sigma(static_cast<std::size_t>(n), 1);
  double energy = classical_energy(instance, sigma);
  GroundStateResult best;
  best.energy = energy;
  best.witness = sigma;
  std::uint64_t count = 1;

  const std::uint64_t states = std::uint64_t{1} << (n - 1);
  constexpr std::uint64_t kResync = std::uint64_t{1} << 16;
  for (std::uint64_t step = 1; step < states; ++step) {
    const int site = std::countr_zero(step) + 1;
    double field = 0.0;
    for (const Neighbour& nb : adj[static_cast<std::size_t>(site)]) field += nb.coupling * sigma[static_cast<std::size_t>(nb.site)];
    energy -= 2.0 * sigma[static_cast<std::size_t>(site)] * field;
    sigma[static_cast<std::size_t>(site)] = static_cast<std::int8_t>(-sigma[static_cast<std::size_t>(site)]);
    if (step % kResync == 0) energy = classical_energy(instance, sigma);

    if (energy < best.energy - tol) {
      best.energy = energy;
      best.witness = sigma;
      count = 1;
    } else if (energy <= best.energy + tol) {
      ++count;
      if (energy < best.energy) {
        best.energy = energy;
        best.witness = sigma;
      }
    }
  }
  best.energy = classical_energy(instance, best.witness);
  best.degeneracy_mod_flip = count;
  best.degeneracy = 2 * count;
  return best;
}

Eigen::MatrixXd dense_ea_hamiltonian(const EAInstance& instance) {
  const int n = instance.lattice.site_count();
  require(n <= 14, "dense_ea_hamiltonian: too many sites");
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const auto& bonds = instance.lattice.bonds();
  const Anisotropy& an = instance.anisotropy;
  for (Eigen::Index s = 0; s < dim; ++s) {
    const auto state = static_cast<std::size_t>(s);
    for (std::size_t k = 0; k < bonds.size(); ++k) {
      const int ba = (state >> (n - 1 - bonds[k].a)) & 1U;
      const int bb = (state >> (n - 1 - bonds[k].b)) & 1U;
      const double j = instance.couplings[k];
      const double zz = ba == bb ? 1.0 : -1.0;
      h(s, s) += j * an.z * zz;
      // sx sx flips both spins with amplitude 1; sy sy flips both with -zz.
      const double flip_amp = j * (an.x - an.y * zz);
      if (flip_amp != 0.0) {
        const std::size_t flipped = state ^ (std::size_t{1} << (n - 1 - bonds[k].a)) ^ (std::size_t{1} << (n - 1 - bonds[k].b));
        h(static_cast<Eigen::Index>(flipped), s) += flip_amp;
      }
    }
  }
  return h;
}

namespace {

// H x for the anisotropic Hamiltonian without storing the matrix.
void apply_ea_hamiltonian(const EAInstance& instance, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const int n = instance.lattice.site_count();
  const auto& bonds = instance.lattice.bonds();
  const Anisotropy& an = instance.anisotropy;
  y.setZero(x.size());
  for (Eigen::Index s = 0; s < x.size(); ++s) {
    const auto state = static_cast<std::size_t>(s);
    double diag = 0.0;
    for (std::size_t k = 0; k < bonds.size(); ++k) {
      const std::size_t ma = std::size_t{1} << (n - 1 - bonds[k].a);
      const std::size_t mb = std::size_t{1} << (n - 1 - bonds[k].b);
      const double zz = ((state & ma) != 0) == ((state & mb) != 0) ? 1.0 : -1.0;
      const double j = instance.couplings[k];
      diag += j * an.z * zz;
      const double flip_amp = j * (an.x - an.y * zz);
      if (flip_amp != 0.0) y[static_cast<Eigen::Index>(state ^ ma ^ mb)] += flip_amp * x[s];
    }
    y[s] += diag * x[s];
  }
}

double lanczos_ground_energy(const EAInstance& instance) {
  const Eigen::Index dim = Eigen::Index{1} << instance.lattice.site_count();
  const Eigen::Index max_iter = std::min<Eigen::Index>(dim, 300);
  CounterRng stream(0, StreamPurpose::kLanczos, static_cast<std::uint64_t>(dim));
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = stream.uniform01() - 0.5;
  v.normalize();

  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha, beta;
  Eigen::VectorXd w;
  double previous = std::numeric_limits<double>::infinity();
  double estimate = previous;
  for (Eigen::Index it = 0; it < max_iter; ++it) {
    basis.push_back(v);
    apply_ea_hamiltonian(instance, v, w);
    const double a = v.dot(w);
    alpha.push_back(a);
    // Full reorthogonalisation, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) w -= q.dot(w) * q;
    }
    const double b = w.norm();

    if ((it + 1) % 5 == 0 || b < 1e-12 || it + 1 == max_iter) {
      const auto m = static_cast<Eigen::Index>(alpha.size());
      Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
      tri.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
      estimate = tri.eigenvalues()[0];
      if (std::abs(estimate - previous) < 1e-13 * std::max(1.0, std::abs(estimate))) break;
      previous = estimate;
    }
    if (b < 1e-12) break;
    beta.push_back(b);
    v = w / b;
  }
  return estimate;
}

}  // namespace

double quantum_ground_energy(const EAInstance& instance, QuantumSolver solver, int max_sites) {
  const int n = instance.lattice.site_count();
  if (n > max_sites) {
    throw ResourceLimit("quantum ground state: 2^" + std::to_string(n) + " states exceed the budget of 2^" +
                        std::to_string(max_sites));
  }
  if (solver == QuantumSolver::kAuto) solver = n <= 10 ? QuantumSolver::kDense : QuantumSolver::kLanczos;
  if (solver == QuantumSolver::kLanczos) return lanczos_ground_energy(instance);
  const Eigen::MatrixXd h = dense_ea_hamiltonian(instance);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

Frustration plaquette_frustration(std::span<const double> couplings) {
  require(couplings.size() == 4, "plaquette_frustration: a plaquette has exactly 4 bonds");
  int negatives = 0;
  for (const double j : couplings) {
    require(j != 0.0, "plaquette_frustration: zero coupling has no sign");
    if (j < 0.0) ++negatives;
  }
  return negatives % 2 == 1 ? Frustration::kFrustrated : Frustration::kUnfrustrated;
}

std::vector<double> plaquette_products(const EAInstance& instance) {
  std::vector<double> out;
  for (const auto& p : instance.lattice.plaquettes()) {
    double g = 1.0;
    for (const int b : p) g *= instance.couplings[static_cast<std::size_t>(b)];
    out.push_back(g);
  }
  return out;
}

EAInstance gauge_transform(const EAInstance& instance, int site) {
  require(site >= 0 && site < instance.lattice.site_count(), "gauge_transform: site outside the lattice");
  EAInstance out = instance;
  const auto& bonds = instance.lattice.bonds();
  for (std::size_t k = 0; k < bonds.size(); ++k) {
    if (bonds[k].a == site || bonds[k].b == site) out.couplings[k] = -out.couplings[k];
  }
  return out;
}

Rational Rational::reduced() const {
  const std::int64_t g = std::gcd(numerator, denominator);
  if (g == 0) return *this;
  Rational r{numerator / g, denominator / g};
  if (r.denominator < 0) {
    r.numerator = -r.numerator;
    r.denominator = -r.denominator;
  }
  return r;
}

std::string Rational::str() const { return std::to_string(numerator) + "/" + std::to_string(denominator); }

Lattice elementary_cluster(int dimension) {
  require(dimension == 2 || dimension == 3, "cluster bound: unsupported dimension (expected 2 or 3)");
  return Lattice(dimension, 2, Boundary::kFree);
}

Rational cluster_weight(int dimension) {
  require(dimension == 2 || dimension == 3, "cluster bound: unsupported dimension (expected 2 or 3)");
  return dimension == 2 ? Rational{1, 2} : Rational{1, 4};
}

namespace {

// Minimum of sum_k J_k s_a s_b over all spin states, for every state encoded
// as a row of bond products.
std::vector<std::vector<int>> bond_product_table(const Lattice& cluster) {
  const int n = cluster.site_count();
  const auto& bonds = cluster.bonds();
  std::vector<std::vector<int>> table;
  for (std::uint32_t s = 0; s < (1U << n); ++s) {
    std::vector<int> row(bonds.size());
    for (std::size_t k = 0; k < bonds.size(); ++k) {
      const int sa = ((s >> bonds[k].a) & 1U) ? -1 : 1;
      const int sb = ((s >> bonds[k].b) & 1U) ? -1 : 1;
      row[k] = sa * sb;
    }
    table.push_back(std::move(row));
  }
  return table;
}

}  // namespace

ClusterBound cluster_lower_bound_enumerated(int dimension, std::span<const int> support) {
  require(!support.empty(), "cluster bound: empty coupling support");
  const Lattice cluster = elementary_cluster(dimension);
  const auto table = bond_product_table(cluster);
  const std::size_t bonds = cluster.bonds().size();
  const auto base = static_cast<std::uint64_t>(support.size());
  std::uint64_t configs = 1;
  for (std::size_t k = 0; k < bonds; ++k) configs *= base;

  std::int64_t total = 0;
  std::vector<int> j(bonds);
  for (std::uint64_t c = 0; c < configs; ++c) {
    std::uint64_t code = c;
    for (std::size_t k = 0; k < bonds; ++k) {
      j[k] = support[static_cast<std::size_t>(code % base)];
      code /= base;
    }
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& row : table) {
      std::int64_t e = 0;
      for (std::size_t k = 0; k < bonds; ++k) e += j[k] * row[k];
      best = std::min(best, e);
    }
    total += best;
  }

  ClusterBound out;
  out.dimension = dimension;
  out.c_d = cluster_weight(dimension);
  out.coupling_configs = configs;
  out.spin_configs = table.size();
  out.exact = Rational{total * out.c_d.numerator, static_cast<std::int64_t>(configs) * out.c_d.denominator};
  out.e0_d = out.exact->value();
  out.per_site_bound = out.e0_d;
  return out;
}

ClusterBound cluster_lower_bound(int dimension, const CouplingDistribution& dist, const ClusterMonteCarlo& mc) {
  if (dist.kind() == DistributionKind::kBernoulli) {
    constexpr std::array<int, 2> kSigns{-1, 1};
    return cluster_lower_bound_enumerated(dimension, kSigns);
  }
  require(mc.samples >= 2, "cluster bound: need at least 2 Monte Carlo samples");
  const Lattice cluster = elementary_cluster(dimension);
  const auto table = bond_product_table(cluster);
  const std::size_t bonds = cluster.bonds().size();
  std::vector<double> minima(mc.samples);
  parallel_for(mc.samples, [&](std::size_t s) {
    CounterRng stream(mc.seed, StreamPurpose::kCoupling, s);
    std::vector<double> j(bonds);
    for (double& x : j) x = dist.sample(stream);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& row : table) {
      double e = 0.0;
      for (std::size_t k = 0; k < bonds; ++k) e += j[k] * row[k];
      best = std::min(best, e);
    }
    minima[s] = best;
  });
  const double n = static_cast<double>(mc.samples);
  const double mean = pairwise_sum(minima) / n;
  std::vector<double> dev(minima.size());
  std::transform(minima.begin(), minima.end(), dev.begin(), [&](double x) { return (x - mean) * (x - mean); });
  const double var = pairwise_sum(dev) / (n - 1.0);

  ClusterBound out;
  out.dimension = dimension;
  out.c_d = cluster_weight(dimension);
  out.coupling_configs = mc.samples;
  out.spin_configs = table.size();
  out.e0_d = out.c_d.value() * mean;
  out.per_site_bound = out.e0_d;
  out.std_error = out.c_d.value() * std::sqrt(var / n);
  return out;
}

double misfit(double e_ideal, double e_ground) {
  require(e_ideal != 0.0, "misfit: ideal energy must be non-zero");
  return (std::abs(e_ideal) - std::abs(e_ground)) / std::abs(e_ideal);
}

std::vector<ScanRow> energy_density_scan(const ScanConfig& config) {
  require(!config.sides.empty(), "energy_density_scan: no sides given");
  require(config.samples >= 2, "energy_density_scan: need at least 2 samples");
  const ClusterBound bound = cluster_lower_bound(config.dimension, config.distribution, {20000, config.seed});

  std::vector<ScanRow> rows;
  for (const int side : config.sides) {
    std::array<ScanRow, 2> pair;
    for (const Boundary bc : {Boundary::kFree, Boundary::kPeriodic}) {
      const Lattice lattice(config.dimension, side, bc);
      if (lattice.site_count() > config.max_sites) {
        throw ResourceLimit("energy_density_scan: L=" + std::to_string(side) + " gives " +
                            std::to_string(lattice.site_count()) + " sites, over the enumeration budget of " +
                            std::to_string(config.max_sites));
      }
      const std::uint64_t stream_base =
          (static_cast<std::uint64_t>(side) << 40) | (static_cast<std::uint64_t>(bc == Boundary::kPeriodic) << 39);
      std::vector<double> per_site(config.samples);
      parallel_for(config.samples, [&](std::size_t s) {
        const EAInstance inst =
            EAInstance::sample(lattice, config.distribution, config.seed, stream_base | static_cast<std::uint64_t>(s));
        per_site[s] = ground_state_exhaustive(inst, config.max_sites).energy / lattice.site_count();
      });
      const double n = static_cast<double>(config.samples);
      const double mean = pairwise_sum(per_site) / n;
      std::vector<double> dev(per_site.size());
      std::transform(per_site.begin(), per_site.end(), dev.begin(), [&](double x) { return (x - mean) * (x - mean); });
      ScanRow& row = pair[bc == Boundary::kFree ? 0 : 1];
      row.side = side;
      row.boundary = bc;
      row.sites = lattice.site_count();
      row.bonds = static_cast<int>(lattice.bonds().size());
      row.samples = config.samples;
      row.mean_per_site = mean;
      row.std_error = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
      row.cluster_bound = bound.per_site_bound;
      row.bound_ok = row.mean_per_site >= row.cluster_bound - 3.0 * row.std_error;
    }
    const double gap = std::abs(pair[0].mean_per_site - pair[1].mean_per_site);
    for (ScanRow& row : pair) {
      row.boundary_gap = gap;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace qdlab
