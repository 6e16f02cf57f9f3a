#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qdlab/ensembles.hpp"

namespace qdlab {

enum class Boundary { kFree, kPeriodic };

const char* boundary_name(Boundary b);
Boundary parse_boundary(const std::string& name);

struct Bond {
  int a = 0;     ///< site
  int b = 0;     ///< site + e_axis (wrapped for periodic boundaries)
  int axis = 0;
};

/// Hypercubic L^d box with nearest-neighbour bonds. Under periodic boundaries
/// every site owns one bond per axis, so side 2 produces doubled bonds between
/// the same pair; they stay distinct.
class Lattice {
 public:
  Lattice(int dimension, int side, Boundary boundary);

  int dimension() const { return dimension_; }
  int side() const { return side_; }
  Boundary boundary() const { return boundary_; }
  int site_count() const { return site_count_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  int site_index(std::span<const int> coords) const;
  std::vector<int> coords(int site) const;
  /// Bond leaving `site` along `axis`, or -1 at a free edge.
  int bond_from(int site, int axis) const;
  /// Elementary squares as four bond indices (closed loop).
  std::vector<std::array<int, 4>> plaquettes() const;

 private:
  int dimension_;
  int side_;
  Boundary boundary_;
  int site_count_;
  std::vector<Bond> bonds_;
  std::vector<int> bond_from_;
};

struct Anisotropy {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  bool is_classical() const { return x == 0.0 && y == 0.0 && z == 1.0; }
};

/// Edwards-Anderson instance: one coupling per lattice bond, bond term
/// J (ax sx sx + ay sy sy + az sz sz), each unordered bond counted once.
struct EAInstance {
  Lattice lattice;
  std::vector<double> couplings;
  Anisotropy anisotropy;

  EAInstance(Lattice lat, std::vector<double> j, Anisotropy aniso = {});

  /// Couplings drawn from (seed, coupling purpose, sample_index).
  static EAInstance sample(const Lattice& lat, const CouplingDistribution& dist, std::uint64_t seed,
                           std::uint64_t sample_index, Anisotropy aniso = {});
};

using SpinConfig = std::vector<std::int8_t>;

/// F(sigma, J) = sum over bonds of J sigma_a sigma_b.
double classical_energy(const EAInstance& instance, std::span<const std::int8_t> sigma);

struct GroundStateResult {
  double energy = 0.0;
  SpinConfig witness;
  std::uint64_t degeneracy = 0;           ///< raw count (sigma and -sigma distinct)
  std::uint64_t degeneracy_mod_flip = 0;  ///< classes under global flip
};

inline constexpr int kMaxExhaustiveSites = 28;

/// Exact minimum of F over all 2^N configurations via Gray-code enumeration
/// with spin 0 pinned. Throws ResourceLimit when N exceeds max_sites.
GroundStateResult ground_state_exhaustive(const EAInstance& instance, int max_sites = kMaxExhaustiveSites);

enum class QuantumSolver { kAuto, kDense, kLanczos };

inline constexpr int kMaxQuantumSites = 12;

/// Smallest eigenvalue of the anisotropic Hamiltonian on 2^N states.
double quantum_ground_energy(const EAInstance& instance, QuantumSolver solver = QuantumSolver::kAuto,
                             int max_sites = kMaxQuantumSites);

/// Dense real Hamiltonian built from bit operations on the sz basis.
Eigen::MatrixXd dense_ea_hamiltonian(const EAInstance& instance);

enum class Frustration { kFrustrated, kUnfrustrated };

/// Frustrated iff the product of coupling signs around the square is -1.
Frustration plaquette_frustration(std::span<const double> couplings);

/// Product of couplings around each plaquette.
std::vector<double> plaquette_products(const EAInstance& instance);

/// sigma_site -> -sigma_site together with J -> -J on incident bonds.
EAInstance gauge_transform(const EAInstance& instance, int site);

struct Rational {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;

  double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }
  Rational reduced() const;
  std::string str() const;
};

struct ClusterBound {
  int dimension = 2;
  Rational c_d;                 ///< 1/2 in d=2, 1/4 in d=3
  double e0_d = 0.0;            ///< c_d * Av(cluster ground energy)
  double per_site_bound = 0.0;  ///< lower bound on Av(E_0)/N
  std::optional<Rational> exact;  ///< unreduced c_d * sum / configurations
  double std_error = 0.0;         ///< Monte Carlo error (0 when enumerated)
  std::uint64_t coupling_configs = 0;
  std::uint64_t spin_configs = 0;
};

/// The elementary cluster: a plaquette (d=2) or unit cube (d=3).
Lattice elementary_cluster(int dimension);

Rational cluster_weight(int dimension);

/// Exact bound for couplings uniform on a finite integer support, e.g.
/// {-1, +1} for Bernoulli. Enumerates |support|^bonds coupling configurations.
ClusterBound cluster_lower_bound_enumerated(int dimension, std::span<const int> support);

struct ClusterMonteCarlo {
  std::uint64_t samples = 20000;
  std::uint64_t seed = 0;
};

/// Bernoulli is enumerated exactly; continuous laws use Monte Carlo.
ClusterBound cluster_lower_bound(int dimension, const CouplingDistribution& dist, const ClusterMonteCarlo& mc = {});

/// (|e_ideal| - |e_ground|) / |e_ideal|.
double misfit(double e_ideal, double e_ground);

struct ScanConfig {
  int dimension = 2;
  std::vector<int> sides;
  std::uint64_t samples = 200;
  CouplingDistribution distribution = CouplingDistribution::bernoulli();
  std::uint64_t seed = 0;
  int max_sites = kMaxExhaustiveSites;
};

struct ScanRow {
  int side = 0;
  Boundary boundary = Boundary::kFree;
  int sites = 0;
  int bonds = 0;
  std::uint64_t samples = 0;
  double mean_per_site = 0.0;
  double std_error = 0.0;
  double cluster_bound = 0.0;
  bool bound_ok = false;      ///< mean >= bound - 3 std_error
  double boundary_gap = 0.0;  ///< |free - periodic| at this side
};

/// Disorder-averaged ground-state energy per site for each side and both
/// boundary conditions.
std::vector<ScanRow> energy_density_scan(const ScanConfig& config);

}  // namespace qdlab
