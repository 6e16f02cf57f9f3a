#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace qdlab {

/// Parameters of the half-line Jacobi operator with sparse random bumps.
struct SparseModelParams {
  int beta_base = 2;        ///< gap growth base, gaps are beta^j
  double v = 0.5;           ///< bump height, 0 < v < 1
  double phi = 0.0;         ///< boundary phase in [0, pi)
  int max_bump_index = 20;  ///< number of bumps J
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// Bump positions a_j + omega_j and their height.
struct SparsePotential {
  std::vector<std::int64_t> positions;  ///< strictly increasing
  double v = 0.0;
  std::vector<std::int64_t> omegas;

  /// Diagonal entry at a site (v on a bump, 0 elsewhere).
  double at(std::int64_t site) const;
  std::size_t bump_count() const { return positions.size(); }
};

/// Unperturbed positions: a_1 = beta - 1, a_j = a_{j-1} + beta^j.
std::vector<std::int64_t> sparse_base_positions(int beta_base, int count);

/// Draws omega_j uniformly from {-j..j}; each j uses its own substream so
/// growing max_bump_index leaves earlier bumps unchanged.
SparsePotential build_potential(const SparseModelParams& params);

/// Potential with prescribed offsets omega_1..omega_J (|omega_j| <= j).
SparsePotential build_potential(int beta_base, double v, std::span<const std::int64_t> omegas);

/// Potential with arbitrary strictly increasing bump sites.
SparsePotential potential_from_sites(std::vector<std::int64_t> sites, double v);

/// True when phi sits on pi/2 (cos(phi) = 0), which pins u_0 = 0.
bool is_pinned_boundary(double phi);

/// (J u)_n = u_{n+1} + u_{n-1} + v_n u_n on sites 0..n-1, with u_{-1} fixed by
/// u_{-1} cos(phi) = u_0 sin(phi) and u_n = 0 past the end.
///
/// For phi = pi/2 the condition forces u_0 = 0; the operator then lives on
/// sites 1..n-1 with a Dirichlet wall at 0, u[0] is ignored and out[0] = 0.
std::vector<double> apply_operator(std::span<const double> u, const SparsePotential& pot, double phi);

/// One-site transfer matrix [[lambda - v_n, -1], [1, 0]], acting on
/// (u_n, u_{n-1}) to give (u_{n+1}, u_n).
Eigen::Matrix2d transfer_step(double lambda, double v_n);

/// Prufer data at each bump, in the coordinates where the free step is a
/// rotation by alpha (lambda = 2 cos alpha).
struct PruferTrajectory {
  double energy = 0.0;
  double angle = 0.0;
  double initial_radius = 0.0;
  std::vector<double> radii;   ///< radius just after crossing bump j
  std::vector<double> phases;  ///< Prufer angle just after bump j, in (-pi, pi]
};

/// Coordinates (x, y) = (u_n - cos(alpha) u_{n-1}, sin(alpha) u_{n-1}).
Eigen::Matrix2d prufer_frame(double alpha);

/// Evolves the boundary solution (u_0, u_{-1}) = (cos phi, sin phi) through
/// every bump. Free stretches are applied as a single rotation.
/// Requires |lambda| < 2.
PruferTrajectory prufer_evolve(double lambda, const SparsePotential& pot, double phi);

/// Site-by-site Prufer radius for sites 0..n_sites-1 (state after site n).
std::vector<double> prufer_radius_path(double lambda, const SparsePotential& pot, double phi,
                                       std::int64_t n_sites);

/// Direct route: (u_{m+1}, u_m) from the product of transfer_step matrices
/// over sites 0..m, starting from (cos phi, sin phi).
Eigen::Vector2d direct_transfer(double lambda, const SparsePotential& pot, double phi, std::int64_t m);

enum class SpectralRegion { kSingularContinuous, kPurePoint, kEdge, kExcluded };

const char* region_label(SpectralRegion region);

struct RegionClassification {
  SpectralRegion label = SpectralRegion::kEdge;
  double criterion_value = 0.0;  ///< (beta - 1)(4 - lambda^2) / v^2
};

struct ClassifyOptions {
  int max_denominator = 64;      ///< 0 disables the rational-angle exclusion
  double rational_tol = 1e-9;
  double edge_tol = 1e-9;
};

double sparse_criterion(double lambda, double v, int beta_base);

/// Labels an in-band energy by the localization criterion; energies whose
/// angle alpha/pi is a rational with small denominator are EXCLUDED.
RegionClassification classify_energy(double lambda, double v, int beta_base, const ClassifyOptions& options = {});
RegionClassification classify_energy(double lambda, const SparseModelParams& params,
                                     const ClassifyOptions& options = {});

/// Rational p/q with q <= max_denominator within tol of x, if one exists.
bool near_rational(double x, int max_denominator, double tol);

struct MobilityEdges {
  double lower = 0.0;
  double upper = 0.0;
  bool sc_window_empty = false;  ///< v >= v_c: the whole band is pure point
};

/// Critical disorder 2 sqrt(beta - 1).
double critical_disorder(int beta_base);

/// lambda_pm = +-sqrt(4 - v^2/(beta-1)).
MobilityEdges mobility_edges(double v, int beta_base);

struct Eigensystem {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< column k belongs to values[k]
};

/// Default cap on the truncated dimension (dense eigenvector storage).
inline constexpr std::int64_t kMaxTruncatedDimension = 20000;

/// Diagonal of the n x n truncation (boundary term folded into row 0).
Eigen::VectorXd truncated_diagonal(const SparsePotential& pot, std::int64_t n, double phi);

/// Full eigendecomposition of the n-site truncation. For phi = pi/2 the sites
/// are 1..n.
Eigensystem truncated_spectrum(const SparsePotential& pot, std::int64_t n, double phi,
                               std::int64_t max_dimension = kMaxTruncatedDimension);

/// Eigenvalues only.
Eigen::VectorXd truncated_eigenvalues(const SparsePotential& pot, std::int64_t n, double phi,
                                      std::int64_t max_dimension = kMaxTruncatedDimension);

/// 1 / sum |psi_i|^4 for a normalised vector.
double participation_ratio(const Eigen::Ref<const Eigen::VectorXd>& psi);

/// #{j : a_j <= R} / R.
double concentration_ratio(const SparsePotential& pot, std::int64_t radius);

}  // namespace qdlab
