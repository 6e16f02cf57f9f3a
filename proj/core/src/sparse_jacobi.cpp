#include "qdlab/sparse_jacobi.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qdlab/errors.hpp"
#include "qdlab/rng.hpp"

namespace qdlab {
namespace {

constexpr double kPi = std::numbers::pi;

void check_positions_fit(int beta_base, int count) {
  // Positions grow like beta^(count+1); keep them well inside int64.
  const double log2_last = (count + 1) * std::log2(static_cast<double>(beta_base));
  if (log2_last > 61.0) {
    throw ResourceLimit("bump positions beta^" + std::to_string(count + 1) + " overflow 64-bit site indices");
  }
}

double alpha_of(double lambda) {
  require(std::abs(lambda) < 2.0, "Prufer evolution needs |lambda| < 2 (elliptic free step), got " +
                                      std::to_string(lambda));
  return std::acos(lambda / 2.0);
}

// Rotation of (x, y) by a (possibly huge) multiple of alpha.
double wrapped_angle(std::int64_t steps, double alpha) {
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  return static_cast<double>(std::remainder(static_cast<long double>(steps) * alpha, two_pi));
}

std::int64_t truncation_offset(double phi) { return is_pinned_boundary(phi) ? 1 : 0; }

}  // namespace

void SparseModelParams::validate() const {
  require(beta_base >= 2, "beta_base must be an integer >= 2");
  require(v > 0.0 && v < 1.0, "v must lie in (0, 1)");
  require(phi >= 0.0 && phi < kPi, "phi must lie in [0, pi)");
  require(max_bump_index >= 1, "max_bump_index must be >= 1");
  check_positions_fit(beta_base, max_bump_index);
}

double SparsePotential::at(std::int64_t site) const {
  return std::binary_search(positions.begin(), positions.end(), site) ? v : 0.0;
}

std::vector<std::int64_t> sparse_base_positions(int beta_base, int count) {
  require(beta_base >= 2, "beta_base must be >= 2");
  require(count >= 1, "need at least one bump");
  check_positions_fit(beta_base, count);
  std::vector<std::int64_t> base(static_cast<std::size_t>(count));
  std::int64_t power = beta_base;
  base[0] = beta_base - 1;
  for (int j = 2; j <= count; ++j) {
    power *= beta_base;
    base[static_cast<std::size_t>(j - 1)] = base[static_cast<std::size_t>(j - 2)] + power;
  }
  return base;
}

SparsePotential build_potential(const SparseModelParams& params) {
  params.validate();
  std::vector<std::int64_t> omegas(static_cast<std::size_t>(params.max_bump_index));
  for (int j = 1; j <= params.max_bump_index; ++j) {
    CounterRng stream(params.seed, StreamPurpose::kBumpOffset, static_cast<std::uint64_t>(j));
    omegas[static_cast<std::size_t>(j - 1)] = stream.uniform_int(-j, j);
  }
  return build_potential(params.beta_base, params.v, omegas);
}

SparsePotential build_potential(int beta_base, double v, std::span<const std::int64_t> omegas) {
  const auto base = sparse_base_positions(beta_base, static_cast<int>(omegas.size()));
  SparsePotential pot;
  pot.v = v;
  pot.omegas.assign(omegas.begin(), omegas.end());
  pot.positions.resize(base.size());
  for (std::size_t j = 0; j < base.size(); ++j) {
    const auto index = static_cast<std::int64_t>(j + 1);
    require(std::abs(omegas[j]) <= index, "omega_j must satisfy |omega_j| <= j");
    pot.positions[j] = base[j] + omegas[j];
  }
  return pot;
}

SparsePotential potential_from_sites(std::vector<std::int64_t> sites, double v) {
  for (std::size_t k = 0; k < sites.size(); ++k) {
    require(sites[k] >= 0, "bump sites must be non-negative");
    require(k == 0 || sites[k] > sites[k - 1], "bump sites must be strictly increasing");
  }
  SparsePotential pot;
  pot.positions = std::move(sites);
  pot.v = v;
  pot.omegas.assign(pot.positions.size(), 0);
  return pot;
}

bool is_pinned_boundary(double phi) { return std::abs(phi - kPi / 2.0) < 1e-12; }

std::vector<double> apply_operator(std::span<const double> u, const SparsePotential& pot, double phi) {
  require(!u.empty(), "apply_operator: empty input");
  const auto n = u.size();
  std::vector<double> out(n, 0.0);
  const bool pinned = is_pinned_boundary(phi);
  const std::size_t first = pinned ? 1 : 0;
  for (std::size_t k = first; k < n; ++k) {
    double value = pot.at(static_cast<std::int64_t>(k)) * u[k];
    if (k + 1 < n) value += u[k + 1];
    if (k > first) {
      value += u[k - 1];
    } else if (!pinned) {
      value += std::tan(phi) * u[0];  // u_{-1} = tan(phi) u_0
    }
    out[k] = value;
  }
  return out;
}

Eigen::Matrix2d transfer_step(double lambda, double v_n) {
  Eigen::Matrix2d m;
  m << lambda - v_n, -1.0, 1.0, 0.0;
  return m;
}

Eigen::Matrix2d prufer_frame(double alpha) {
  Eigen::Matrix2d f;
  f << 1.0, -std::cos(alpha), 0.0, std::sin(alpha);
  return f;
}

PruferTrajectory prufer_evolve(double lambda, const SparsePotential& pot, double phi) {
  const double alpha = alpha_of(lambda);
  const double sin_alpha = std::sin(alpha);
  PruferTrajectory traj;
  traj.energy = lambda;
  traj.angle = alpha;

  const Eigen::Vector2d start = prufer_frame(alpha) * Eigen::Vector2d(std::cos(phi), std::sin(phi));
  double radius = start.norm();
  double theta = std::atan2(start.y(), start.x());
  traj.initial_radius = radius;
  traj.radii.reserve(pot.bump_count());
  traj.phases.reserve(pot.bump_count());

  std::int64_t site = 0;  // next site to process
  for (const std::int64_t bump : pot.positions) {
    // Free sites site..bump-1 and the rotation half of the bump site.
    theta = std::remainder(theta + wrapped_angle(bump - site + 1, alpha), 2.0 * kPi);
    const double x = std::cos(theta) - pot.v * std::sin(theta) / sin_alpha;
    const double y = std::sin(theta);
    radius *= std::hypot(x, y);
    theta = std::atan2(y, x);
    traj.radii.push_back(radius);
    traj.phases.push_back(theta);
    site = bump + 1;
  }
  return traj;
}

std::vector<double> prufer_radius_path(double lambda, const SparsePotential& pot, double phi,
                                       std::int64_t n_sites) {
  require(n_sites >= 1, "prufer_radius_path: need at least one site");
  const double alpha = alpha_of(lambda);
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  Eigen::Vector2d xy = prufer_frame(alpha) * Eigen::Vector2d(std::cos(phi), std::sin(phi));
  std::vector<double> radii(static_cast<std::size_t>(n_sites));
  for (std::int64_t site = 0; site < n_sites; ++site) {
    const double x = c * xy.x() - s * xy.y();
    const double y = s * xy.x() + c * xy.y();
    xy = {x - pot.at(site) * y / s, y};
    radii[static_cast<std::size_t>(site)] = xy.norm();
  }
  return radii;
}

Eigen::Vector2d direct_transfer(double lambda, const SparsePotential& pot, double phi, std::int64_t m) {
  require(m >= 0, "direct_transfer: last site must be non-negative");
  Eigen::Vector2d state(std::cos(phi), std::sin(phi));
  for (std::int64_t site = 0; site <= m; ++site) state = transfer_step(lambda, pot.at(site)) * state;
  return state;
}

const char* region_label(SpectralRegion region) {
  switch (region) {
    case SpectralRegion::kSingularContinuous: return "SC";
    case SpectralRegion::kPurePoint: return "PP";
    case SpectralRegion::kEdge: return "EDGE";
    case SpectralRegion::kExcluded: return "EXCLUDED";
  }
  return "?";
}

double sparse_criterion(double lambda, double v, int beta_base) {
  return (beta_base - 1.0) * (4.0 - lambda * lambda) / (v * v);
}

bool near_rational(double x, int max_denominator, double tol) {
  for (int q = 1; q <= max_denominator; ++q) {
    const double p = std::round(x * q);
    if (std::abs(x - p / q) <= tol) return true;
  }
  return false;
}

RegionClassification classify_energy(double lambda, double v, int beta_base, const ClassifyOptions& options) {
  require(std::abs(lambda) <= 2.0, "classify_energy: lambda must lie in [-2, 2]");
  require(v > 0.0, "classify_energy: v must be positive");
  require(beta_base >= 2, "classify_energy: beta_base must be >= 2");
  RegionClassification result;
  result.criterion_value = sparse_criterion(lambda, v, beta_base);
  if (result.criterion_value > 1.0 + options.edge_tol) {
    result.label = SpectralRegion::kSingularContinuous;
  } else if (result.criterion_value < 1.0 - options.edge_tol) {
    result.label = SpectralRegion::kPurePoint;
  } else {
    result.label = SpectralRegion::kEdge;
  }
  if (options.max_denominator > 0 &&
      near_rational(std::acos(lambda / 2.0) / kPi, options.max_denominator, options.rational_tol)) {
    result.label = SpectralRegion::kExcluded;
  }
  return result;
}

RegionClassification classify_energy(double lambda, const SparseModelParams& params, const ClassifyOptions& options) {
  return classify_energy(lambda, params.v, params.beta_base, options);
}

double critical_disorder(int beta_base) {
  require(beta_base >= 2, "beta_base must be >= 2");
  return 2.0 * std::sqrt(beta_base - 1.0);
}

MobilityEdges mobility_edges(double v, int beta_base) {
  require(v > 0.0, "mobility_edges: v must be positive");
  MobilityEdges edges;
  if (v >= critical_disorder(beta_base)) {
    edges.sc_window_empty = true;
    return edges;
  }
  edges.upper = std::sqrt(4.0 - v * v / (beta_base - 1.0));
  edges.lower = -edges.upper;
  return edges;
}

Eigen::VectorXd truncated_diagonal(const SparsePotential& pot, std::int64_t n, double phi) {
  require(n >= 2, "truncated spectrum needs n >= 2");
  const std::int64_t offset = truncation_offset(phi);
  Eigen::VectorXd diag(n);
  for (std::int64_t k = 0; k < n; ++k) diag[k] = pot.at(k + offset);
  if (offset == 0) diag[0] += std::tan(phi);
  return diag;
}

namespace {

void check_budget(std::int64_t n, std::int64_t max_dimension) {
  if (n > max_dimension) {
    throw ResourceLimit("truncated dimension " + std::to_string(n) + " exceeds the budget of " +
                        std::to_string(max_dimension));
  }
}

}  // namespace

Eigensystem truncated_spectrum(const SparsePotential& pot, std::int64_t n, double phi, std::int64_t max_dimension) {
  check_budget(n, max_dimension);
  Eigensystem sys;
  sys.values = truncated_diagonal(pot, n, phi);
  Eigen::VectorXd off = Eigen::VectorXd::Ones(n - 1);
  sys.vectors.resize(n, n);
  const lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(n), sys.values.data(),
                                         off.data(), sys.vectors.data(), static_cast<lapack_int>(n));
  if (info != 0) throw std::runtime_error("dstevd failed with info " + std::to_string(info));
  return sys;
}

Eigen::VectorXd truncated_eigenvalues(const SparsePotential& pot, std::int64_t n, double phi,
                                      std::int64_t max_dimension) {
  check_budget(n, max_dimension);
  Eigen::VectorXd values = truncated_diagonal(pot, n, phi);
  Eigen::VectorXd off = Eigen::VectorXd::Ones(n - 1);
  const lapack_int info = LAPACKE_dsterf(static_cast<lapack_int>(n), values.data(), off.data());
  if (info != 0) throw std::runtime_error("dsterf failed with info " + std::to_string(info));
  return values;
}

double participation_ratio(const Eigen::Ref<const Eigen::VectorXd>& psi) {
  const double norm2 = psi.squaredNorm();
  require(norm2 > 0.0, "participation_ratio: zero vector");
  return norm2 * norm2 / psi.array().pow(4).sum();
}

double concentration_ratio(const SparsePotential& pot, std::int64_t radius) {
  require(radius >= 1, "concentration_ratio: R must be >= 1");
  const auto count = std::upper_bound(pot.positions.begin(), pot.positions.end(), radius) - pot.positions.begin();
  return static_cast<double>(count) / static_cast<double>(radius);
}

}  // namespace qdlab
