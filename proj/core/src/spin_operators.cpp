#include "qdlab/spin_operators.hpp"

#include "qdlab/errors.hpp"

namespace qdlab {

Eigen::Matrix2cd pauli_matrix(Pauli p) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::kI: m << 1, 0, 0, 1; break;
    case Pauli::kX: m << 0, 1, 1, 0; break;
    case Pauli::kY: m << 0, C(0, -1), C(0, 1), 0; break;
    case Pauli::kZ: m << 1, 0, 0, -1; break;
  }
  return m;
}

Eigen::MatrixXcd tensor_product(std::span<const Eigen::Matrix2cd> factors) {
  require(!factors.empty() && factors.size() <= 14, "tensor_product: need 1..14 factors");
  const int n = static_cast<int>(factors.size());
  const std::size_t dim = std::size_t{1} << n;
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      std::complex<double> value = 1.0;
      for (int k = 0; k < n && value != 0.0; ++k) {
        value *= factors[static_cast<std::size_t>(k)](site_bit(r, k, n), site_bit(c, k, n));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = value;
    }
  }
  return out;
}

Eigen::MatrixXcd pauli_string(int n_sites, std::span<const std::pair<int, Pauli>> factors) {
  std::vector<Eigen::Matrix2cd> ops(static_cast<std::size_t>(n_sites), pauli_matrix(Pauli::kI));
  for (const auto& [site, p] : factors) {
    require(site >= 0 && site < n_sites, "pauli_string: site out of range");
    ops[static_cast<std::size_t>(site)] = pauli_matrix(p) * ops[static_cast<std::size_t>(site)];
  }
  return tensor_product(ops);
}

}  // namespace qdlab
