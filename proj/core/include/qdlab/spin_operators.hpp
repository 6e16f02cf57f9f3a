#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace qdlab {

enum class Pauli { kI, kX, kY, kZ };

Eigen::Matrix2cd pauli_matrix(Pauli p);

/// Dense tensor product f_0 (x) f_1 (x) ... (x) f_{n-1}; site 0 is the most
/// significant bit of the basis index.
Eigen::MatrixXcd tensor_product(std::span<const Eigen::Matrix2cd> factors);

/// Product of Pauli matrices on the listed sites, identity elsewhere.
Eigen::MatrixXcd pauli_string(int n_sites, std::span<const std::pair<int, Pauli>> factors);

/// Bit of `site` in a basis index (site 0 is the most significant bit).
inline int site_bit(std::size_t index, int site, int n_sites) {
  return static_cast<int>((index >> (n_sites - 1 - site)) & 1U);
}

}  // namespace qdlab
