#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace qdlab {

/// Number of worker threads used by parallel_for. Initialised from the
/// QDLAB_THREADS environment variable, falling back to the logical core count.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs body(i) for i in [0, n). Indices are split into contiguous blocks,
/// one per worker; each body call must only write state owned by index i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation. The association order depends only on the
/// length of the input, so reductions are bitwise reproducible.
double pairwise_sum(std::span<const double> values);

}  // namespace qdlab
