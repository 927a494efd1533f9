#pragma once

// Seeded instance generation. Every random quantity in the library is drawn
// from an Rng built here, so a single integer seed reproduces a run.

#include <cstdint>
#include <initializer_list>
#include <random>

#include "conecert/matrices.hpp"

namespace conecert {

using Rng = std::mt19937_64;

/// Mixes a base seed with stream tags (splitmix64 chain). Distinct tag lists
/// give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> tags);

inline Rng make_rng(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> tags = {}) {
  return Rng(derive_seed(seed, tags));
}

/// Entries i.i.d. complex standard normal: real and imaginary parts N(0, 1/2).
ComplexMatrix random_complex_normal(int rows, int cols, Rng& rng);
ComplexVector random_complex_vector(int dim, Rng& rng);
ComplexVector random_unit_vector(int dim, Rng& rng);

/// Complex normal matrix truncated to its `rank` leading singular triples.
ComplexMatrix random_rank_matrix(int rows, int cols, int rank, Rng& rng);

/// G G^* with G of shape dim x rank.
ComplexMatrix random_psd(int dim, int rank, Rng& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(int dim, Rng& rng);

}  // namespace conecert
