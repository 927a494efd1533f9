#pragma once

// Hot loops of the library, each in a serial reference form and an OpenMP
// form. The two forms return bit-identical results for the same inputs: the
// parallel form only changes which thread evaluates an independent work item,
// and results are merged in work-item order.

#include <cstdint>
#include <span>
#include <vector>

#include "conecert/matrices.hpp"

namespace conecert {

enum class ExecPolicy { Serial, Parallel };

/// Parameters of the block-positivity search (alternating minimization of
/// <xi (x) eta, C xi (x) eta> over unit xi, eta).
struct SearchParams {
  int restarts = 64;
  int iterations = 200;
  double tol = 1e-9;  // a block value below -tol is a violation
  std::uint64_t seed = 0;
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct BlockSearchResult {
  double value = 0.0;  // smallest block value reached
  ComplexVector xi;
  ComplexVector eta;
  int restart = -1;  // restart that produced `value`
  int restarts_run = 0;
  bool violated = false;  // value < -tol
};

namespace kernels {

/// M[i][j] = eta^* C_ij eta, where C_ij is the (i, j) block of size m x m.
ComplexMatrix contract_eta(const ComplexMatrix& choi, int n, int m,
                           const ComplexVector& eta);
/// N[k][l] = sum_ij conj(xi_i) xi_j C_ij[k][l].
ComplexMatrix contract_xi(const ComplexMatrix& choi, int n, int m,
                          const ComplexVector& xi);

double block_value(const ComplexMatrix& choi, const ComplexVector& xi,
                   const ComplexVector& eta);

/// One seeded restart of the alternating minimization. Deterministic in
/// (seed, restart). Even restarts start from a random eta, odd ones from a
/// random xi.
BlockSearchResult block_restart(const ComplexMatrix& choi, int n, int m,
                                std::uint64_t seed, int restart,
                                int iterations);

/// Runs restarts in index order and stops at the first violating restart;
/// otherwise returns the minimum (earliest restart on ties).
BlockSearchResult block_minimum_serial(const ComplexMatrix& choi, int n, int m,
                                       const SearchParams& params);
BlockSearchResult block_minimum_parallel(const ComplexMatrix& choi, int n,
                                         int m, const SearchParams& params);

/// Dispatches on params.policy. Falls back to serial inside an active
/// parallel region.
BlockSearchResult block_minimum(const ComplexMatrix& choi, int n, int m,
                                const SearchParams& params);

/// Real constraint rows for one zero-pair: rows [0, n) hold the real parts
/// and rows [n, 2n) the imaginary parts of (psi(eta eta^*) conj(xi))_i as
/// linear forms in the Hermitian parameter vector of Choi(psi).
RealMatrix pair_rows(const ComplexVector& xi, const ComplexVector& eta, int n,
                     int m);

RealMatrix assemble_rows_serial(std::span<const ComplexVector> xis,
                                std::span<const ComplexVector> etas, int n,
                                int m);
RealMatrix assemble_rows_parallel(std::span<const ComplexVector> xis,
                                  std::span<const ComplexVector> etas, int n,
                                  int m);

/// Block search on base + eps * directions[d] for every (d, eps) pair, job
/// index d * epsilons.size() + e. Each job uses params.seed with the job
/// index mixed in.
std::vector<BlockSearchResult> perturbation_search_serial(
    const ComplexMatrix& base, std::span<const ComplexMatrix> directions,
    std::span<const double> epsilons, int n, int m, const SearchParams& params);
std::vector<BlockSearchResult> perturbation_search_parallel(
    const ComplexMatrix& base, std::span<const ComplexMatrix> directions,
    std::span<const double> epsilons, int n, int m, const SearchParams& params);

}  // namespace kernels
}  // namespace conecert
