#pragma once

// Face machinery for a positive map phi.
//
// Extreme rays xi xi^* (x) eta eta^* of the dual face {phi}' are indexed by
// zero-pairs (xi, eta) with phi(eta eta^*) conj(xi) = 0. A Hermiticity
// preserving psi lies in the linear hull of {phi}'' iff psi(eta eta^*)
// conj(xi) = 0 for every zero-pair, a real-linear condition on the Hermitian
// parameters of Choi(psi) (see hermitian_params.hpp).

#include <cstdint>
#include <span>
#include <vector>

#include "conecert/kernels.hpp"
#include "conecert/matrices.hpp"
#include "conecert/posmaps.hpp"

namespace conecert {

struct ZeroPair {
  ComplexVector xi;
  ComplexVector eta;
  double residual = 0.0;  // ||phi(eta eta^*) conj(xi)||
};

/// Probes on which phi(eta eta^*) has zero trace: conj(v) for v spanning the
/// kernel of T = Tr_H Choi(phi), combined like deterministic_probes so that
/// the rank-1 projectors span all Hermitian forms on that subspace. For a
/// positive map these are exactly the eta with phi(eta eta^*) = 0. Random
/// probes miss this set whenever it is a proper subspace.
std::vector<ComplexVector> null_trace_probes(const MapRep& map,
                                             const TolerancePolicy& tol = {});

struct PairStrategy {
  bool deterministic = true;  // deterministic_probes(m) and null_trace_probes
  int random_count = 0;
  std::uint64_t seed = 0;
  double pair_tol = 1e-10;
  TolerancePolicy tol;
  ExecPolicy policy = ExecPolicy::Parallel;
};

/// For each probe eta: an orthonormal kernel basis {v} of phi(eta eta^*)
/// yields pairs (conj(v), eta). Pairs whose residual exceeds
/// pair_tol * max(1, ||phi(eta eta^*)||) are dropped. Output order follows
/// the probe order.
std::vector<ZeroPair> zero_pairs(const MapRep& map, const PairStrategy& strategy);
std::vector<ZeroPair> zero_pairs_for_probes(const MapRep& map,
                                            std::span<const ComplexVector> etas,
                                            const PairStrategy& strategy);

struct ConstraintSystem {
  int n = 0;
  int m = 0;
  RealMatrix rows;              // 2n rows per pair, (nm)^2 columns
  std::vector<int> provenance;  // pair index of every row

  int row_count() const { return static_cast<int>(rows.rows()); }

  /// rows * params(D); pair p occupies entries [2np, 2np + 2n).
  RealVector evaluate(const ComplexMatrix& hermitian_choi) const;
};

ConstraintSystem assemble_constraints(std::span<const ZeroPair> pairs, int n,
                                      int m,
                                      ExecPolicy policy = ExecPolicy::Parallel);

struct NullSpaceResult {
  int n = 0;
  int m = 0;
  std::vector<ComplexMatrix> basis;  // Hermitian, Frobenius-orthonormal
  RealMatrix basis_params;           // same basis as parameter columns
  int dim = 0;
  RealVector singular_values;
  double threshold = 0.0;
  double smallest_retained = -1.0;
  double largest_null = -1.0;
  int pairs_used = 0;
  int batches = 0;               // random batches consumed
  std::vector<int> dim_history;  // after the probe batch, then per batch
};

struct HullParams {
  int batch_size = 8;
  int max_batches = 16;
  int stable_batches = 3;
  std::uint64_t seed = 0;
  TolerancePolicy tol;
  double pair_tol = 1e-10;
  ExecPolicy policy = ExecPolicy::Parallel;
};

/// Null space of the constraints collected from zero-pairs of the
/// Frobenius-normalized Choi(phi). Starts from the deterministic and
/// null-trace probes, then
/// adds batches of random probes until the dimension is unchanged for
/// `stable_batches` consecutive batches or `max_batches` is reached.
NullSpaceResult double_prime_nullspace(const MapRep& map,
                                       const HullParams& params = {});

struct SpanCheck {
  double overlap = 0.0;   // norm of the projection of the unit Choi onto the span
  double residual = 0.0;  // distance of the unit Choi from the span
};

SpanCheck span_check(const NullSpaceResult& ns, const ComplexMatrix& choi);

}  // namespace conecert
