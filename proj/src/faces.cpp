#include "conecert/faces.hpp"

#include <algorithm>

#include <omp.h>

#include "conecert/hermitian_params.hpp"
#include "conecert/random.hpp"
#include "parallel_guard.hpp"

namespace conecert {

namespace {

std::vector<ZeroPair> pairs_for_probe(const MapRep& map,
                                      const ComplexVector& eta,
                                      const PairStrategy& strategy) {
  const ComplexMatrix img = conecert::apply(map, eta * eta.adjoint());
  const auto ker = null_space(img, strategy.tol);
  const double scale =
      std::max(1.0, ker.singular_values.size() ? ker.singular_values(0) : 0.0);
  std::vector<ZeroPair> out;
  for (int c = 0; c < ker.dim(); ++c) {
    const ComplexVector v = ker.basis.col(c);
    ZeroPair p{v.conjugate(), eta, (img * v).norm()};
    if (p.residual <= strategy.pair_tol * scale) out.push_back(std::move(p));
  }
  return out;
}

// Upper triangular factor of [r; rows] (same singular values).
RealMatrix compress(const RealMatrix& r, const RealMatrix& rows) {
  RealMatrix stacked(r.rows() + rows.rows(), rows.cols());
  stacked << r, rows;
  if (stacked.rows() == 0) return stacked;
  Eigen::HouseholderQR<RealMatrix> qr(stacked);
  const Eigen::Index k = std::min(stacked.rows(), stacked.cols());
  RealMatrix out = qr.matrixQR().topRows(k);
  out.triangularView<Eigen::StrictlyLower>().setZero();
  return out;
}

}  // namespace

std::vector<ComplexVector> null_trace_probes(const MapRep& map,
                                             const TolerancePolicy& tol) {
  const int n = map.dim_out();
  const int m = map.dim_in();
  const ComplexMatrix& c = map.choi();
  // Tr phi(eta eta^*) = v^* T v with v = conj(eta)
  ComplexMatrix t = ComplexMatrix::Zero(m, m);
  for (int i = 0; i < n; ++i) t += c.block(i * m, i * m, m, m);
  t = 0.5 * (t + t.adjoint());
  const auto ker = null_space(t, tol);
  std::vector<ComplexVector> out;
  const int k = ker.dim();
  if (k == 0) return out;
  for (const ComplexVector& s : deterministic_probes(k)) {
    out.push_back((ker.basis * s).conjugate());
  }
  return out;
}

std::vector<ZeroPair> zero_pairs_for_probes(const MapRep& map,
                                            std::span<const ComplexVector> etas,
                                            const PairStrategy& strategy) {
  if (!is_hermitian_preserving(map)) {
    throw InputError("zero_pairs: Choi matrix is not Hermitian");
  }
  std::vector<std::vector<ZeroPair>> per_probe(etas.size());
  const auto count = static_cast<std::int64_t>(etas.size());
  const bool par = strategy.policy == ExecPolicy::Parallel && !omp_in_parallel() &&
                   omp_get_max_threads() > 1;
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t e = 0; e < count; ++e) {
    guard.run([&] { per_probe[e] = pairs_for_probe(map, etas[e], strategy); });
  }
  guard.rethrow();
  std::vector<ZeroPair> out;
  for (auto& v : per_probe) {
    for (auto& p : v) out.push_back(std::move(p));
  }
  return out;
}

std::vector<ZeroPair> zero_pairs(const MapRep& map, const PairStrategy& strategy) {
  std::vector<ComplexVector> etas;
  if (strategy.deterministic) {
    etas = deterministic_probes(map.dim_in());
    for (auto& e : null_trace_probes(map, strategy.tol)) etas.push_back(std::move(e));
  }
  Rng rng = make_rng(strategy.seed, {0x2e70ULL});
  for (int s = 0; s < strategy.random_count; ++s) {
    etas.push_back(random_unit_vector(map.dim_in(), rng));
  }
  return zero_pairs_for_probes(map, etas, strategy);
}

RealVector ConstraintSystem::evaluate(const ComplexMatrix& hermitian_choi) const {
  return rows * hermitian_to_params(hermitian_choi);
}

ConstraintSystem assemble_constraints(std::span<const ZeroPair> pairs, int n,
                                      int m, ExecPolicy policy) {
  std::vector<ComplexVector> xis;
  std::vector<ComplexVector> etas;
  xis.reserve(pairs.size());
  etas.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (p.xi.size() != n || p.eta.size() != m) {
      throw InputError("assemble_constraints: pair does not match " +
                       shape_string(n, m));
    }
    xis.push_back(p.xi);
    etas.push_back(p.eta);
  }
  ConstraintSystem sys;
  sys.n = n;
  sys.m = m;
  sys.rows = policy == ExecPolicy::Parallel
                 ? kernels::assemble_rows_parallel(xis, etas, n, m)
                 : kernels::assemble_rows_serial(xis, etas, n, m);
  sys.provenance.reserve(sys.rows.rows());
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) {
    for (int r = 0; r < 2 * n; ++r) sys.provenance.push_back(p);
  }
  return sys;
}

NullSpaceResult double_prime_nullspace(const MapRep& map,
                                       const HullParams& params) {
  if (!is_hermitian_preserving(map)) {
    throw InputError("double_prime_nullspace: Choi matrix is not Hermitian");
  }
  const int n = map.dim_out();
  const int m = map.dim_in();
  const int cols = (n * m) * (n * m);
  const double norm = map.choi().norm();
  if (norm == 0.0) throw InputError("double_prime_nullspace: zero map");
  const MapRep unit(n, m, map.choi() / norm);

  PairStrategy strategy;
  strategy.pair_tol = params.pair_tol;
  strategy.tol = params.tol;
  strategy.policy = params.policy;

  NullSpaceResult out;
  out.n = n;
  out.m = m;
  RealMatrix r(0, cols);
  NullSpace<double> ns;

  auto absorb = [&](std::span<const ComplexVector> etas) {
    const auto pairs = zero_pairs_for_probes(unit, etas, strategy);
    out.pairs_used += static_cast<int>(pairs.size());
    const auto sys = assemble_constraints(pairs, n, m, params.policy);
    r = compress(r, sys.rows);
    ns = null_space(r, params.tol);
    out.dim_history.push_back(ns.dim());
  };

  std::vector<ComplexVector> initial = deterministic_probes(m);
  for (auto& e : null_trace_probes(unit, params.tol)) initial.push_back(std::move(e));
  absorb(initial);
  Rng rng = make_rng(params.seed, {0x4a11ULL});
  int stable = 0;
  while (out.batches < params.max_batches && stable < params.stable_batches) {
    std::vector<ComplexVector> etas;
    for (int s = 0; s < params.batch_size; ++s) {
      etas.push_back(random_unit_vector(m, rng));
    }
    const int before = ns.dim();
    absorb(etas);
    ++out.batches;
    stable = ns.dim() == before ? stable + 1 : 0;
  }

  out.dim = ns.dim();
  out.basis_params = ns.basis;
  out.singular_values = ns.singular_values;
  out.threshold = ns.threshold;
  out.smallest_retained = ns.smallest_retained;
  out.largest_null = ns.largest_null;
  for (int c = 0; c < out.dim; ++c) {
    out.basis.push_back(params_to_hermitian(ns.basis.col(c), n * m));
  }
  return out;
}

SpanCheck span_check(const NullSpaceResult& ns, const ComplexMatrix& choi) {
  SpanCheck out;
  const double norm = choi.norm();
  if (norm == 0.0) return out;
  const RealVector c = hermitian_to_params(choi / norm);
  if (ns.dim == 0) {
    out.residual = c.norm();
    return out;
  }
  const RealVector coeff = ns.basis_params.transpose() * c;
  out.overlap = coeff.norm();
  out.residual = (c - ns.basis_params * coeff).norm();
  return out;
}

}  // namespace conecert
