#include "conecert/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "conecert/hermitian_params.hpp"
#include "conecert/random.hpp"
#include "parallel_guard.hpp"

namespace conecert::kernels {

namespace {

struct MinEig {
  double value;
  ComplexVector vector;
};

MinEig min_eigenpair(const ComplexMatrix& h) {
  if (h.rows() == 1) {
    return {h(0, 0).real(), ComplexVector::Ones(1)};
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) {
    throw NumericalError("block search: eigensolver failed");
  }
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

bool parallel_allowed(ExecPolicy policy) {
  return policy == ExecPolicy::Parallel && !omp_in_parallel() &&
         omp_get_max_threads() > 1;
}

// Serial merge rule shared by both search forms: the first violating restart
// wins, otherwise the strict minimum with the earliest index.
bool better(const BlockSearchResult& cand, const BlockSearchResult& best) {
  return best.restart < 0 || cand.value < best.value;
}

}  // namespace

ComplexMatrix contract_eta(const ComplexMatrix& choi, int n, int m,
                           const ComplexVector& eta) {
  ComplexMatrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) = eta.dot(choi.block(i * m, j * m, m, m) * eta);
    }
  }
  return 0.5 * (out + out.adjoint());
}

ComplexMatrix contract_xi(const ComplexMatrix& choi, int n, int m,
                          const ComplexVector& xi) {
  ComplexMatrix out = ComplexMatrix::Zero(m, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex w = std::conj(xi(i)) * xi(j);
      if (w != Complex(0.0)) out += w * choi.block(i * m, j * m, m, m);
    }
  }
  return 0.5 * (out + out.adjoint());
}

double block_value(const ComplexMatrix& choi, const ComplexVector& xi,
                   const ComplexVector& eta) {
  const ComplexVector u = kron(xi, eta);
  return u.dot(choi * u).real();
}

BlockSearchResult block_restart(const ComplexMatrix& choi, int n, int m,
                                std::uint64_t seed, int restart,
                                int iterations) {
  Rng rng = make_rng(seed, {0xb10cULL, static_cast<std::uint64_t>(restart)});
  BlockSearchResult r;
  r.restart = restart;
  r.restarts_run = 1;
  // Odd restarts start from xi. Starting from eta alone can stall: when the
  // contracted block M_eta is PSD with a large kernel, xi lands in it and the
  // xi-contraction vanishes identically.
  if (restart % 2 == 1) {
    r.xi = random_unit_vector(n, rng);
    r.eta = min_eigenpair(contract_xi(choi, n, m, r.xi)).vector;
  } else {
    r.eta = random_unit_vector(m, rng);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < std::max(1, iterations); ++it) {
    r.xi = min_eigenpair(contract_eta(choi, n, m, r.eta)).vector;
    const MinEig step = min_eigenpair(contract_xi(choi, n, m, r.xi));
    r.eta = step.vector;
    r.value = step.value;
    if (std::abs(prev - r.value) <= 1e-15 * (1.0 + std::abs(r.value))) break;
    prev = r.value;
  }
  return r;
}

BlockSearchResult block_minimum_serial(const ComplexMatrix& choi, int n, int m,
                                       const SearchParams& params) {
  BlockSearchResult best;
  for (int k = 0; k < params.restarts; ++k) {
    BlockSearchResult r =
        block_restart(choi, n, m, params.seed, k, params.iterations);
    r.violated = r.value < -params.tol;
    if (r.violated) {
      r.restarts_run = k + 1;
      return r;
    }
    if (better(r, best)) best = std::move(r);
  }
  best.restarts_run = params.restarts;
  return best;
}

BlockSearchResult block_minimum_parallel(const ComplexMatrix& choi, int n,
                                         int m, const SearchParams& params) {
  const int chunk = std::max(1, omp_get_max_threads());
  BlockSearchResult best;
  std::vector<BlockSearchResult> batch;
  for (int start = 0; start < params.restarts; start += chunk) {
    const int count = std::min(chunk, params.restarts - start);
    batch.assign(count, {});
    detail::ParallelGuard guard;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < count; ++k) {
      guard.run([&] {
        batch[k] = block_restart(choi, n, m, params.seed, start + k,
                                 params.iterations);
      });
    }
    guard.rethrow();
    for (int k = 0; k < count; ++k) {
      BlockSearchResult& r = batch[k];
      r.violated = r.value < -params.tol;
      if (r.violated) {
        r.restarts_run = start + k + 1;
        return r;
      }
      if (better(r, best)) best = std::move(r);
    }
  }
  best.restarts_run = params.restarts;
  return best;
}

BlockSearchResult block_minimum(const ComplexMatrix& choi, int n, int m,
                                const SearchParams& params) {
  if (parallel_allowed(params.policy)) {
    return block_minimum_parallel(choi, n, m, params);
  }
  return block_minimum_serial(choi, n, m, params);
}

RealMatrix pair_rows(const ComplexVector& xi, const ComplexVector& eta, int n,
                     int m) {
  const int dim = n * m;
  const HermitianLayout layout(dim);
  RealMatrix rows = RealMatrix::Zero(2 * n, layout.size());
  // Equation i reads sum_{k,j,l} D[(i,k),(j,l)] eta_k conj(eta_l) conj(xi_j).
  // coeff(a, b) is the weight of D[a][b]; it vanishes unless a lies in block i.
  const ComplexVector xbar = xi.conjugate();
  for (int i = 0; i < n; ++i) {
    auto coeff = [&](int a, int b) -> Complex {
      if (a / m != i) return 0.0;
      const int k = a % m;
      const int j = b / m;
      const int l = b % m;
      return eta(k) * std::conj(eta(l)) * xbar(j);
    };
    for (int a = 0; a < dim; ++a) {
      const Complex c = coeff(a, a);
      const int p = layout.diagonal(a);
      rows(i, p) = c.real();
      rows(n + i, p) = c.imag();
    }
    for (int a = 0; a < dim; ++a) {
      for (int b = a + 1; b < dim; ++b) {
        const Complex cab = coeff(a, b);
        const Complex cba = coeff(b, a);
        if (cab == Complex(0.0) && cba == Complex(0.0)) continue;
        const Complex re_w = (cab + cba) * kInvSqrt2;
        const Complex im_w = Complex(0.0, 1.0) * (cab - cba) * kInvSqrt2;
        const int pr = layout.real_part(a, b);
        const int pi = layout.imag_part(a, b);
        rows(i, pr) = re_w.real();
        rows(n + i, pr) = re_w.imag();
        rows(i, pi) = im_w.real();
        rows(n + i, pi) = im_w.imag();
      }
    }
  }
  return rows;
}

RealMatrix assemble_rows_serial(std::span<const ComplexVector> xis,
                                std::span<const ComplexVector> etas, int n,
                                int m) {
  const int cols = (n * m) * (n * m);
  const auto count = static_cast<Eigen::Index>(xis.size());
  RealMatrix out(2 * n * count, cols);
  for (Eigen::Index p = 0; p < count; ++p) {
    out.middleRows(2 * n * p, 2 * n) = pair_rows(xis[p], etas[p], n, m);
  }
  return out;
}

RealMatrix assemble_rows_parallel(std::span<const ComplexVector> xis,
                                  std::span<const ComplexVector> etas, int n,
                                  int m) {
  if (!parallel_allowed(ExecPolicy::Parallel)) {
    return assemble_rows_serial(xis, etas, n, m);
  }
  const int cols = (n * m) * (n * m);
  const auto count = static_cast<Eigen::Index>(xis.size());
  RealMatrix out(2 * n * count, cols);
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(static)
  for (Eigen::Index p = 0; p < count; ++p) {
    guard.run([&] {
      out.middleRows(2 * n * p, 2 * n) = pair_rows(xis[p], etas[p], n, m);
    });
  }
  guard.rethrow();
  return out;
}

namespace {

BlockSearchResult perturbation_job(const ComplexMatrix& base,
                                   std::span<const ComplexMatrix> directions,
                                   std::span<const double> epsilons, int n,
                                   int m, const SearchParams& params,
                                   std::size_t job) {
  const std::size_t d = job / epsilons.size();
  const std::size_t e = job % epsilons.size();
  const ComplexMatrix candidate = base + epsilons[e] * directions[d];
  SearchParams p = params;
  p.seed = derive_seed(params.seed, {0xfa11ULL, job});
  return block_minimum_serial(candidate, n, m, p);
}

}  // namespace

std::vector<BlockSearchResult> perturbation_search_serial(
    const ComplexMatrix& base, std::span<const ComplexMatrix> directions,
    std::span<const double> epsilons, int n, int m,
    const SearchParams& params) {
  std::vector<BlockSearchResult> out(directions.size() * epsilons.size());
  for (std::size_t job = 0; job < out.size(); ++job) {
    out[job] = perturbation_job(base, directions, epsilons, n, m, params, job);
  }
  return out;
}

std::vector<BlockSearchResult> perturbation_search_parallel(
    const ComplexMatrix& base, std::span<const ComplexMatrix> directions,
    std::span<const double> epsilons, int n, int m,
    const SearchParams& params) {
  if (!parallel_allowed(ExecPolicy::Parallel)) {
    return perturbation_search_serial(base, directions, epsilons, n, m, params);
  }
  std::vector<BlockSearchResult> out(directions.size() * epsilons.size());
  const auto jobs = static_cast<std::int64_t>(out.size());
  detail::ParallelGuard guard;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t job = 0; job < jobs; ++job) {
    guard.run([&] {
      out[job] = perturbation_job(base, directions, epsilons, n, m, params,
                                  static_cast<std::size_t>(job));
    });
  }
  guard.rethrow();
  return out;
}

}  // namespace conecert::kernels
