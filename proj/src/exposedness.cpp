#include "conecert/exposedness.hpp"

#include <chrono>
#include <cmath>

#include "conecert/hermitian_params.hpp"
#include "conecert/random.hpp"

namespace conecert {

namespace {

// Seed streams derived from the single user seed.
constexpr std::uint64_t kHullStream = 0x11;
constexpr std::uint64_t kDirectionStream = 0x22;
constexpr std::uint64_t kControlStream = 0x33;
constexpr std::uint64_t kPerturbStream = 0x44;
constexpr std::uint64_t kFallbackStream = 0x55;

struct EigenSplit {
  RealVector values;  // ascending
  ComplexMatrix vectors;
};

EigenSplit hermitian_eig(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

// Rank-1 PSD test on a Hermitian matrix; returns the top eigenvector scaled by
// sqrt(eigenvalue) on success.
std::optional<ComplexVector> rank1_psd_factor(const ComplexMatrix& h,
                                              double tol) {
  const EigenSplit e = hermitian_eig(h);
  const Eigen::Index d = e.values.size();
  const double top = e.values(d - 1);
  if (top <= 0.0) return std::nullopt;
  if (e.values(0) < -tol * top) return std::nullopt;
  if (d > 1 && e.values(d - 2) > tol * top) return std::nullopt;
  return ComplexVector(std::sqrt(top) * e.vectors.col(d - 1));
}

ComplexMatrix reshape_operator(const ComplexVector& w, int n, int m) {
  ComplexMatrix b(n, m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) b(i, k) = w(MapRep::index(i, k, m));
  }
  return b;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ExposedLinear: return "EXPOSED_LINEAR";
    case Verdict::ExposedConeEvidence: return "EXPOSED_CONE_EVIDENCE";
    case Verdict::NotCertified: return "NOT_CERTIFIED";
    case Verdict::InputRejected: return "INPUT_REJECTED";
  }
  return "UNKNOWN";
}

std::string to_string(MapCase c) {
  switch (c) {
    case MapCase::OmegaQ: return "OMEGA_Q";
    case MapCase::Ad: return "AD";
    case MapCase::AdTranspose: return "AD_TRANSPOSE";
  }
  return "UNKNOWN";
}

std::vector<ComplexMatrix> off_ray_directions(const NullSpaceResult& ns,
                                              const ComplexMatrix& choi,
                                              int count, std::uint64_t seed) {
  if (ns.dim < 2) throw InputError("off_ray_directions: null space dim < 2");
  const RealVector c = hermitian_to_params(choi / choi.norm());
  const RealVector coeff = ns.basis_params.transpose() * c;
  // complement of Choi(phi) inside the null space, in basis coordinates
  const RealMatrix w = null_space(RealMatrix(coeff.transpose())).basis;
  const RealMatrix complement = ns.basis_params * w;

  Rng rng = make_rng(seed, {kDirectionStream});
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<ComplexMatrix> out;
  out.reserve(count);
  const int dim = ns.n * ns.m;
  while (static_cast<int>(out.size()) < count) {
    RealVector x(complement.cols());
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
    const double nx = x.norm();
    if (nx == 0.0) continue;
    out.push_back(params_to_hermitian(complement * (x / nx), dim));
  }
  return out;
}

ConeFallbackEvidence cone_fallback(const NullSpaceResult& ns, const MapRep& phi,
                                   const FallbackParams& params) {
  if (ns.dim < 2) throw InputError("cone_fallback: null space dim must be >= 2");
  const int n = phi.dim_out();
  const int m = phi.dim_in();
  const ComplexMatrix base = phi.choi() / phi.choi().norm();

  ConeFallbackEvidence ev;
  ev.epsilons = params.epsilons;
  ev.directions_tested =
      std::min(params.max_directions, params.directions_per_dim * (ns.dim - 1));
  const auto dirs = off_ray_directions(ns, phi.choi(), ev.directions_tested,
                                       params.seed);

  SearchParams control = params.search;
  control.seed = derive_seed(params.seed, {kControlStream});
  control.tol = params.violation_tol;
  control.policy = params.policy;
  ev.control_positive =
      is_positive(MapRep(n, m, base), control).verdict ==
      PositivityVerdict::PositiveEvidence;

  SearchParams search = params.search;
  search.seed = derive_seed(params.seed, {kPerturbStream});
  search.tol = params.violation_tol;
  const auto results =
      params.policy == ExecPolicy::Parallel
          ? kernels::perturbation_search_parallel(base, dirs, params.epsilons,
                                                  n, m, search)
          : kernels::perturbation_search_serial(base, dirs, params.epsilons, n,
                                                m, search);

  ev.all_violated = true;
  ev.weakest_violation = -std::numeric_limits<double>::infinity();
  const std::size_t n_eps = params.epsilons.size();
  for (std::size_t job = 0; job < results.size(); ++job) {
    const auto& r = results[job];
    FallbackViolation v;
    v.direction = static_cast<int>(job / n_eps);
    v.epsilon = params.epsilons[job % n_eps];
    v.xi = r.xi;
    v.eta = r.eta;
    v.block_value = r.value;
    v.violated = r.violated;
    ev.all_violated = ev.all_violated && v.violated;
    ev.weakest_violation = std::max(ev.weakest_violation, r.value);
    ev.violations.push_back(std::move(v));
  }
  if (results.empty()) {
    ev.all_violated = false;
    ev.weakest_violation = 0.0;
  }
  return ev;
}

ExposednessReport certify_map(const MapRep& phi, const ExposeParams& params) {
  const auto start = std::chrono::steady_clock::now();
  ExposednessReport rep;
  rep.seed = params.seed;
  rep.tol = params.tol;
  rep.overlap_tol = params.overlap_tol;
  rep.pair_tol = params.hull.pair_tol;
  rep.violation_tol = params.fallback.violation_tol;

  HullParams hull = params.hull;
  hull.seed = derive_seed(params.seed, {kHullStream});
  hull.tol = params.tol;
  rep.nullspace = double_prime_nullspace(phi, hull);
  const SpanCheck sc = span_check(rep.nullspace, phi.choi());
  rep.overlap_with_phi = sc.overlap;
  rep.span_residual = sc.residual;

  if (sc.residual > params.span_tol) {
    rep.verdict = Verdict::NotCertified;
    rep.message = "Choi(phi) is not in the computed hull";
  } else if (rep.nullspace.dim == 1 &&
             rep.overlap_with_phi >= 1.0 - params.overlap_tol) {
    rep.verdict = Verdict::ExposedLinear;
  } else if (rep.nullspace.dim >= 2) {
    FallbackParams fb = params.fallback;
    fb.seed = derive_seed(params.seed, {kFallbackStream});
    rep.fallback = cone_fallback(rep.nullspace, phi, fb);
    const bool ok = rep.fallback->all_violated && rep.fallback->control_positive;
    rep.verdict = ok ? Verdict::ExposedConeEvidence : Verdict::NotCertified;
    if (!rep.fallback->control_positive) {
      rep.message = "positivity search rejected phi itself";
    } else if (!rep.fallback->all_violated) {
      rep.message = "an off-ray direction kept positivity evidence";
    }
  } else {
    rep.verdict = Verdict::NotCertified;
    rep.message = "hull does not contain the ray of phi";
  }
  rep.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return rep;
}

ExposednessReport certify_exposed(const ComplexMatrix& a, bool transposed,
                                  const ExposeParams& params) {
  try {
    return certify_map(choi_from_ad(a, transposed), params);
  } catch (const InputError& e) {
    ExposednessReport rep;
    rep.verdict = Verdict::InputRejected;
    rep.seed = params.seed;
    rep.tol = params.tol;
    rep.overlap_tol = params.overlap_tol;
    rep.pair_tol = params.hull.pair_tol;
    rep.violation_tol = params.fallback.violation_tol;
    rep.message = e.what();
    return rep;
  }
}

std::vector<Complex> default_z_samples() {
  return {Complex(1.0, 0.0), Complex(-1.0, 0.0), Complex(0.0, 1.0),
          Complex(2.0, 0.0)};
}

LemmaMySolution lemma_my_solution_space(const ComplexMatrix& a,
                                        const TolerancePolicy& tol,
                                        const std::vector<Complex>& z_samples) {
  require_finite(a, "lemma_my_solution_space");
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double thr = std::max(std::max(n, m) * s(0) * tol.rel_eps, tol.abs_floor);
  int r = 0;
  while (r < s.size() && s(r) > thr) ++r;
  // columns of V are eigenvectors of A^*A, ordered by decreasing eigenvalue
  const ComplexMatrix& v = svd.matrixV();
  const ComplexMatrix& u = svd.matrixU();

  // each probe (xi, w) encodes <xi, B w> = 0
  std::vector<std::pair<ComplexVector, ComplexVector>> probes;
  for (int j = r; j < m; ++j) {
    for (int i = 0; i < n; ++i) {
      probes.emplace_back(ComplexVector::Unit(n, i), v.col(j).conjugate());
    }
  }
  for (int j = 0; j < r; ++j) {
    for (int c = r; c < n; ++c) probes.emplace_back(u.col(c), v.col(j).conjugate());
  }
  for (int j = 0; j < r; ++j) {
    const ComplexVector aj = a * v.col(j);
    for (int k = 0; k < r; ++k) {
      if (k == j) continue;
      const ComplexVector ak = a * v.col(k);
      for (const Complex z : z_samples) {
        const ComplexVector zeta =
            -std::conj(z) * ak.squaredNorm() * aj + aj.squaredNorm() * ak;
        const ComplexVector rho = v.col(j) + z * v.col(k);
        probes.emplace_back(zeta, rho.conjugate());
      }
    }
  }

  ComplexMatrix sys(static_cast<Eigen::Index>(probes.size()), n * m);
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto& [xi, w] = probes[p];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < m; ++j) sys(p, i * m + j) = std::conj(xi(i)) * w(j);
    }
    const double nr = sys.row(p).norm();
    if (nr > 0.0) sys.row(p) /= nr;
  }

  const auto ns = null_space(sys, tol);
  LemmaMySolution out;
  out.rank = r;
  out.dim = ns.dim();
  out.constraint_rows = static_cast<int>(sys.rows());
  out.singular_values = ns.singular_values;
  for (int c = 0; c < ns.dim(); ++c) {
    out.basis.push_back(reshape_operator(ns.basis.col(c), n, m));
  }
  return out;
}

Classification classify(const MapRep& map, double tol) {
  if (!is_hermitian_preserving(map)) {
    throw InputError("classify: Choi matrix is not Hermitian");
  }
  const int n = map.dim_out();
  const int m = map.dim_in();
  const ComplexMatrix c = 0.5 * (map.choi() + map.choi().adjoint());

  Classification out;
  bool matched = false;
  if (auto w = rank1_psd_factor(c, tol)) {
    out.kind = MapCase::Ad;
    out.b = fix_phase(reshape_operator(*w, n, m));
    matched = true;
  } else if (auto wt = rank1_psd_factor(partial_transpose_k(c, n, m), tol)) {
    out.kind = MapCase::AdTranspose;
    out.b = fix_phase(reshape_operator(*wt, n, m));
    matched = true;
  } else {
    // realignment: M[(i,j),(k,l)] = C[(i,k),(j,l)]; operator-Schmidt rank 1
    // means C = Q' (x) S'
    ComplexMatrix realigned(n * n, m * m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l)
            realigned(i * n + j, k * m + l) =
                c(MapRep::index(i, k, m), MapRep::index(j, l, m));
    Eigen::JacobiSVD<ComplexMatrix> svd(realigned,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& s = svd.singularValues();
    if (s(0) > 0.0 && (s.size() < 2 || s(1) <= tol * s(0))) {
      ComplexMatrix qp(n, n);
      ComplexMatrix sp(m, m);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) qp(i, j) = svd.matrixU()(i * n + j, 0);
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          sp(k, l) = s(0) * std::conj(svd.matrixV()(k * m + l, 0));
      const Complex t = qp.trace();
      if (std::abs(t) > tol * qp.norm()) {
        const ComplexMatrix q = qp / t;
        const ComplexMatrix smat = sp * t;
        const double sn = smat.norm();
        if (is_hermitian(q, tol) && is_hermitian(smat / sn, tol)) {
          auto zq = rank1_psd_factor(q, tol);
          const EigenSplit se = hermitian_eig(smat / sn);
          if (zq && se.values(0) >= -tol) {
            out.kind = MapCase::OmegaQ;
            out.zeta = fix_phase(ComplexVector(zq->normalized()));
            out.q = out.zeta * out.zeta.adjoint();
            out.r = 0.5 * (smat + smat.adjoint()).transpose();
            matched = true;
          }
        }
      }
    }
  }
  if (!matched) {
    throw ClassificationError(
        "classify: map matches none of OMEGA_Q, AD, AD_TRANSPOSE");
  }
  out.reconstruction_error =
      (reconstruct(out).choi() - c).norm() / std::max(c.norm(), 1e-300);
  return out;
}

MapRep reconstruct(const Classification& c) {
  switch (c.kind) {
    case MapCase::Ad: return choi_from_ad(c.b, false);
    case MapCase::AdTranspose: return choi_from_ad(c.b, true);
    case MapCase::OmegaQ: {
      // R may carry rounding-level negative eigenvalues
      const double tol = 1e-9 * std::max(1.0, c.r.norm());
      return choi_from_omega_q(c.r, c.zeta, tol);
    }
  }
  throw ClassificationError("reconstruct: unknown case");
}

}  // namespace conecert
