#include "conecert/posmaps.hpp"

#include <cmath>

#include "conecert/hermitian_params.hpp"
#include "conecert/random.hpp"

namespace conecert {

namespace {

void require_hermitian_preserving(const MapRep& map, const char* where) {
  if (!is_hermitian_preserving(map)) {
    throw InputError(std::string(where) + ": Choi matrix is not Hermitian");
  }
}

}  // namespace

MapRep::MapRep(int dim_out, int dim_in, ComplexMatrix choi)
    : n_(dim_out), m_(dim_in), choi_(std::move(choi)) {
  if (n_ <= 0 || m_ <= 0) throw InputError("MapRep: dimensions must be positive");
  const Eigen::Index d = static_cast<Eigen::Index>(n_) * m_;
  if (choi_.rows() != d || choi_.cols() != d) {
    throw InputError("MapRep: Choi matrix is " +
                     shape_string(choi_.rows(), choi_.cols()) + ", expected " +
                     shape_string(d, d));
  }
  require_finite(choi_, "MapRep");
}

SeparableElement::SeparableElement(ComplexMatrix x_factor,
                                   ComplexMatrix y_factor, double tol)
    : x_(std::move(x_factor)), y_(std::move(y_factor)) {
  require_finite(x_, "SeparableElement x_factor");
  require_finite(y_, "SeparableElement y_factor");
  if (!is_psd(x_, tol).psd || !is_psd(y_, tol).psd) {
    throw InputError("SeparableElement: factors must be PSD");
  }
}

MapRep choi_from_ad(const ComplexMatrix& a, bool transposed) {
  require_finite(a, "choi_from_ad");
  if (a.cwiseAbs().maxCoeff() == 0.0) {
    throw InputError("choi_from_ad: A = 0 is the apex map");
  }
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(a.cols());
  // w = sum_k (A e_k) (x) e_k, i.e. w[(i,k)] = A[i][k]
  ComplexVector w(n * m);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < m; ++k) w(MapRep::index(i, k, m)) = a(i, k);
  }
  ComplexMatrix choi = w * w.adjoint();
  if (transposed) choi = partial_transpose_k(choi, n, m);
  return MapRep(n, m, std::move(choi));
}

MapRep choi_from_omega_q(const ComplexMatrix& r, const ComplexVector& zeta,
                         double tol) {
  require_finite(r, "choi_from_omega_q R");
  require_finite(zeta, "choi_from_omega_q zeta");
  if (r.rows() != r.cols()) throw InputError("choi_from_omega_q: R must be square");
  if (!is_psd(r, tol).psd) throw InputError("choi_from_omega_q: R is not PSD");
  if (r.cwiseAbs().maxCoeff() == 0.0) {
    throw InputError("choi_from_omega_q: R = 0 is the apex map");
  }
  const double nz = zeta.squaredNorm();
  if (nz == 0.0) throw InputError("choi_from_omega_q: zeta must be nonzero");
  const ComplexMatrix q = zeta * zeta.adjoint() / nz;
  return MapRep(static_cast<int>(zeta.size()), static_cast<int>(r.rows()),
                kron(q, ComplexMatrix(r.transpose())));
}

ComplexMatrix apply(const MapRep& map, const ComplexMatrix& y) {
  const int n = map.dim_out();
  const int m = map.dim_in();
  if (y.rows() != m || y.cols() != m) {
    throw InputError("apply: input is " + shape_string(y.rows(), y.cols()) +
                     ", map expects " + shape_string(m, m));
  }
  ComplexMatrix out(n, n);
  const ComplexMatrix& c = map.choi();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out(i, j) = c.block(i * m, j * m, m, m).cwiseProduct(y).sum();
    }
  }
  return out;
}

Complex pairing(const MapRep& map, const SeparableElement& w) {
  const auto& x = w.x_factor();
  if (x.rows() != map.dim_out() || x.cols() != map.dim_out()) {
    throw InputError("pairing: X factor does not match dim H");
  }
  const ComplexMatrix py = conecert::apply(map, w.y_factor());
  return (py * x.transpose()).trace();
}

Complex pairing(const MapRep& map, const ComplexMatrix& w) {
  const auto& c = map.choi();
  if (w.rows() != c.rows() || w.cols() != c.cols()) {
    throw InputError("pairing: operand is " + shape_string(w.rows(), w.cols()) +
                     ", expected " + shape_string(c.rows(), c.cols()));
  }
  // Tr(C W^T) = sum_ab C[a][b] W[a][b]
  return c.cwiseProduct(w).sum();
}

ComplexMatrix partial_transpose_k(const ComplexMatrix& choi, int n, int m) {
  ComplexMatrix out(choi.rows(), choi.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.block(i * m, j * m, m, m) = choi.block(i * m, j * m, m, m).transpose();
    }
  }
  return out;
}

bool is_hermitian_preserving(const MapRep& map, double tol) {
  const auto& c = map.choi();
  return (c - c.adjoint()).norm() <= tol * c.norm();
}

PsdCheck is_completely_positive(const MapRep& map, double tol) {
  require_hermitian_preserving(map, "is_completely_positive");
  return is_psd(0.5 * (map.choi() + map.choi().adjoint()), tol);
}

PositivityResult is_positive(const MapRep& map, const SearchParams& search) {
  require_hermitian_preserving(map, "is_positive");
  const BlockSearchResult r = kernels::block_minimum(
      0.5 * (map.choi() + map.choi().adjoint()), map.dim_out(), map.dim_in(),
      search);
  PositivityResult out;
  out.verdict = r.violated ? PositivityVerdict::NotPositive
                           : PositivityVerdict::PositiveEvidence;
  out.min_value = r.value;
  out.xi = r.xi;
  out.eta = r.eta;
  out.restarts_run = r.restarts_run;
  return out;
}

std::vector<ComplexVector> deterministic_probes(int dim) {
  std::vector<ComplexVector> out;
  for (int j = 0; j < dim; ++j) out.push_back(ComplexVector::Unit(dim, j));
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      ComplexVector s = ComplexVector::Zero(dim);
      s(j) = kInvSqrt2;
      s(k) = kInvSqrt2;
      out.push_back(s);
      s(k) = Complex(0.0, kInvSqrt2);
      out.push_back(s);
    }
  }
  return out;
}

Rank1Result rank1_nonincreasing(const MapRep& map, int samples,
                                std::uint64_t seed, double tol) {
  require_hermitian_preserving(map, "rank1_nonincreasing");
  std::vector<ComplexVector> probes = deterministic_probes(map.dim_in());
  Rng rng = make_rng(seed, {0x1a2bULL});
  for (int s = 0; s < samples; ++s) {
    probes.push_back(random_unit_vector(map.dim_in(), rng));
  }
  Rank1Result out;
  out.probes = static_cast<int>(probes.size());
  for (const auto& eta : probes) {
    const ComplexMatrix img = conecert::apply(map, eta * eta.adjoint());
    if (img.rows() < 2) continue;
    Eigen::JacobiSVD<ComplexMatrix> svd(img);
    const auto& sv = svd.singularValues();
    const double ratio = sv(0) > 0.0 ? sv(1) / sv(0) : 0.0;
    out.worst_ratio = std::max(out.worst_ratio, ratio);
    if (sv(1) > tol * sv(0) && out.holds) {
      out.holds = false;
      out.counterexample = eta;
    }
  }
  return out;
}

}  // namespace conecert
