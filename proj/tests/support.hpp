#pragma once
// Independent reference computations for the test suites. Nothing here calls
// into the library's Choi, apply or constraint code; oracles are written from
// the defining formulas so that agreement is meaningful.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "conecert/matrices.hpp"
#include "conecert/random.hpp"

namespace oracle {

using conecert::Complex;
using conecert::ComplexMatrix;
using conecert::ComplexVector;
using conecert::RealMatrix;

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

inline ComplexMatrix unit(int rows, int cols, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(rows, cols);
  e(i, j) = 1.0;
  return e;
}

inline ComplexVector basis_vector(int dim, int i) {
  ComplexVector e = ComplexVector::Zero(dim);
  e(i) = 1.0;
  return e;
}

// Kronecker product written out entry by entry.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// sum_{k,l} phi(E_kl) (x) E_kl from the action of phi on matrix units.
inline ComplexMatrix choi_of(const LinearMap& phi, int n, int m) {
  ComplexMatrix c = ComplexMatrix::Zero(n * m, n * m);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) c += kron(phi(unit(m, m, k, l)), unit(m, m, k, l));
  (void)n;
  return c;
}

// phi(Y) read back from a Choi matrix by the defining sum.
inline ComplexMatrix apply_choi(const ComplexMatrix& c, int n, int m,
                                const ComplexMatrix& y) {
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) out(i, j) += c(i * m + k, j * m + l) * y(k, l);
  return out;
}

inline LinearMap ad(const ComplexMatrix& a) {
  return [a](const ComplexMatrix& y) -> ComplexMatrix { return a * y * a.adjoint(); };
}

inline LinearMap ad_transpose(const ComplexMatrix& a) {
  return [a](const ComplexMatrix& y) -> ComplexMatrix {
    return a * y.transpose() * a.adjoint();
  };
}

// Frobenius-orthonormal basis of N x N Hermitian matrices, in an order and
// normalization chosen independently of the library's parameter layout.
inline std::vector<ComplexMatrix> hermitian_basis(int dim) {
  std::vector<ComplexMatrix> out;
  const double s = 1.0 / std::sqrt(2.0);
  for (int a = 0; a < dim; ++a) out.push_back(unit(dim, dim, a, a));
  for (int b = 0; b < dim; ++b) {
    for (int a = 0; a < b; ++a) {
      out.push_back(s * (unit(dim, dim, a, b) + unit(dim, dim, b, a)));
      out.push_back(Complex(0.0, s) * (unit(dim, dim, a, b) - unit(dim, dim, b, a)));
    }
  }
  return out;
}

// Dimension of {Hermitian Choi D : psi_D(eta eta^*) conj(xi) = 0 for all
// pairs}, by stacking the residual of every basis element as a column and
// counting small singular values with a full JacobiSVD.
inline int hull_dimension(int n, int m,
                          const std::vector<std::pair<ComplexVector, ComplexVector>>& pairs,
                          double cutoff = 1e-9) {
  const auto basis = hermitian_basis(n * m);
  RealMatrix sys(2 * n * static_cast<int>(pairs.size()), static_cast<int>(basis.size()));
  for (std::size_t t = 0; t < basis.size(); ++t) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& [xi, eta] = pairs[p];
      const ComplexVector r =
          apply_choi(basis[t], n, m, eta * eta.adjoint()) * xi.conjugate();
      for (int i = 0; i < n; ++i) {
        sys(2 * n * p + i, t) = r(i).real();
        sys(2 * n * p + n + i, t) = r(i).imag();
      }
    }
  }
  Eigen::JacobiSVD<RealMatrix> svd(sys);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) rank += sv(i) > cutoff * sv(0) ? 1 : 0;
  return static_cast<int>(basis.size()) - rank;
}

// Orthonormal complement of span{v} in C^dim, via Gram-Schmidt on the
// standard basis.
inline std::vector<ComplexVector> complement(const ComplexVector& v) {
  const int dim = static_cast<int>(v.size());
  std::vector<ComplexVector> q;
  if (v.norm() > 0) q.push_back(v / v.norm());
  std::vector<ComplexVector> out;
  for (int i = 0; i < dim && static_cast<int>(q.size()) < dim; ++i) {
    ComplexVector w = basis_vector(dim, i);
    for (const auto& b : q) w -= b.dot(w) * b;
    if (w.norm() > 1e-8) {
      w /= w.norm();
      q.push_back(w);
      out.push_back(w);
    }
  }
  return out;
}

inline ComplexMatrix random_hermitian(int dim, conecert::Rng& rng) {
  const ComplexMatrix g = conecert::random_complex_normal(dim, dim, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace oracle
