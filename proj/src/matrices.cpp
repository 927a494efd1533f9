#include "conecert/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conecert {

namespace {

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Complex z(m(i, j));
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  }
  return true;
}

template <typename Scalar, typename Svd>
NullSpace<Scalar> split_svd(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
    const Svd& svd, const TolerancePolicy& tol) {
  NullSpace<Scalar> out;
  const Eigen::Index cols = m.cols();
  out.singular_values = svd.singularValues();
  const double smax =
      out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;
  const double scale = static_cast<double>(std::max(m.rows(), cols));
  out.threshold = std::max(scale * smax * tol.rel_eps, tol.abs_floor);

  int rank = 0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values(i) > out.threshold) ++rank;
  }
  out.rank = rank;
  if (rank > 0) out.smallest_retained = out.singular_values(rank - 1);
  if (rank < out.singular_values.size()) {
    out.largest_null = out.singular_values(rank);
  } else if (rank < cols) {
    // wide matrix: the trailing right singular vectors have no singular value
    out.largest_null = 0.0;
  }
  out.basis = svd.matrixV().rightCols(cols - rank);
  return out;
}

// The basis must be orthonormal and annihilated by m up to the threshold.
template <typename Scalar>
bool basis_consistent(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
    const NullSpace<Scalar>& ns) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (ns.dim() == 0) return true;
  const double gram =
      (ns.basis.adjoint() * ns.basis - Mat::Identity(ns.dim(), ns.dim())).norm();
  if (!(gram <= 1e-10)) return false;
  const Mat image = m * ns.basis;
  for (Eigen::Index c = 0; c < image.cols(); ++c) {
    if (!(image.col(c).norm() <= ns.threshold)) return false;
  }
  return true;
}

template <typename Scalar>
NullSpace<Scalar> null_space_impl(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m,
    const TolerancePolicy& tol) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index cols = m.cols();
  if (cols == 0) throw InputError("null_space: matrix has no columns");
  if (m.rows() == 0) {
    NullSpace<Scalar> out;
    out.basis = Mat::Identity(cols, cols);
    out.threshold = tol.abs_floor;
    return out;
  }
  if (!all_finite(m)) {
    throw InputError("null_space: non-finite entries in " +
                     shape_string(m.rows(), cols) + " matrix");
  }

  // Eigen's divide-and-conquer SVD occasionally returns right singular vectors
  // that m does not annihilate on rank-deficient triangular input.
  Eigen::BDCSVD<Mat> fast(m, Eigen::ComputeFullV);
  if (fast.info() == Eigen::Success) {
    NullSpace<Scalar> out = split_svd(m, fast, tol);
    if (basis_consistent(m, out)) return out;
  }
  Eigen::JacobiSVD<Mat> slow(m, Eigen::ComputeFullV);
  if (slow.info() != Eigen::Success) {
    throw NumericalError("null_space: SVD failed for " +
                         shape_string(m.rows(), cols) + " matrix");
  }
  NullSpace<Scalar> out = split_svd(m, slow, tol);
  if (!basis_consistent(m, out)) {
    throw NumericalError("null_space: inconsistent SVD for " +
                         shape_string(m.rows(), cols) + " matrix");
  }
  return out;
}

}  // namespace

std::string shape_string(Eigen::Index rows, Eigen::Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

void require_finite(const ComplexMatrix& m, std::string_view what) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw InputError(std::string(what) + ": empty matrix");
  }
  if (!all_finite(m)) {
    throw InputError(std::string(what) + ": non-finite entry");
  }
}

void require_finite(const ComplexVector& v, std::string_view what) {
  if (v.size() == 0) throw InputError(std::string(what) + ": empty vector");
  if (!all_finite(v)) throw InputError(std::string(what) + ": non-finite entry");
}

ComplexVector conj_vector(const ComplexVector& v) { return v.conjugate(); }

ComplexMatrix transpose(const ComplexMatrix& x) { return x.transpose(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

NullSpace<Complex> null_space(const ComplexMatrix& m,
                              const TolerancePolicy& tol) {
  return null_space_impl<Complex>(m, tol);
}

NullSpace<double> null_space(const RealMatrix& m, const TolerancePolicy& tol) {
  return null_space_impl<double>(m, tol);
}

int numerical_rank(const ComplexMatrix& m, const TolerancePolicy& tol) {
  return null_space(m, tol).rank;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= tol * scale;
}

PsdCheck is_psd(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InputError("is_psd: expected a non-empty square matrix, got " +
                     shape_string(m.rows(), m.cols()));
  }
  if (!is_hermitian(m, tol)) {
    throw InputError("is_psd: matrix is not Hermitian within tolerance");
  }
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("is_psd: eigensolver failed for " +
                         shape_string(m.rows(), m.cols()) + " matrix");
  }
  PsdCheck out;
  out.min_eigenvalue = es.eigenvalues()(0);
  out.psd = out.min_eigenvalue >= -tol;
  return out;
}

ComplexMatrix fix_phase(const ComplexMatrix& m) {
  if (m.size() == 0) return m;
  Eigen::Index bi = 0, bj = 0;
  double best = -1.0;
  // first entry wins ties, scanning row-major
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double a = std::abs(m(i, j));
      if (a > best * (1.0 + 1e-12)) {
        best = a;
        bi = i;
        bj = j;
      }
    }
  }
  if (best == 0.0) return m;
  const Complex phase = std::conj(m(bi, bj)) / best;
  return m * phase;
}

ComplexVector fix_phase(const ComplexVector& v) {
  return fix_phase(ComplexMatrix(v)).col(0);
}

double phase_aligned_relative_error(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  const double na = a.norm();
  if (na == 0.0) return b.norm();
  // optimal phase aligns <b, a>
  const Complex ip = (b.conjugate().cwiseProduct(a)).sum();
  const Complex c = std::abs(ip) > 0.0 ? ip / std::abs(ip) : Complex(1.0);
  return (a - c * b).norm() / na;
}

}  // namespace conecert
