#pragma once

// Dense complex linear algebra used throughout conecert.
//
// The antilinear involutions on H and K are fixed to entrywise complex
// conjugation in the standard bases, so the transposition X -> X^T is the
// ordinary matrix transpose. Every formula in the library inherits this.

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace conecert {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Malformed or out-of-contract input (shape, finiteness, Hermiticity, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or iterative routine failed to produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank decisions: a singular value s counts as zero iff
/// s <= max(max(rows, cols) * s_max * rel_eps, abs_floor).
struct TolerancePolicy {
  double rel_eps = 1e-12;
  double abs_floor = 1e-14;
};

/// Throws InputError unless every entry is finite and the shape is non-empty.
void require_finite(const ComplexMatrix& m, std::string_view what);
void require_finite(const ComplexVector& v, std::string_view what);

ComplexVector conj_vector(const ComplexVector& v);
ComplexMatrix transpose(const ComplexMatrix& x);

/// a (x) b with the row index of `a` major.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

/// Result of a rank-revealing SVD. `basis` columns are orthonormal right
/// singular vectors spanning the numerical kernel.
template <typename Scalar>
struct NullSpace {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> basis;
  RealVector singular_values;  // descending, length min(rows, cols)
  double threshold = 0.0;
  int rank = 0;
  // Smallest singular value kept in the range and largest one declared null;
  // negative when the respective set is empty.
  double smallest_retained = -1.0;
  double largest_null = -1.0;

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Singular values at or below max(max(rows, cols) * smax * rel_eps,
/// abs_floor) are null. Every returned basis vector v satisfies
/// ||m v|| <= threshold; NumericalError if no SVD achieves that.
NullSpace<Complex> null_space(const ComplexMatrix& m,
                              const TolerancePolicy& tol = {});
NullSpace<double> null_space(const RealMatrix& m,
                             const TolerancePolicy& tol = {});

/// Numerical rank under the same threshold rule as null_space.
int numerical_rank(const ComplexMatrix& m, const TolerancePolicy& tol = {});

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

bool is_hermitian(const ComplexMatrix& m, double tol);

/// Throws InputError for non-square input or when ||M - M^H||_F exceeds
/// tol * max(1, ||M||_F).
PsdCheck is_psd(const ComplexMatrix& m, double tol);

/// x y^*
inline ComplexMatrix outer(const ComplexVector& x, const ComplexVector& y) {
  return x * y.adjoint();
}

/// Multiplies by the unimodular scalar that makes the largest-magnitude
/// entry real and positive. Zero input is returned unchanged.
ComplexMatrix fix_phase(const ComplexMatrix& m);
ComplexVector fix_phase(const ComplexVector& v);

/// min over unimodular c of ||a - c b||_F / ||a||_F.
double phase_aligned_relative_error(const ComplexMatrix& a,
                                    const ComplexMatrix& b);

std::string shape_string(Eigen::Index rows, Eigen::Index cols);

}  // namespace conecert
