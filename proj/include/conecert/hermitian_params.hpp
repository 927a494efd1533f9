#pragma once

// Real coordinates on N x N Hermitian matrices.
//
// Layout: N diagonal entries D[a][a], then for each a < b (row-major) the
// pair sqrt(2) Re D[a][b], sqrt(2) Im D[a][b]. The sqrt(2) makes the map an
// isometry: the Euclidean inner product of two parameter vectors equals the
// real Frobenius inner product Re Tr(D1^* D2).

#include "conecert/matrices.hpp"

namespace conecert {

inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kInvSqrt2 = 0.70710678118654752440;

class HermitianLayout {
 public:
  explicit HermitianLayout(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  int size() const { return dim_ * dim_; }

  int diagonal(int a) const { return a; }
  int real_part(int a, int b) const { return dim_ + 2 * offdiag_index(a, b); }
  int imag_part(int a, int b) const { return real_part(a, b) + 1; }

 private:
  // position of (a, b), a < b, in row-major order over the strict upper part
  int offdiag_index(int a, int b) const {
    return a * dim_ - a * (a + 1) / 2 + (b - a - 1);
  }

  int dim_;
};

/// Uses the Hermitian part (D + D^*) / 2 of the input.
RealVector hermitian_to_params(const ComplexMatrix& d);
ComplexMatrix params_to_hermitian(const RealVector& t, int dim);

}  // namespace conecert
