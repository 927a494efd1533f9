#include "conecert/hermitian_params.hpp"

namespace conecert {

RealVector hermitian_to_params(const ComplexMatrix& d) {
  const int dim = static_cast<int>(d.rows());
  const HermitianLayout layout(dim);
  RealVector t(layout.size());
  for (int a = 0; a < dim; ++a) t(layout.diagonal(a)) = d(a, a).real();
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      const Complex h = 0.5 * (d(a, b) + std::conj(d(b, a)));
      t(layout.real_part(a, b)) = kSqrt2 * h.real();
      t(layout.imag_part(a, b)) = kSqrt2 * h.imag();
    }
  }
  return t;
}

ComplexMatrix params_to_hermitian(const RealVector& t, int dim) {
  const HermitianLayout layout(dim);
  if (t.size() != layout.size()) {
    throw InputError("params_to_hermitian: expected " +
                     std::to_string(layout.size()) + " parameters");
  }
  ComplexMatrix d(dim, dim);
  for (int a = 0; a < dim; ++a) d(a, a) = t(layout.diagonal(a));
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) {
      const Complex z(t(layout.real_part(a, b)) * kInvSqrt2,
                      t(layout.imag_part(a, b)) * kInvSqrt2);
      d(a, b) = z;
      d(b, a) = std::conj(z);
    }
  }
  return d;
}

}  // namespace conecert
