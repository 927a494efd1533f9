#include "conecert/vectorization.hpp"

#include <algorithm>

#include "conecert/random.hpp"

namespace conecert {

Complex FunctionalRep::operator()(const ComplexVector& u) const {
  if (u.size() != coeffs_.size()) {
    throw InputError("functional: tensor has " + std::to_string(u.size()) +
                     " entries, expected " + std::to_string(coeffs_.size()));
  }
  return row().transpose() * u;
}

Complex FunctionalRep::on_product(const ComplexVector& xi,
                                  const ComplexVector& eta) const {
  if (xi.size() != n() || eta.size() != m()) {
    throw InputError("functional: product factors do not match " +
                     shape_string(n(), m()));
  }
  return xi.transpose() * coeffs_ * eta;
}

ComplexVector FunctionalRep::row() const {
  ComplexVector r(coeffs_.size());
  for (int i = 0; i < n(); ++i) {
    for (int j = 0; j < m(); ++j) r(i * m() + j) = coeffs_(i, j);
  }
  return r;
}

FunctionalRep functional_from_operator(const ComplexMatrix& a) {
  require_finite(a, "functional_from_operator");
  return FunctionalRep(a);
}

ComplexMatrix operator_from_functional(const FunctionalRep& f) {
  return f.coeffs();
}

double functional_norm(const FunctionalRep& f) { return f.coeffs().norm(); }

ComplexVector norm_maximizer(const FunctionalRep& f) {
  const int n = f.n();
  const int m = f.m();
  ComplexVector u = ComplexVector::Zero(n * m);
  const double norm = f.coeffs().norm();
  if (norm == 0.0) return u;
  for (int i = 0; i < m; ++i) {
    const ComplexVector a_eta = f.coeffs().col(i);  // A e_i
    u += kron(ComplexVector(a_eta.conjugate()), ComplexVector::Unit(m, i));
  }
  return u / norm;
}

NormProbe probe_functional_norm(const FunctionalRep& f, int samples,
                                std::uint64_t seed) {
  NormProbe out;
  out.norm = functional_norm(f);
  Rng rng = make_rng(seed, {0xf00dULL});
  const int dim = f.n() * f.m();
  for (int s = 0; s < samples; ++s) {
    out.sampled_max = std::max(out.sampled_max, std::abs(f(random_unit_vector(dim, rng))));
  }
  out.at_maximizer = std::abs(f(norm_maximizer(f)));
  return out;
}

ComplexMatrix functional_kernel(const FunctionalRep& f,
                                const TolerancePolicy& tol) {
  const ComplexMatrix row = f.row().transpose();
  return null_space(row, tol).basis;
}

KernelInclusion kernel_included(const FunctionalRep& f, const FunctionalRep& g,
                                double tol) {
  if (f.n() != g.n() || f.m() != g.m()) {
    throw InputError("kernel_included: functionals live on different spaces");
  }
  const ComplexMatrix ker = functional_kernel(f);
  KernelInclusion out;
  for (Eigen::Index c = 0; c < ker.cols(); ++c) {
    out.max_violation = std::max(out.max_violation, std::abs(g(ker.col(c))));
  }
  out.included = out.max_violation <= tol;
  return out;
}

}  // namespace conecert
