#pragma once

// The correspondence A -> f_A between operators K -> H and linear functionals
// on H (x) K, with f_A(xi (x) eta) = <conj(xi), A eta> = sum_ij A_ij xi_i eta_j.
// Tensors u in H (x) K use the same H-major layout as Choi matrices.

#include <cstdint>

#include "conecert/matrices.hpp"

namespace conecert {

class FunctionalRep {
 public:
  explicit FunctionalRep(ComplexMatrix coeffs) : coeffs_(std::move(coeffs)) {}

  int n() const { return static_cast<int>(coeffs_.rows()); }
  int m() const { return static_cast<int>(coeffs_.cols()); }
  const ComplexMatrix& coeffs() const { return coeffs_; }

  Complex operator()(const ComplexVector& u) const;
  Complex on_product(const ComplexVector& xi, const ComplexVector& eta) const;

  /// coeffs flattened H-major, so that f(u) = row() . u
  ComplexVector row() const;

  FunctionalRep operator+(const FunctionalRep& o) const {
    return FunctionalRep(coeffs_ + o.coeffs_);
  }
  FunctionalRep operator*(Complex s) const { return FunctionalRep(coeffs_ * s); }

 private:
  ComplexMatrix coeffs_;
};

FunctionalRep functional_from_operator(const ComplexMatrix& a);
ComplexMatrix operator_from_functional(const FunctionalRep& f);

/// ||f|| = sup_{||u|| = 1} |f(u)|, which equals the Frobenius norm of A.
double functional_norm(const FunctionalRep& f);

/// The unit tensor sum_i conj(A eta_i) (x) eta_i / ||A||_2 (eta_i the standard
/// basis of K) at which |f_A| reaches its norm. Zero tensor for A = 0.
ComplexVector norm_maximizer(const FunctionalRep& f);

struct NormProbe {
  double norm = 0.0;           // functional_norm(f)
  double sampled_max = 0.0;    // max |f(u)| over sampled unit u
  double at_maximizer = 0.0;   // |f(norm_maximizer(f))|
};

/// Stochastic check of the norm: sampled values must not exceed it, the
/// maximizer must attain it.
NormProbe probe_functional_norm(const FunctionalRep& f, int samples,
                                std::uint64_t seed);

/// Orthonormal basis (columns) of ker f in H (x) K.
ComplexMatrix functional_kernel(const FunctionalRep& f,
                                const TolerancePolicy& tol = {});

struct KernelInclusion {
  bool included = false;
  double max_violation = 0.0;  // max |g(u)| over the kernel basis of f
};

/// ker f subset ker g, tested on an orthonormal kernel basis of f.
KernelInclusion kernel_included(const FunctionalRep& f, const FunctionalRep& g,
                                double tol = 1e-10);

}  // namespace conecert
