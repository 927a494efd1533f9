#pragma once

// Linear maps phi: B(K) -> B(H) in Choi coordinates.
//
// With n = dim H and m = dim K the Choi matrix is
//
//     C = sum_{k,l} phi(E_kl) (x) E_kl,
//
// an (nm) x (nm) matrix indexed H-major: the pair (i, k) sits at i * m + k
// (zero based). Hence C[(i,k),(j,l)] = phi(E_kl)[i][j] and
//
//     phi(Y)[i][j] = sum_{k,l} C[(i,k),(j,l)] Y[k][l].

#include <cstdint>
#include <optional>
#include <vector>

#include "conecert/kernels.hpp"
#include "conecert/matrices.hpp"

namespace conecert {

class MapRep {
 public:
  /// Throws InputError unless choi is finite and (nm) x (nm).
  MapRep(int dim_out, int dim_in, ComplexMatrix choi);

  int dim_out() const { return n_; }
  int dim_in() const { return m_; }
  const ComplexMatrix& choi() const { return choi_; }

  static int index(int i, int k, int m) { return i * m + k; }

 private:
  int n_;
  int m_;
  ComplexMatrix choi_;
};

/// X (x) Y with X in B(H)_+ and Y in B(K)_+.
class SeparableElement {
 public:
  /// Throws InputError unless both factors are PSD within tol.
  SeparableElement(ComplexMatrix x_factor, ComplexMatrix y_factor,
                   double tol = 1e-10);

  const ComplexMatrix& x_factor() const { return x_; }
  const ComplexMatrix& y_factor() const { return y_; }
  ComplexMatrix dense() const { return kron(x_, y_); }

 private:
  ComplexMatrix x_;
  ComplexMatrix y_;
};

/// X -> A X A^* (transposed = false) or X -> A X^T A^* (transposed = true).
/// A is n x m; A = 0 is rejected as the apex of the cone.
MapRep choi_from_ad(const ComplexMatrix& a, bool transposed);

/// X -> Tr(R X) Q with Q = zeta zeta^* / ||zeta||^2; Choi = Q (x) R^T.
MapRep choi_from_omega_q(const ComplexMatrix& r, const ComplexVector& zeta,
                         double tol = 1e-10);

/// phi(Y), computed as Tr_K(C (I (x) Y^T)).
ComplexMatrix apply(const MapRep& map, const ComplexMatrix& y);

/// <phi, X (x) Y> = Tr(phi(Y) X^T).
Complex pairing(const MapRep& map, const SeparableElement& w);
/// <phi, W> = Tr(C W^T) for any W on H (x) K.
Complex pairing(const MapRep& map, const ComplexMatrix& w);

/// Transposes the K factor: out[(i,k),(j,l)] = C[(i,l),(j,k)].
ComplexMatrix partial_transpose_k(const ComplexMatrix& choi, int n, int m);

bool is_hermitian_preserving(const MapRep& map, double tol = 1e-10);

/// Choi PSD within tol. Throws InputError for non-Hermitian Choi.
PsdCheck is_completely_positive(const MapRep& map, double tol = 1e-10);

enum class PositivityVerdict { PositiveEvidence, NotPositive };

struct PositivityResult {
  PositivityVerdict verdict = PositivityVerdict::PositiveEvidence;
  double min_value = 0.0;
  // block value <xi (x) eta, C (xi (x) eta)> = <xi, phi(conj(eta) conj(eta)^*) xi>
  ComplexVector xi;
  ComplexVector eta;
  int restarts_run = 0;
};

/// Evidence-based positivity test via seeded alternating minimization of the
/// block form. NotPositive carries a witness; PositiveEvidence is not a proof.
PositivityResult is_positive(const MapRep& map, const SearchParams& search = {});

/// Unit probe vectors e_j, (e_j + e_k)/sqrt2, (e_j + i e_k)/sqrt2 for j < k.
std::vector<ComplexVector> deterministic_probes(int dim);

struct Rank1Result {
  bool holds = true;
  std::optional<ComplexVector> counterexample;
  double worst_ratio = 0.0;  // max over probes of s_2 / s_1 of phi(eta eta^*)
  int probes = 0;
};

/// Checks that phi(eta eta^*) has rank <= 1 on the deterministic probes plus
/// `samples` seeded random unit vectors.
Rank1Result rank1_nonincreasing(const MapRep& map, int samples,
                                std::uint64_t seed, double tol = 1e-8);

}  // namespace conecert
