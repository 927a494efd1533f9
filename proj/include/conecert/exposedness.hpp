#pragma once

// Exposedness certificates for X -> A X A^* and X -> A X^T A^*.
//
// A positive map phi spans an exposed ray of the cone of positive maps iff
// the positive part of {phi}'' is the ray itself. certify_exposed computes the
// Hermitian linear hull of {phi}'' (faces.hpp). When the hull is a line through
// Choi(phi) the certificate is purely linear. Otherwise the hull is larger
// than the ray and every sampled off-ray direction is shown to leave the
// positive cone (cone_fallback), which is evidence rather than proof.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conecert/faces.hpp"
#include "conecert/kernels.hpp"
#include "conecert/matrices.hpp"
#include "conecert/posmaps.hpp"

namespace conecert {

enum class Verdict {
  ExposedLinear,
  ExposedConeEvidence,
  NotCertified,
  InputRejected,
};

std::string to_string(Verdict v);

struct FallbackParams {
  int directions_per_dim = 64;
  int max_directions = 512;
  std::vector<double> epsilons{0.01, 0.1, 1.0, 10.0};
  double violation_tol = 1e-9;
  std::uint64_t seed = 0;
  SearchParams search;  // seed is overridden per job
  ExecPolicy policy = ExecPolicy::Parallel;
};

struct FallbackViolation {
  int direction = 0;
  double epsilon = 0.0;
  ComplexVector xi;
  ComplexVector eta;
  double block_value = 0.0;
  bool violated = false;
};

struct ConeFallbackEvidence {
  int directions_tested = 0;
  std::vector<double> epsilons;
  std::vector<FallbackViolation> violations;  // one per (direction, epsilon)
  bool control_positive = false;  // phi itself passes the positivity search
  bool all_violated = false;
  double weakest_violation = 0.0;  // largest block value over all tests
};

struct ExposeParams {
  std::uint64_t seed = 0;
  TolerancePolicy tol;
  HullParams hull;  // seed and tol are overridden from the fields above
  FallbackParams fallback;
  double overlap_tol = 1e-8;
  double span_tol = 1e-10;
};

struct ExposednessReport {
  Verdict verdict = Verdict::NotCertified;
  NullSpaceResult nullspace;
  std::optional<ConeFallbackEvidence> fallback;
  double overlap_with_phi = 0.0;
  double span_residual = 0.0;
  std::uint64_t seed = 0;
  TolerancePolicy tol;
  double overlap_tol = 1e-8;
  double pair_tol = 1e-10;
  double violation_tol = 1e-9;
  std::int64_t wall_time_ms = 0;
  std::string message;
};

ExposednessReport certify_exposed(const ComplexMatrix& a, bool transposed,
                                  const ExposeParams& params = {});

/// Same pipeline for an arbitrary map (used by certify_exposed).
ExposednessReport certify_map(const MapRep& phi, const ExposeParams& params);

/// Requires ns.dim >= 2 and Choi(phi) in the span of ns.
ConeFallbackEvidence cone_fallback(const NullSpaceResult& ns, const MapRep& phi,
                                   const FallbackParams& params);

/// Unit off-ray directions (Hermitian, Frobenius-orthogonal to Choi(phi))
/// drawn from the null space; exposed for testing.
std::vector<ComplexMatrix> off_ray_directions(const NullSpaceResult& ns,
                                              const ComplexMatrix& choi,
                                              int count, std::uint64_t seed);

struct LemmaMySolution {
  int dim = 0;
  std::vector<ComplexMatrix> basis;  // operators B, orthonormal in Frobenius
  int rank = 0;                      // numerical rank of A
  int constraint_rows = 0;
  RealVector singular_values;
};

/// Default z samples for the zeta_z / rho_z probes. The expansion of
/// <zeta_z, B conj(rho_z)> has terms in 1, z, |z|^2 and conj(z); the value 2
/// is needed to tell |z|^2 apart from the constant.
std::vector<Complex> default_z_samples();

/// Complex solution space of: <xi, A eta> = 0 implies <xi, B conj(eta)> = 0,
/// restricted to the kernel, range-complement and zeta_z / rho_z probes.
LemmaMySolution lemma_my_solution_space(
    const ComplexMatrix& a, const TolerancePolicy& tol = {},
    const std::vector<Complex>& z_samples = default_z_samples());

enum class MapCase { OmegaQ, Ad, AdTranspose };

std::string to_string(MapCase c);

class ClassificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Classification {
  MapCase kind = MapCase::Ad;
  ComplexMatrix b;      // Ad / AdTranspose, phase fixed
  ComplexMatrix r;      // OmegaQ functional density
  ComplexVector zeta;   // OmegaQ, unit, phase fixed
  ComplexMatrix q;      // OmegaQ projection zeta zeta^*
  double reconstruction_error = 0.0;  // Frobenius relative
};

/// Decision tree: rank-1 PSD Choi -> Ad; rank-1 PSD partial transpose ->
/// AdTranspose; Q (x) S with Q a rank-1 projection and S PSD -> OmegaQ.
/// Throws ClassificationError when no branch matches within tol.
Classification classify(const MapRep& map, double tol = 1e-8);

MapRep reconstruct(const Classification& c);

}  // namespace conecert
