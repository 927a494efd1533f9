#include "doctest.h"

#include <cmath>

#include "conecert/random.hpp"
#include "conecert/vectorization.hpp"
#include "support.hpp"

using namespace conecert;

TEST_CASE("functional_from_operator examples") {
  Rng rng = make_rng(41);
  const FunctionalRep f = functional_from_operator(ComplexMatrix::Identity(2, 2));
  for (int t = 0; t < 10; ++t) {
    const ComplexVector xi = random_complex_vector(2, rng);
    const ComplexVector eta = random_complex_vector(2, rng);
    const Complex expect = xi(0) * eta(0) + xi(1) * eta(1);
    CHECK(std::abs(f.on_product(xi, eta) - expect) <= 1e-15 * (1.0 + std::abs(expect)));
    CHECK(std::abs(f(kron(xi, eta)) - expect) <= 1e-14 * (1.0 + std::abs(expect)));
  }
  const FunctionalRep zero = functional_from_operator(ComplexMatrix::Zero(2, 3));
  CHECK(zero(random_complex_vector(6, rng)) == Complex(0.0));

  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_complex_normal(3, 2, rng);
    const ComplexVector xi = random_complex_vector(3, rng);
    const ComplexVector eta = random_complex_vector(2, rng);
    // <conj xi, A eta> with the inner product conjugate-linear in the first slot
    const Complex direct = conj_vector(xi).dot(a * eta);
    CHECK(std::abs(functional_from_operator(a).on_product(xi, eta) - direct) <=
          1e-13 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("operator_from_functional inverts the correspondence") {
  Rng rng = make_rng(42);
  CHECK(operator_from_functional(functional_from_operator(ComplexMatrix::Zero(2, 2))) ==
        ComplexMatrix::Zero(2, 2));
  const ComplexMatrix e12 = oracle::unit(2, 2, 0, 1);
  CHECK(operator_from_functional(FunctionalRep(e12)) == e12);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_complex_normal(1 + t % 4, 1 + t / 5, rng);
    CHECK(operator_from_functional(functional_from_operator(a)) == a);
  }
}

TEST_CASE("linearity of A -> f_A") {
  Rng rng = make_rng(43);
  const ComplexMatrix a = random_complex_normal(3, 3, rng);
  const ComplexMatrix b = random_complex_normal(3, 3, rng);
  const Complex al(1.5, -0.5);
  const Complex be(-0.25, 2.0);
  const FunctionalRep lhs = functional_from_operator(al * a + be * b);
  const FunctionalRep rhs =
      functional_from_operator(a) * al + functional_from_operator(b) * be;
  CHECK((lhs.coeffs() - rhs.coeffs()).norm() <= 1e-14 * lhs.coeffs().norm());
  const ComplexVector u = random_complex_vector(9, rng);
  CHECK(std::abs(lhs(u) - rhs(u)) <= 1e-13 * (1.0 + std::abs(lhs(u))));
}

TEST_CASE("functional_norm examples") {
  CHECK(functional_norm(functional_from_operator(ComplexMatrix::Identity(2, 2))) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(functional_norm(functional_from_operator(ComplexMatrix::Zero(3, 2))) == 0.0);
  CHECK(norm_maximizer(functional_from_operator(ComplexMatrix::Zero(3, 2))).norm() == 0.0);

  Rng rng = make_rng(44);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_complex_normal(3, 4, rng);
    const FunctionalRep f = functional_from_operator(a);
    const double frob = std::sqrt((a.adjoint() * a).trace().real());
    CHECK(std::abs(functional_norm(f) - frob) <= 1e-12);
    const ComplexVector u = norm_maximizer(f);
    CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(std::abs(f(u)) - frob) <= 1e-10);
    const NormProbe probe = probe_functional_norm(f, 200, t);
    CHECK(probe.sampled_max <= probe.norm + 1e-10);
    CHECK(std::abs(probe.at_maximizer - probe.norm) <= 1e-10);
  }
}

TEST_CASE("kernel inclusion holds exactly for proportional functionals") {
  Rng rng = make_rng(45);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_complex_normal(2 + t % 3, 2 + t % 2, rng);
    const Complex lambda = random_complex_vector(1, rng)(0);
    const FunctionalRep fa = functional_from_operator(a);
    const FunctionalRep fb = functional_from_operator(lambda * a);
    const ComplexMatrix ker = functional_kernel(fa);
    CHECK(ker.cols() == a.size() - 1);
    for (int c = 0; c < ker.cols(); ++c) {
      CHECK(std::abs(fa(ker.col(c))) <= 1e-12 * a.norm());
      CHECK(std::abs(fb(ker.col(c))) <= 1e-10);
    }
    CHECK(kernel_included(fa, fb).included);
  }
}

TEST_CASE("kernel inclusion fails for non-proportional functionals") {
  Rng rng = make_rng(46);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_complex_normal(2, 3, rng);
    const ComplexMatrix b = random_complex_normal(2, 3, rng);
    // a 2 x 2 minor of the stacked coefficient rows certifies non-proportionality
    const Complex minor = a(0, 0) * b(1, 2) - a(1, 2) * b(0, 0);
    REQUIRE(std::abs(minor) > 1e-6);
    const FunctionalRep fa = functional_from_operator(a);
    const FunctionalRep fb = functional_from_operator(b);
    const auto inc = kernel_included(fa, fb);
    CHECK_FALSE(inc.included);
    CHECK(inc.max_violation > 1e-6);
  }
}
