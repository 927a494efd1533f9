#include "conecert/random.hpp"

#include <cmath>

namespace conecert {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

ComplexMatrix random_complex_normal(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5));
  ComplexMatrix m(rows, cols);
  // fill row-major so the draw order matches the JSON layout
  for (int i = 0; i < rows; ++i) {
    for (int k = 0; k < cols; ++k) {
      const double re = g(rng);
      const double im = g(rng);
      m(i, k) = Complex(re, im);
    }
  }
  return m;
}

ComplexVector random_complex_vector(int dim, Rng& rng) {
  return random_complex_normal(dim, 1, rng).col(0);
}

ComplexVector random_unit_vector(int dim, Rng& rng) {
  ComplexVector v = random_complex_vector(dim, rng);
  double nv = v.norm();
  while (nv == 0.0) {
    v = random_complex_vector(dim, rng);
    nv = v.norm();
  }
  return v / nv;
}

ComplexMatrix random_rank_matrix(int rows, int cols, int rank, Rng& rng) {
  ComplexMatrix a = random_complex_normal(rows, cols, rng);
  const int full = std::min(rows, cols);
  if (rank >= full) return a;
  if (rank <= 0) return ComplexMatrix::Zero(rows, cols);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  return svd.matrixU().leftCols(rank) * s.head(rank).asDiagonal() *
         svd.matrixV().leftCols(rank).adjoint();
}

ComplexMatrix random_psd(int dim, int rank, Rng& rng) {
  const ComplexMatrix g = random_complex_normal(dim, rank, rng);
  return g * g.adjoint();
}

ComplexMatrix random_unitary(int dim, Rng& rng) {
  const ComplexMatrix g = random_complex_normal(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace conecert
