#include "qeffect/random.hpp"

#include <cmath>
#include <numbers>

namespace qeffect {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_dim(Eigen::Index n) {
  if (n < 1) throw Error(ErrorKind::BadDimension, "dimension must be >= 1, got " + std::to_string(n));
}

}  // namespace

std::uint64_t RandomSource::sub_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

double RandomSource::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RandomSource& rng) {
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal() / std::sqrt(2.0);
  return g;
}

Matrix haar_unitary(Eigen::Index n, RandomSource& rng) {
  require_dim(n);
  const Matrix z = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

Matrix hermitian_with_spectrum(const RealVector& spectrum, RandomSource& rng) {
  const Matrix u = haar_unitary(spectrum.size(), rng);
  return hermitian_part(u * spectrum.cast<Complex>().asDiagonal() * u.adjoint());
}

Matrix random_effect_matrix(Eigen::Index n, RandomSource& rng) {
  require_dim(n);
  RealVector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = rng.uniform();
  return hermitian_with_spectrum(s, rng);
}

Matrix random_rank_deficient_effect(Eigen::Index n, Eigen::Index rank, RandomSource& rng) {
  require_dim(n);
  if (rank < 0 || rank > n) throw Error(ErrorKind::BadDimension, "rank out of range");
  RealVector s = RealVector::Zero(n);
  for (Eigen::Index i = 0; i < rank; ++i) s(i) = rng.uniform(0.05, 1.0);
  return hermitian_with_spectrum(s, rng);
}

Matrix random_state_matrix(Eigen::Index n, RandomSource& rng) {
  require_dim(n);
  const Matrix g = gaussian_matrix(n, n, rng);
  Matrix d = hermitian_part(g * g.adjoint());
  d /= d.trace().real();
  return d;
}

Matrix random_projection_matrix(Eigen::Index n, Eigen::Index rank, RandomSource& rng) {
  require_dim(n);
  if (rank < 0 || rank > n) {
    throw Error(ErrorKind::BadDimension,
                "projection rank " + std::to_string(rank) + " outside [0, " + std::to_string(n) + "]");
  }
  const Matrix u = haar_unitary(n, rng);
  const Matrix basis = u.leftCols(rank);
  return hermitian_part(basis * basis.adjoint());
}

Vector random_unit_vector(Eigen::Index n, RandomSource& rng) {
  require_dim(n);
  Vector v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.complex_normal();
  } while (v.norm() == 0.0);
  return v.normalized();
}

Matrix random_invertible(Eigen::Index n, RandomSource& rng, double max_condition) {
  require_dim(n);
  for (;;) {
    Matrix a = gaussian_matrix(n, n, rng);
    const RealVector sv = Eigen::JacobiSVD<Matrix>(a).singularValues();
    if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) <= max_condition) return a;
  }
}

}  // namespace qeffect
