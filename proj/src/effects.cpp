#include "qeffect/effects.hpp"

#include <algorithm>
#include <cmath>

namespace qeffect {

Effect Effect::from_matrix(const Matrix& m, double tolerance) {
  require_square(m, "effect");
  if (!is_hermitian(m)) {
    throw Error(ErrorKind::NotHermitian,
                "effect Hermiticity residual " + std::to_string(hermiticity_residual(m)));
  }
  Matrix h = hermitian_part(m);
  const EigenDecomposition eig = eig_hermitian(h);
  if (eig.smallest() < -tolerance || eig.largest() > 1.0 + tolerance) {
    throw Error(ErrorKind::InvalidInput, "effect spectrum [" + std::to_string(eig.smallest()) +
                                             ", " + std::to_string(eig.largest()) +
                                             "] leaves [0, 1]");
  }
  if (eig.smallest() < 0.0 || eig.largest() > 1.0) {
    EigenDecomposition clamped = eig;
    clamped.eigenvalues = eig.eigenvalues.cwiseMax(0.0).cwiseMin(1.0);
    h = hermitian_part(clamped.reconstruct());
  }
  return Effect(std::move(h));
}

Effect Effect::scalar(Eigen::Index n, double lambda) {
  if (lambda < 0.0 || lambda > 1.0) throw Error(ErrorKind::InvalidInput, "scalar effect outside [0, 1]");
  return Effect(lambda * identity(n));
}

State State::from_matrix(const Matrix& m) {
  require_square(m, "state");
  if (!is_hermitian(m)) throw Error(ErrorKind::NotHermitian, "state is not Hermitian");
  const Matrix h = hermitian_part(m);
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidInput, "state trace " + std::to_string(tr) + " != 1");
  }
  if (eig_hermitian(h).smallest() < -1e-12) throw Error(ErrorKind::NotPSD, "state has a negative eigenvalue");
  return State(h);
}

State State::maximally_mixed(Eigen::Index n) { return State(identity(n) / static_cast<double>(n)); }

Ray::Ray(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorKind::InvalidInput, "ray from a zero vector");
  v_ = v / n;
}

Ray Ray::basis(Eigen::Index n, Eigen::Index i) { return Ray(Vector::Unit(n, i)); }

Effect orthocomplement(const Effect& e) { return Effect::trusted(identity(e.dim()) - e.matrix()); }

double strength(const EigenDecomposition& eig, const Ray& r) {
  if (eig.eigenvalues.size() != r.dim()) throw Error(ErrorKind::DimensionMismatch, "strength: ray dimension");
  const double cut = rank_threshold(eig);
  const Vector c = eig.eigenvectors.adjoint() * r.vector();
  double outside = 0.0;
  double quotient = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double w = std::norm(c(i));
    if (eig.eigenvalues(i) > cut)
      quotient += w / eig.eigenvalues(i);
    else
      outside += w;
  }
  if (std::sqrt(outside) > tol::range) return 0.0;
  return std::min(1.0, 1.0 / quotient);
}

double strength(const Effect& e, const Ray& r) {
  if (e.dim() != r.dim()) throw Error(ErrorKind::DimensionMismatch, "strength: ray dimension");
  return strength(eig_hermitian(e.matrix()), r);
}

double trace_pair(const Matrix& e, const Matrix& d) {
  require_same_dim(e, d, "trace_pair");
  // tr(ED) = sum_ij E_ij D_ji
  return (e.cwiseProduct(d.transpose())).sum().real();
}

bool is_sharp(const Effect& e, double tolerance) {
  const EigenDecomposition eig = eig_hermitian(e.matrix());
  for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
    const double x = eig.eigenvalues(i);
    if (std::min(std::abs(x), std::abs(x - 1.0)) > tolerance) return false;
  }
  return true;
}

Eigen::Index rank(const Matrix& hermitian) {
  const EigenDecomposition eig = eig_hermitian(hermitian);
  const double cut = rank_threshold(eig);
  return (eig.eigenvalues.array() > cut).count();
}

Eigen::Index rank(const Effect& e) { return rank(e.matrix()); }

Ray dominant_ray(const Matrix& hermitian) {
  const EigenDecomposition eig = eig_hermitian(hermitian);
  return Ray(eig.eigenvectors.col(eig.eigenvectors.cols() - 1));
}

Effect random_effect(Eigen::Index n, RandomSource& rng) { return Effect::trusted(random_effect_matrix(n, rng)); }

State random_state(Eigen::Index n, RandomSource& rng) { return State::from_matrix(random_state_matrix(n, rng)); }

Ray random_ray(Eigen::Index n, RandomSource& rng) { return Ray(random_unit_vector(n, rng)); }

Effect random_projection(Eigen::Index n, Eigen::Index rank, RandomSource& rng) {
  return Effect::trusted(random_projection_matrix(n, rank, rng));
}

std::pair<Effect, Effect> comparable_pair(Eigen::Index n, RandomSource& rng) {
  const Matrix f = random_effect_matrix(n, rng);
  const Matrix k = random_effect_matrix(n, rng);
  const Matrix root = matrix_function(f, MatrixFunction::Sqrt);
  return {Effect::trusted(hermitian_part(root * k * root)), Effect::trusted(f)};
}

}  // namespace qeffect
