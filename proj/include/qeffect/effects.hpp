#pragma once

#include "qeffect/linalg.hpp"
#include "qeffect/random.hpp"

#include <utility>

namespace qeffect {

/// Hermitian operator with spectrum in [0, 1]. Construction validates the
/// spectrum against [-tol, 1 + tol] and clamps it into [0, 1].
class Effect {
 public:
  static Effect from_matrix(const Matrix& m, double tolerance = 1e-8);
  /// Skips validation; for matrices that are effects by construction.
  static Effect trusted(Matrix m) { return Effect(std::move(m)); }
  static Effect zero(Eigen::Index n) { return Effect(Matrix::Zero(n, n)); }
  static Effect unit(Eigen::Index n) { return Effect(identity(n)); }
  static Effect scalar(Eigen::Index n, double lambda);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  explicit Effect(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Density operator: PSD with unit trace.
class State {
 public:
  static State from_matrix(const Matrix& m);
  static State maximally_mixed(Eigen::Index n);

  const Matrix& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

 private:
  explicit State(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Unit vector up to phase.
class Ray {
 public:
  explicit Ray(const Vector& v);
  static Ray basis(Eigen::Index n, Eigen::Index i);

  const Vector& vector() const noexcept { return v_; }
  Eigen::Index dim() const noexcept { return v_.size(); }
  Matrix projection() const { return v_ * v_.adjoint(); }
  /// |<u, v>|, the projective overlap.
  double overlap(const Ray& other) const { return std::abs(v_.dot(other.v_)); }
  bool operator==(const Ray& other) const { return overlap(other) >= 1.0 - 1e-9; }

 private:
  Vector v_;
};

struct WeakAtom {
  double coefficient;
  Ray ray;

  Effect effect() const { return Effect::trusted(coefficient * ray.projection()); }
};

Effect orthocomplement(const Effect& e);

/// sup{t in [0, 1] : t P_r <= E}.
double strength(const Effect& e, const Ray& r);
double strength(const EigenDecomposition& eig, const Ray& r);

/// tr(E D), real part; the imaginary part is rounding noise for Hermitian inputs.
double trace_pair(const Matrix& e, const Matrix& d);
inline double trace_pair(const Effect& e, const State& d) { return trace_pair(e.matrix(), d.matrix()); }

bool is_sharp(const Effect& e, double tolerance = tol::sharp);
Eigen::Index rank(const Effect& e);
Eigen::Index rank(const Matrix& hermitian);

/// Top eigenvector; the range of a rank-one projection.
Ray dominant_ray(const Matrix& hermitian);

Effect random_effect(Eigen::Index n, RandomSource& rng);
State random_state(Eigen::Index n, RandomSource& rng);
Ray random_ray(Eigen::Index n, RandomSource& rng);
Effect random_projection(Eigen::Index n, Eigen::Index rank, RandomSource& rng);

/// (E, F) with 0 <= E <= F: draw effects F, K and set E = F^{1/2} K F^{1/2}.
std::pair<Effect, Effect> comparable_pair(Eigen::Index n, RandomSource& rng);

}  // namespace qeffect
