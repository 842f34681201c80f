#pragma once

#include "qeffect/effects.hpp"
#include "qeffect/order_maps.hpp"
#include "qeffect/reconstruction.hpp"
#include "qeffect/report.hpp"

#include <optional>
#include <variant>

namespace qeffect {

/// x -> A x, or x -> A conj(x) when `conjugating`.
class SemilinearOperator {
 public:
  SemilinearOperator(Matrix a, bool conjugating);

  const Matrix& matrix() const noexcept { return a_; }
  bool conjugating() const noexcept { return conjugating_; }
  Eigen::Index dim() const noexcept { return a_.rows(); }
  Linearity kind() const noexcept { return conjugating_ ? Linearity::Antilinear : Linearity::Linear; }

  Vector apply(const Vector& x) const { return conjugating_ ? Vector(a_ * x.conjugate()) : Vector(a_ * x); }
  /// Linear operator A*A of the (possibly antilinear) map: A^H A, or its
  /// entrywise conjugate for the antilinear map A o conj.
  Matrix gram() const;

 private:
  Matrix a_;
  bool conjugating_;
};

SemilinearOperator random_semilinear(Eigen::Index n, RandomSource& rng);

/// Orthogonal projection onto a subspace of C^n.
class SubspaceProjection {
 public:
  /// Validates idempotency and Hermiticity.
  static SubspaceProjection from_matrix(const Matrix& p);
  /// Projection onto the column span.
  static SubspaceProjection onto_span(const Matrix& columns);
  static SubspaceProjection zero(Eigen::Index n) { return SubspaceProjection(Matrix::Zero(n, n), 0); }

  const Matrix& matrix() const noexcept { return p_; }
  Eigen::Index rank() const noexcept { return rank_; }
  Eigen::Index dim() const noexcept { return p_.rows(); }
  /// Orthonormal basis of the range.
  Matrix basis() const;
  SubspaceProjection complement() const;

 private:
  SubspaceProjection(Matrix p, Eigen::Index rank) : p_(std::move(p)), rank_(rank) {}
  Matrix p_;
  Eigen::Index rank_;
};

SubspaceProjection join(const SubspaceProjection& p, const SubspaceProjection& q);
/// Double complement of the join of the complements.
SubspaceProjection meet(const SubspaceProjection& p, const SubspaceProjection& q);
/// ||QP - P||_F <= 1e-8.
bool proj_leq(const SubspaceProjection& p, const SubspaceProjection& q);

/// Projection onto A(range P).
SubspaceProjection induced_map(const SemilinearOperator& a, const SubspaceProjection& p);

/// |  ||sqrt(D') A x||^2 / ||A x||^2  -  ||sqrt(D) x||^2 / ||x||^2  |
double ratio_identity_residual(const SemilinearOperator& a, const State& d, const State& d_prime, const Vector& x);
/// | tr(phi(P_x) D') - tr(P_x D) | with phi(P_x) = induced_map(A, P_x).
double rank_one_trace_residual(const SemilinearOperator& a, const State& d, const State& d_prime, const Vector& x);
/// | <D'Ax, Ax><x, x> - <Dx, x><Ax, Ax> | for unit x.
double quadratic_identity_residual(const SemilinearOperator& a, const State& d, const State& d_prime, const Vector& x);
/// | <Dx, y> <A*A x, y> | for an orthogonal pair.
double orthogonal_pair_residual(const SemilinearOperator& a, const State& d, const Vector& x, const Vector& y);

struct SharpCheckOptions {
  double tolerance = 1e-9;
  Execution execution = Execution::Serial;
};

/// Ratio identity on random x and on structured probes x + lambda y, plus the
/// cross-check against the rank-one trace condition (reported in notes as
/// `equivalence_gap`).
MapReport check_ratio_identity(const SemilinearOperator& a, const State& d, const State& d_prime,
                               std::size_t samples, const RandomSource& rng, const SharpCheckOptions& options = {});

/// Sub-check "quadratic" on random unit x and sub-check "orthogonal_pair" on
/// Gram-Schmidt pairs (x, y).
MapReport check_polarized_identity(const SemilinearOperator& a, const State& d, const State& d_prime,
                                   std::size_t samples, const RandomSource& rng, const SharpCheckOptions& options = {});

struct ScalarGram {
  double mu = 0.0;
  double spread = 0.0;
  SemilinearOperator unitary;  // A / sqrt(mu), same conjugation flag
};

struct NonScalarGram {
  double spread = 0.0;
  /// x is not mapped parallel to itself by A*A; y is orthogonal to x with
  /// <A*A x, y> != 0.
  Vector x;
  Vector y;
  double coupling = 0.0;  // |<A*A x, y>|
};

using GramExtraction = std::variant<ScalarGram, NonScalarGram>;

/// Decides whether A*A = mu I at relative eigenvalue spread `tol`.
GramExtraction extract_unitary(const SemilinearOperator& a, double tol = 1e-7);

struct Theorem2Config {
  std::size_t trials = 100;
  double trace_tol = 1e-10;
  double identity_tol = 1e-9;
  double scalar_state_tol = 1e-9;  // relative eigenvalue spread below which D is scalar
  double gram_tol = 1e-7;
  double verify_tol = 1e-7;
  std::size_t remark_samples = 200;
  Execution execution = Execution::Serial;

  Json to_json() const;
};

/// Stages: 1_state_scalarity, 2_trace_condition, 3_identities,
/// 4_gram_scalar, 5_induced_congruence. A scalar D switches to the
/// degenerate demonstration (remark_forced_state, remark_nonunitary_operator)
/// and the final verdict hypothesis_degenerate.
ClassificationReport theorem2_harness(const SemilinearOperator& a, const State& d, const State& d_prime,
                                      const RandomSource& rng, const Theorem2Config& config = {});

/// Non-unitary operator used by the degenerate demonstration: diag(1, 2, ..., n).
SemilinearOperator documented_nonunitary(Eigen::Index n);

/// Dimension-2 map on rays that rotates the Bloch azimuth (in the eigenbasis
/// of D) by kappa * cos(polar angle). Latitudes are kept, so tr(P D) is
/// preserved, but antipodal points turn by opposite angles and orthogonality
/// is lost for kappa != 0.
ProjectionMapOracle remark_dim2_twist(const State& d, double kappa);

}  // namespace qeffect
