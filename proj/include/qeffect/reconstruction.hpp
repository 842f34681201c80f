#pragma once

#include "qeffect/effects.hpp"
#include "qeffect/order_maps.hpp"
#include "qeffect/report.hpp"

#include <functional>

namespace qeffect {

/// A map on rank-one projections, given by the ranges of the image projections.
struct ProjectionMapOracle {
  Eigen::Index dim = 0;
  std::function<Ray(const Ray&)> map;

  Ray operator()(const Ray& r) const { return map(r); }
};

/// Implementing operator of a congruence: x -> U x (linear) or x -> U conj(x).
struct Implementer {
  Linearity kind = Linearity::Linear;
  Matrix unitary;

  Vector apply(const Vector& x) const {
    return kind == Linearity::Linear ? Vector(unitary * x) : Vector(unitary * x.conjugate());
  }
  /// U E U* or U conj(E) U*.
  Matrix congruence(const Matrix& e) const;
};

struct ReconstructionResult {
  Linearity kind = Linearity::Linear;
  Matrix unitary;
  double max_residual = 0.0;

  Implementer implementer() const { return {kind, unitary}; }
};

struct ReconstructionOptions {
  double ortho_tol = 1e-8;
  double phase_tol = 1e-6;
  double verify_tol = 1e-8;
  std::size_t verification_rays = 50;
  std::uint64_t verification_seed = 0x5eed;
};

/// 1 - |tr(V* U)| / n; zero exactly when U = cV with |c| = 1.
double projective_distance(const Matrix& u, const Matrix& v, Linearity kind = Linearity::Linear);
/// Throws KindMismatch when a linear operator is compared with an antilinear one.
double projective_distance(const Implementer& a, const Implementer& b);

/// Recovers the unitary or antiunitary operator inducing an
/// orthogonality-preserving map of rank-one projections. Images of the
/// standard basis fix the frame, images of (e_1 + e_j)/sqrt(2) fix the
/// relative phases, the image of (e_1 + i e_2)/sqrt(2) decides linearity, and
/// random rays verify the result.
ReconstructionResult reconstruct_wigner(const ProjectionMapOracle& oracle,
                                        const ReconstructionOptions& options = {});

/// Oracle r -> dominant eigenvector of phi(P_r) for an effect map.
ProjectionMapOracle rank_one_oracle(const EffectMapFn& map, Eigen::Index dim);

struct Theorem1Config {
  std::size_t trials = 100;
  double ortho_tol = 1e-8;
  double stage_tol = 1e-7;  // homogeneity, strength transport, global verification
  double weak_lambda = 0.3;
  double weak_mu = 0.9;
  double min_probability = 1e-6;  // resample rays with tr(P_r D) below this
  Execution execution = Execution::Serial;

  Json to_json() const;
};

/// Sampled verification of the order/trace characterization, one report
/// stage per proof obligation:
///   a_order_hypothesis, b_trace_hypothesis, c_projection_rank,
///   d_scalar_homogeneity, e_rank_one_orthogonality, f_reconstruction,
///   g_global_verification.
/// Stops at the first failing stage.
ClassificationReport classify_theorem1(const EffectMapSpec& spec, const State& d, const State& d_prime,
                                       Eigen::Index dim, const RandomSource& rng,
                                       const Theorem1Config& config = {});

}  // namespace qeffect
