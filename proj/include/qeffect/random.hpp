#pragma once

#include "qeffect/linalg.hpp"

#include <cstdint>
#include <random>

namespace qeffect {

/// Deterministic source built on std::mt19937_64, whose output sequence is
/// fixed by the C++ standard. Reals are derived from raw 64-bit draws
/// without std:: distributions, so streams are bit-identical across
/// standard library implementations.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; one draw per call, the partner is discarded.
  double normal();
  Complex complex_normal() { return {normal(), normal()}; }
  bool bernoulli(double p = 0.5) { return uniform() < p; }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

  /// Independent child stream for trial `index`; depends only on (seed, index).
  RandomSource fork(std::uint64_t index) const { return RandomSource(sub_seed(seed_, index)); }

  static std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RandomSource& rng);

/// QR of a complex Gaussian matrix, with R's diagonal phases folded back into Q.
Matrix haar_unitary(Eigen::Index n, RandomSource& rng);

/// U diag(spectrum) U* for a Haar U.
Matrix hermitian_with_spectrum(const RealVector& spectrum, RandomSource& rng);

/// Spectrum uniform on [0, 1] in a Haar eigenbasis.
Matrix random_effect_matrix(Eigen::Index n, RandomSource& rng);

/// Effect with exactly `rank` nonzero eigenvalues (uniform on [0.05, 1]).
Matrix random_rank_deficient_effect(Eigen::Index n, Eigen::Index rank, RandomSource& rng);

/// Hilbert-Schmidt distributed density matrix G G* / tr(G G*).
Matrix random_state_matrix(Eigen::Index n, RandomSource& rng);

Matrix random_projection_matrix(Eigen::Index n, Eigen::Index rank, RandomSource& rng);

/// Unit vector, uniform on the complex sphere.
Vector random_unit_vector(Eigen::Index n, RandomSource& rng);

/// Invertible Gaussian matrix with condition number at most `max_condition`;
/// candidates above the bound are redrawn.
Matrix random_invertible(Eigen::Index n, RandomSource& rng, double max_condition = 1e3);

}  // namespace qeffect
