#pragma once

#include "qeffect/effects.hpp"
#include "qeffect/report.hpp"
#include "qeffect/trials.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qeffect {

/// Smallest admissible eigenvalue of T for the counterexample family.
inline constexpr double kMkFloor = 1e-3;
/// Largest condition number tolerated by any intermediate inversion.
inline constexpr double kMaxInversionCondition = 1e12;

enum class MapVariant { Unitary, Antiunitary, MK, MKInverse, Compose };
const char* to_string(MapVariant v);

/// Symbolic bijection of the effect algebra.
///
///  - Unitary(U):      E -> U E U*
///  - Antiunitary(U):  E -> U conj(E) U*   (conjugation in the standard basis)
///  - MK(T):           E -> S^{-1/2} ((I - T^2 + T (I + E)^{-1} T)^{-1} - I) S^{-1/2},
///                     S = T^2 (2I - T^2)^{-1}, an order automorphism that is
///                     not an ortho-order automorphism unless T = I
///  - MKInverse(T):    the inverse of MK(T)
///  - Compose(list):   members applied left to right
struct EffectMapSpec {
  MapVariant variant = MapVariant::Unitary;
  Matrix matrix;
  std::vector<EffectMapSpec> members;

  static EffectMapSpec unitary(Matrix u) { return {MapVariant::Unitary, std::move(u), {}}; }
  static EffectMapSpec antiunitary(Matrix u) { return {MapVariant::Antiunitary, std::move(u), {}}; }
  static EffectMapSpec mk(Matrix t) { return {MapVariant::MK, std::move(t), {}}; }
  static EffectMapSpec mk_inverse(Matrix t) { return {MapVariant::MKInverse, std::move(t), {}}; }
  static EffectMapSpec compose(std::vector<EffectMapSpec> members) {
    return {MapVariant::Compose, Matrix(), std::move(members)};
  }

  Eigen::Index dim() const;
  /// Throws InvalidInput / DimensionMismatch when invariants do not hold.
  void validate() const;
  bool is_congruence() const { return variant == MapVariant::Unitary || variant == MapVariant::Antiunitary; }
};

using EffectMapFn = std::function<Effect(const Effect&)>;

/// Map description with all spectral factors precomputed; evaluation is const and
/// safe to share between threads.
class CompiledMap {
 public:
  explicit CompiledMap(const EffectMapSpec& spec);

  Effect operator()(const Effect& e) const;
  Eigen::Index dim() const noexcept { return dim_; }

 private:
  struct Step {
    MapVariant variant;
    Matrix u;
    // counterexample factors, all Hermitian
    Matrix t, t_sq, t_inv, s_sqrt, s_inv_sqrt;
  };
  void push(const EffectMapSpec& spec);
  Matrix apply_step(const Step& step, const Matrix& e) const;

  Eigen::Index dim_ = 0;
  std::vector<Step> steps_;
};

Effect apply_map(const EffectMapSpec& spec, const Effect& e);

/// Closed-form inverse: Unitary(U*) / Antiunitary(U^T) / MK <-> MKInverse /
/// reversed composition.
EffectMapSpec inverse(const EffectMapSpec& spec);

/// D' that makes tr(phi(E) D') = tr(E D) hold for a congruence; nullopt otherwise.
std::optional<State> suggest_matching_state(const EffectMapSpec& spec, const State& d);

/// Random T for the counterexample family: Haar eigenbasis, spectrum uniform
/// on [lo, 1].
Matrix random_mk_parameter(Eigen::Index n, RandomSource& rng, double lo = kMkFloor);

struct CheckOptions {
  double tolerance = 1e-8;
  Execution execution = Execution::Serial;
  /// Both images and originals of "incomparable" samples must miss the order
  /// in each direction by at least this much.
  double incomparable_margin = 1e-3;
  std::size_t rejection_cap = 1000;
};

/// Order preservation in both directions: comparable pairs stay comparable,
/// incomparable pairs stay incomparable, and (when `backward` is given)
/// comparable image pairs pull back to comparable pairs.
MapReport check_order_preservation(const EffectMapFn& forward, const EffectMapFn& backward,
                                   Eigen::Index dim, std::size_t trials, const RandomSource& rng,
                                   const CheckOptions& options = {});
MapReport check_order_preservation(const EffectMapSpec& spec, Eigen::Index dim, std::size_t trials,
                                   const RandomSource& rng, const CheckOptions& options = {});

/// max ||phi(I - E) - (I - phi(E))||_F over sampled effects.
MapReport check_ortho_compatibility(const EffectMapFn& map, Eigen::Index dim, std::size_t trials,
                                    const RandomSource& rng, const CheckOptions& options = {});
MapReport check_ortho_compatibility(const EffectMapSpec& spec, Eigen::Index dim, std::size_t trials,
                                    const RandomSource& rng, const CheckOptions& options = {});

/// max |tr(phi(E) D') - tr(E D)| over sampled effects; default tolerance 1e-10.
MapReport check_trace_condition(const EffectMapFn& map, const State& d, const State& d_prime,
                                std::size_t trials, const RandomSource& rng,
                                const CheckOptions& options = {1e-10});
MapReport check_trace_condition(const EffectMapSpec& spec, const State& d, const State& d_prime,
                                std::size_t trials, const RandomSource& rng,
                                const CheckOptions& options = {1e-10});

/// Replays one witness of the report produced by the checkers above;
/// returns the recomputed residual.
double replay_witness(const EffectMapSpec& spec, const Witness& w, const State* d = nullptr,
                      const State* d_prime = nullptr);

}  // namespace qeffect
