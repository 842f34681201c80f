#include "qeffect/order_maps.hpp"

#include <algorithm>
#include <cmath>

namespace qeffect {

const char* to_string(MapVariant v) {
  switch (v) {
    case MapVariant::Unitary: return "unitary";
    case MapVariant::Antiunitary: return "antiunitary";
    case MapVariant::MK: return "mk";
    case MapVariant::MKInverse: return "mk_inverse";
    case MapVariant::Compose: return "compose";
  }
  return "unknown";
}

Eigen::Index EffectMapSpec::dim() const {
  if (variant != MapVariant::Compose) return matrix.rows();
  return members.empty() ? 0 : members.front().dim();
}

void EffectMapSpec::validate() const {
  switch (variant) {
    case MapVariant::Unitary:
    case MapVariant::Antiunitary: {
      require_square(matrix, "map unitary");
      const double r = (matrix.adjoint() * matrix - identity(matrix.rows())).norm();
      if (r > 1e-9) throw Error(ErrorKind::InvalidInput, "map matrix is not unitary, ||U*U - I|| = " + std::to_string(r));
      return;
    }
    case MapVariant::MK:
    case MapVariant::MKInverse: {
      require_square(matrix, "map parameter T");
      if (!is_hermitian(matrix)) throw Error(ErrorKind::NotHermitian, "map parameter T is not Hermitian");
      const EigenDecomposition eig = eig_hermitian(matrix);
      if (eig.smallest() <= kMkFloor || eig.largest() > 1.0 + 1e-10) {
        throw Error(ErrorKind::InvalidInput, "map parameter T spectrum [" + std::to_string(eig.smallest()) +
                                                 ", " + std::to_string(eig.largest()) + "] outside (1e-3, 1]");
      }
      return;
    }
    case MapVariant::Compose: {
      if (members.empty()) throw Error(ErrorKind::InvalidInput, "empty composition");
      const Eigen::Index n = members.front().dim();
      for (const auto& m : members) {
        m.validate();
        if (m.dim() != n) throw Error(ErrorKind::DimensionMismatch, "composition members differ in dimension");
      }
      return;
    }
  }
}

namespace {

// Inverse of a Hermitian positive definite matrix with a condition guard.
Matrix guarded_inverse(const Matrix& m, const char* what) {
  const EigenDecomposition eig = eig_hermitian(hermitian_part(m));
  const double lo = eig.smallest();
  const double hi = eig.largest();
  if (!(lo > 0.0) || hi / lo > kMaxInversionCondition) {
    throw Error(ErrorKind::NumericalBreakdown,
                std::string(what) + " has condition " + std::to_string(hi / lo));
  }
  RealVector inv = eig.eigenvalues.cwiseInverse();
  return hermitian_part(eig.eigenvectors * inv.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint());
}

Matrix spectral(const EigenDecomposition& eig, const RealVector& values) {
  return hermitian_part(eig.eigenvectors * values.cast<Complex>().asDiagonal() * eig.eigenvectors.adjoint());
}

}  // namespace

CompiledMap::CompiledMap(const EffectMapSpec& spec) {
  spec.validate();
  dim_ = spec.dim();
  push(spec);
}

void CompiledMap::push(const EffectMapSpec& spec) {
  if (spec.variant == MapVariant::Compose) {
    for (const auto& m : spec.members) push(m);
    return;
  }
  Step step{spec.variant, {}, {}, {}, {}, {}, {}};
  if (spec.is_congruence()) {
    step.u = spec.matrix;
  } else {
    const EigenDecomposition eig = eig_hermitian(spec.matrix);
    const RealVector t = eig.eigenvalues;
    const RealVector t2 = t.cwiseProduct(t);
    const RealVector s = t2.cwiseQuotient((2.0 - t2.array()).matrix());
    step.t = spectral(eig, t);
    step.t_sq = spectral(eig, t2);
    step.t_inv = spectral(eig, t.cwiseInverse());
    step.s_sqrt = spectral(eig, s.cwiseSqrt());
    step.s_inv_sqrt = spectral(eig, s.cwiseSqrt().cwiseInverse());
  }
  steps_.push_back(std::move(step));
}

Matrix CompiledMap::apply_step(const Step& step, const Matrix& e) const {
  const Eigen::Index n = e.rows();
  const Matrix id = identity(n);
  switch (step.variant) {
    case MapVariant::Unitary: return hermitian_part(step.u * e * step.u.adjoint());
    case MapVariant::Antiunitary: return hermitian_part(step.u * e.conjugate() * step.u.adjoint());
    case MapVariant::MK: {
      const Matrix resolvent = guarded_inverse(id + e, "I + E");
      const Matrix inner = id - step.t_sq + step.t * resolvent * step.t;
      const Matrix outer = guarded_inverse(inner, "I - T^2 + T(I+E)^{-1}T");
      return hermitian_part(step.s_inv_sqrt * (outer - id) * step.s_inv_sqrt);
    }
    case MapVariant::MKInverse: {
      const Matrix lifted = step.s_sqrt * e * step.s_sqrt + id;
      const Matrix inner = guarded_inverse(lifted, "S^{1/2} Y S^{1/2} + I");
      const Matrix resolvent = step.t_inv * (inner - id + step.t_sq) * step.t_inv;
      return hermitian_part(guarded_inverse(resolvent, "(I + E)^{-1}") - id);
    }
    case MapVariant::Compose: break;
  }
  throw Error(ErrorKind::InvalidInput, "unexpected composite step");
}

Effect CompiledMap::operator()(const Effect& e) const {
  if (e.dim() != dim_) throw Error(ErrorKind::DimensionMismatch, "effect dimension differs from map dimension");
  Matrix current = e.matrix();
  for (const auto& step : steps_) current = apply_step(step, current);
  return Effect::from_matrix(current);
}

Effect apply_map(const EffectMapSpec& spec, const Effect& e) { return CompiledMap(spec)(e); }

EffectMapSpec inverse(const EffectMapSpec& spec) {
  switch (spec.variant) {
    case MapVariant::Unitary: return EffectMapSpec::unitary(spec.matrix.adjoint());
    case MapVariant::Antiunitary: return EffectMapSpec::antiunitary(spec.matrix.transpose());
    case MapVariant::MK: return EffectMapSpec::mk_inverse(spec.matrix);
    case MapVariant::MKInverse: return EffectMapSpec::mk(spec.matrix);
    case MapVariant::Compose: {
      std::vector<EffectMapSpec> members;
      for (auto it = spec.members.rbegin(); it != spec.members.rend(); ++it) members.push_back(inverse(*it));
      return EffectMapSpec::compose(std::move(members));
    }
  }
  return spec;
}

std::optional<State> suggest_matching_state(const EffectMapSpec& spec, const State& d) {
  if (!spec.is_congruence()) return std::nullopt;
  require_same_dim(spec.matrix, d.matrix(), "suggest_matching_state");
  const Matrix& u = spec.matrix;
  const Matrix base = spec.variant == MapVariant::Unitary ? d.matrix() : Matrix(d.matrix().conjugate());
  Matrix moved = hermitian_part(u * base * u.adjoint());
  moved /= moved.trace().real();
  return State::from_matrix(moved);
}

Matrix random_mk_parameter(Eigen::Index n, RandomSource& rng, double lo) {
  RealVector s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = rng.uniform(lo, 1.0);
  // keep strictly above the floor after rounding
  s = s.cwiseMax(lo * (1.0 + 1e-9) + 1e-15);
  return hermitian_with_spectrum(s, rng);
}

namespace {

double scaled_margin(const Matrix& lo, const Matrix& hi) {
  const Matrix diff = hi - lo;
  return eig_hermitian(diff).smallest() / std::max(1.0, diff.norm());
}

Witness make_witness(std::uint64_t trial, double residual,
                     std::vector<std::pair<std::string, Matrix>> inputs) {
  return Witness{"", trial, residual, std::move(inputs)};
}

// Two effects that miss the order in both directions by `margin`.
std::optional<std::pair<Effect, Effect>> incomparable_pair(Eigen::Index dim, RandomSource& rng,
                                                           const CheckOptions& options) {
  for (std::size_t attempt = 0; attempt < options.rejection_cap; ++attempt) {
    Effect e = random_effect(dim, rng);
    Effect f = random_effect(dim, rng);
    if (scaled_margin(e.matrix(), f.matrix()) < -options.incomparable_margin &&
        scaled_margin(f.matrix(), e.matrix()) < -options.incomparable_margin) {
      return std::make_pair(std::move(e), std::move(f));
    }
  }
  return std::nullopt;
}

MapReport new_report(const char* name, std::size_t trials, const RandomSource& rng, double tolerance) {
  MapReport r;
  r.name = name;
  r.trials = trials;
  r.seed = rng.seed();
  r.tolerance = tolerance;
  return r;
}

}  // namespace

MapReport check_order_preservation(const EffectMapFn& forward, const EffectMapFn& backward,
                                   Eigen::Index dim, std::size_t trials, const RandomSource& rng,
                                   const CheckOptions& options) {
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
  MapReport report = new_report("order_preservation", trials, rng, options.tolerance);
  const double tol = options.tolerance;
  const bool check_incomparable = dim >= 2;

  struct Outcome {
    TrialSample comparable, incomparable, pullback;
    bool incomparable_found = false;
  };

  auto outcomes = run_trials(trials, options.execution, [&](std::size_t i) {
    RandomSource local = rng.fork(i);
    Outcome out;

    auto [e, f] = comparable_pair(dim, local);
    {
      const double m = scaled_margin(forward(e).matrix(), forward(f).matrix());
      out.comparable.residual = std::max(0.0, -m);
      out.comparable.violated = m < -tol;
      if (out.comparable.violated)
        out.comparable.witness = make_witness(i, -m, {{"E", e.matrix()}, {"F", f.matrix()}});
    }

    if (check_incomparable) {
      if (auto pair = incomparable_pair(dim, local, options)) {
        out.incomparable_found = true;
        const Matrix pe = forward(pair->first).matrix();
        const Matrix pf = forward(pair->second).matrix();
        const double m = std::max(scaled_margin(pe, pf), scaled_margin(pf, pe));
        out.incomparable.violated = m >= -tol;
        if (out.incomparable.violated) {
          out.incomparable.witness =
              make_witness(i, m, {{"E", pair->first.matrix()}, {"F", pair->second.matrix()}});
        }
      }
    }

    if (backward) {
      auto [y1, y2] = comparable_pair(dim, local);
      const double m = scaled_margin(backward(y1).matrix(), backward(y2).matrix());
      out.pullback.residual = std::max(0.0, -m);
      out.pullback.violated = m < -tol;
      if (out.pullback.violated)
        out.pullback.witness = make_witness(i, -m, {{"E", y1.matrix()}, {"F", y2.matrix()}});
    }
    return out;
  });

  std::vector<TrialSample> comparable, incomparable, pullback;
  std::size_t missing = 0;
  for (auto& o : outcomes) {
    comparable.push_back(std::move(o.comparable));
    if (check_incomparable) {
      if (o.incomparable_found)
        incomparable.push_back(std::move(o.incomparable));
      else
        ++missing;
    }
    if (backward) pullback.push_back(std::move(o.pullback));
  }
  absorb(report, "order_comparable", comparable);
  // incomparable residuals are image margins, not violations magnitudes
  const double keep = report.max_residual;
  absorb(report, "order_incomparable", incomparable);
  report.max_residual = keep;
  if (backward) absorb(report, "order_backward", pullback);

  if (!check_incomparable) report.notes.push_back("dimension 1: every pair is comparable, incomparable-pair check skipped");
  if (missing > 0) {
    report.notes.push_back(std::to_string(missing) + " trial(s) found no incomparable pair within " +
                           std::to_string(options.rejection_cap) + " attempts");
  }
  if (!backward) report.notes.push_back("no inverse supplied, backward check skipped");
  return report;
}

MapReport check_order_preservation(const EffectMapSpec& spec, Eigen::Index dim, std::size_t trials,
                                   const RandomSource& rng, const CheckOptions& options) {
  if (spec.dim() != dim) throw Error(ErrorKind::DimensionMismatch, "map dimension differs from requested dimension");
  const CompiledMap fwd(spec);
  const CompiledMap bwd(inverse(spec));
  return check_order_preservation([&](const Effect& e) { return fwd(e); },
                                  [&](const Effect& e) { return bwd(e); }, dim, trials, rng, options);
}

MapReport check_ortho_compatibility(const EffectMapFn& map, Eigen::Index dim, std::size_t trials,
                                    const RandomSource& rng, const CheckOptions& options) {
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
  MapReport report = new_report("ortho_compatibility", trials, rng, options.tolerance);
  const Matrix id = identity(dim);
  auto samples = run_trials(trials, options.execution, [&](std::size_t i) {
    RandomSource local = rng.fork(i);
    const Effect e = random_effect(dim, local);
    const double r = (map(orthocomplement(e)).matrix() - (id - map(e).matrix())).norm();
    TrialSample s{r, r > options.tolerance, {}};
    if (s.violated) s.witness = make_witness(i, r, {{"E", e.matrix()}});
    return s;
  });
  absorb(report, "ortho", samples);
  return report;
}

MapReport check_ortho_compatibility(const EffectMapSpec& spec, Eigen::Index dim, std::size_t trials,
                                    const RandomSource& rng, const CheckOptions& options) {
  if (spec.dim() != dim) throw Error(ErrorKind::DimensionMismatch, "map dimension differs from requested dimension");
  const CompiledMap fwd(spec);
  return check_ortho_compatibility([&](const Effect& e) { return fwd(e); }, dim, trials, rng, options);
}

MapReport check_trace_condition(const EffectMapFn& map, const State& d, const State& d_prime,
                                std::size_t trials, const RandomSource& rng, const CheckOptions& options) {
  if (trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
  require_same_dim(d.matrix(), d_prime.matrix(), "trace condition states");
  MapReport report = new_report("trace_condition", trials, rng, options.tolerance);
  const Eigen::Index dim = d.dim();
  auto samples = run_trials(trials, options.execution, [&](std::size_t i) {
    RandomSource local = rng.fork(i);
    const Effect e = random_effect(dim, local);
    const double r = std::abs(trace_pair(map(e), d_prime) - trace_pair(e, d));
    TrialSample s{r, r > options.tolerance, {}};
    if (s.violated) s.witness = make_witness(i, r, {{"E", e.matrix()}});
    return s;
  });
  absorb(report, "trace", samples);
  return report;
}

MapReport check_trace_condition(const EffectMapSpec& spec, const State& d, const State& d_prime,
                                std::size_t trials, const RandomSource& rng, const CheckOptions& options) {
  if (spec.dim() != d.dim()) throw Error(ErrorKind::DimensionMismatch, "map dimension differs from state dimension");
  const CompiledMap fwd(spec);
  return check_trace_condition([&](const Effect& e) { return fwd(e); }, d, d_prime, trials, rng, options);
}

double replay_witness(const EffectMapSpec& spec, const Witness& w, const State* d, const State* d_prime) {
  const CompiledMap fwd(spec);
  auto input = [&](const std::string& name) -> Effect {
    for (const auto& [key, m] : w.inputs)
      if (key == name) return Effect::from_matrix(m);
    throw Error(ErrorKind::InvalidInput, "witness has no input '" + name + "'");
  };
  if (w.check == "order_comparable") {
    return -scaled_margin(fwd(input("E")).matrix(), fwd(input("F")).matrix());
  }
  if (w.check == "order_incomparable") {
    const Matrix pe = fwd(input("E")).matrix();
    const Matrix pf = fwd(input("F")).matrix();
    return std::max(scaled_margin(pe, pf), scaled_margin(pf, pe));
  }
  if (w.check == "order_backward") {
    const CompiledMap bwd(inverse(spec));
    return -scaled_margin(bwd(input("E")).matrix(), bwd(input("F")).matrix());
  }
  if (w.check == "ortho") {
    const Effect e = input("E");
    return (fwd(orthocomplement(e)).matrix() - (identity(e.dim()) - fwd(e).matrix())).norm();
  }
  if (w.check == "trace") {
    if (d == nullptr || d_prime == nullptr) throw Error(ErrorKind::InvalidInput, "trace witness replay needs both states");
    const Effect e = input("E");
    return std::abs(trace_pair(fwd(e), *d_prime) - trace_pair(e, *d));
  }
  if (w.check == "rank_one_orthogonality") {
    // E = lambda P + mu Q^perp-side; lambda and mu are read back from E
    const Matrix pm = input("P").matrix();
    const Matrix qm = input("Q").matrix();
    const Effect e = input("E");
    const double lambda = trace_pair(e.matrix(), pm);
    const double mu = trace_pair(e.matrix(), qm);
    const EigenDecomposition eig = eig_hermitian(fwd(e).matrix());
    const Ray p_img = dominant_ray(fwd(Effect::trusted(pm)).matrix());
    const Ray q_img = dominant_ray(fwd(Effect::trusted(qm)).matrix());
    const double bracket = std::max({0.0, lambda - eig.smallest(), eig.largest() - mu});
    const double strength_err = std::max(std::abs(strength(eig, p_img) - lambda), std::abs(strength(eig, q_img) - mu));
    return std::max({bracket, strength_err, p_img.overlap(q_img)});
  }
  throw Error(ErrorKind::InvalidInput, "unknown witness check '" + w.check + "'");
}

}  // namespace qeffect
