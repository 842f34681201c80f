#include "qeffect/reconstruction.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qeffect {

Matrix Implementer::congruence(const Matrix& e) const {
  const Matrix base = kind == Linearity::Linear ? e : Matrix(e.conjugate());
  return hermitian_part(unitary * base * unitary.adjoint());
}

double projective_distance(const Matrix& u, const Matrix& v, Linearity /*kind*/) {
  require_square(u, "projective_distance");
  require_same_dim(u, v, "projective_distance");
  // Antilinear operators x -> U conj(x) are stored by their unitary part, so
  // both kinds compare the stored matrices.
  const double n = static_cast<double>(u.rows());
  return std::max(0.0, 1.0 - std::abs((v.adjoint() * u).trace()) / n);
}

double projective_distance(const Implementer& a, const Implementer& b) {
  if (a.kind != b.kind) {
    throw Error(ErrorKind::KindMismatch, std::string("comparing ") + to_string(a.kind) + " with " + to_string(b.kind));
  }
  return projective_distance(a.unitary, b.unitary, a.kind);
}

ReconstructionResult reconstruct_wigner(const ProjectionMapOracle& oracle, const ReconstructionOptions& options) {
  const Eigen::Index n = oracle.dim;
  if (n < 1) throw Error(ErrorKind::BadDimension, "oracle dimension must be >= 1");

  Matrix frame(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Ray img = oracle(Ray::basis(n, i));
    if (img.dim() != n) throw Error(ErrorKind::DimensionMismatch, "oracle image dimension");
    frame.col(i) = img.vector();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double overlap = std::abs(frame.col(i).dot(frame.col(j)));
      if (overlap > options.ortho_tol) {
        throw Error(ErrorKind::OrthogonalityViolated, "images of e_" + std::to_string(i) + " and e_" +
                                                          std::to_string(j) + " overlap by " + std::to_string(overlap));
      }
    }
  }

  const double half = 1.0 / std::sqrt(2.0);
  Vector phases = Vector::Ones(n);
  for (Eigen::Index j = 1; j < n; ++j) {
    Vector probe = Vector::Zero(n);
    probe(0) = half;
    probe(j) = half;
    const Vector c = frame.adjoint() * oracle(Ray(probe)).vector();
    const double a0 = std::abs(c(0));
    const double aj = std::abs(c(j));
    if (a0 == 0.0 || aj == 0.0 || std::abs(a0 - half) > options.phase_tol || std::abs(aj - half) > options.phase_tol) {
      throw Error(ErrorKind::PhaseInconsistent, "phase probe " + std::to_string(j) + " has coefficient magnitudes " +
                                                    std::to_string(a0) + ", " + std::to_string(aj));
    }
    const Complex cj = c(j) * std::conj(c(0)) / a0;
    phases(j) = cj / std::abs(cj);
  }

  ReconstructionResult result;
  result.unitary = frame * phases.asDiagonal();

  if (n >= 2) {
    Vector probe = Vector::Zero(n);
    probe(0) = half;
    probe(1) = Complex(0.0, half);
    const Vector c = frame.adjoint() * oracle(Ray(probe)).vector();
    if (std::abs(c(0)) == 0.0) throw Error(ErrorKind::PhaseInconsistent, "linearity probe lost the e_1 component");
    const Complex ratio = (c(1) / phases(1)) / (c(0) / phases(0));
    const Complex i_unit(0.0, 1.0);
    if (std::abs(ratio - i_unit) <= options.phase_tol) {
      result.kind = Linearity::Linear;
    } else if (std::abs(ratio + i_unit) <= options.phase_tol) {
      result.kind = Linearity::Antilinear;
    } else {
      throw Error(ErrorKind::PhaseInconsistent, "linearity probe ratio (" + std::to_string(ratio.real()) + ", " +
                                                    std::to_string(ratio.imag()) + ") is neither i nor -i");
    }
  }

  RandomSource rng(options.verification_seed);
  const Implementer imp = result.implementer();
  for (std::size_t k = 0; k < options.verification_rays; ++k) {
    const Ray r = random_ray(n, rng);
    const Ray predicted(imp.apply(r.vector()));
    const double residual = 1.0 - oracle(r).overlap(predicted);
    result.max_residual = std::max(result.max_residual, residual);
  }
  if (result.max_residual > options.verify_tol) {
    throw Error(ErrorKind::VerificationFailed, "worst projective mismatch " + std::to_string(result.max_residual));
  }
  return result;
}

ProjectionMapOracle rank_one_oracle(const EffectMapFn& map, Eigen::Index dim) {
  return {dim, [map](const Ray& r) { return dominant_ray(map(Effect::trusted(r.projection())).matrix()); }};
}

Json Theorem1Config::to_json() const {
  return Json{{"trials", trials},
              {"ortho_tol", ortho_tol},
              {"stage_tol", stage_tol},
              {"order_tol", 1e-8},
              {"trace_tol", 1e-10},
              {"sharp_tol", tol::sharp},
              {"weak_lambda", weak_lambda},
              {"weak_mu", weak_mu},
              {"min_probability", min_probability}};
}

namespace {

constexpr std::array<const char*, 7> kStageNames = {
    "a_order_hypothesis",   "b_trace_hypothesis",       "c_projection_rank", "d_scalar_homogeneity",
    "e_rank_one_orthogonality", "f_reconstruction", "g_global_verification"};

StageResult from_map_report(const char* name, const MapReport& r) {
  StageResult s;
  s.name = name;
  s.verdict = r.passed() ? StageVerdict::Pass : StageVerdict::Fail;
  s.residual = r.max_residual;
  s.witnesses = r.witnesses;
  s.data = Json{{"trials", r.trials}, {"seed", r.seed}, {"tolerance", r.tolerance}, {"violations", r.violations}};
  if (!r.notes.empty()) s.data["notes"] = r.notes;
  return s;
}

// Ray r with tr(P_r D) >= floor.
Ray probable_ray(Eigen::Index n, const State& d, double floor, RandomSource& rng) {
  for (;;) {
    Ray r = random_ray(n, rng);
    if (trace_pair(r.projection(), d.matrix()) >= floor) return r;
  }
}

Ray orthogonal_ray(const Ray& p, RandomSource& rng) {
  for (;;) {
    Vector q = random_unit_vector(p.dim(), rng);
    q -= p.vector() * p.vector().dot(q);
    if (q.norm() > 1e-3) return Ray(q);
  }
}

struct Sample {
  double residual = 0.0;
  bool violated = false;
  double aux = 0.0;
  Witness witness;
};

template <class F>
std::vector<Sample> sample_stage(std::size_t trials, Execution ex, const RandomSource& rng, F&& f) {
  return run_trials(trials, ex, [&](std::size_t i) {
    RandomSource local = rng.fork(i);
    Sample s = f(i, local);
    s.witness.trial = i;
    return s;
  });
}

void fold(StageResult& stage, const std::vector<Sample>& samples, const std::string& check) {
  const Sample* worst = nullptr;
  for (const auto& s : samples) {
    stage.residual = std::max(stage.residual, s.residual);
    if (s.violated && (worst == nullptr || s.residual > worst->residual)) worst = &s;
  }
  if (worst != nullptr) {
    stage.verdict = StageVerdict::Fail;
    Witness w = worst->witness;
    w.check = check;
    w.residual = worst->residual;
    stage.witnesses.push_back(std::move(w));
  }
}

}  // namespace

ClassificationReport classify_theorem1(const EffectMapSpec& spec, const State& d, const State& d_prime,
                                       Eigen::Index dim, const RandomSource& rng, const Theorem1Config& config) {
  if (dim < 2) throw Error(ErrorKind::BadDimension, "classification needs dim >= 2");
  if (spec.dim() != dim || d.dim() != dim || d_prime.dim() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "map, states and requested dimension must agree");
  }
  if (config.trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
  if (!(0.0 < config.weak_lambda && config.weak_lambda < config.weak_mu && config.weak_mu <= 1.0)) {
    throw Error(ErrorKind::InvalidInput, "need 0 < weak_lambda < weak_mu <= 1");
  }

  ClassificationReport report;
  report.pipeline = "theorem1";
  report.seed = rng.seed();
  report.dim = dim;
  report.config = config.to_json();

  const CompiledMap phi(spec);
  const EffectMapFn phi_fn = [&phi](const Effect& e) { return phi(e); };
  const Execution ex = config.execution;
  const std::size_t trials = config.trials;

  auto finish_refuted = [&](std::size_t failed) {
    report.final.verdict = FinalVerdict::Refuted;
    report.final.stage = report.stages.back().name;
    for (std::size_t k = failed + 1; k < kStageNames.size(); ++k) {
      StageResult s;
      s.name = kStageNames[k];
      s.verdict = StageVerdict::Skipped;
      report.stages.push_back(std::move(s));
    }
    return report;
  };
  auto push = [&](StageResult s) {
    report.stages.push_back(std::move(s));
    return report.stages.back().verdict == StageVerdict::Fail;
  };

  // (a) order hypothesis
  {
    CheckOptions opts;
    opts.execution = ex;
    if (push(from_map_report(kStageNames[0], check_order_preservation(spec, dim, trials, rng.fork(1), opts))))
      return finish_refuted(0);
  }
  // (b) trace hypothesis
  {
    CheckOptions opts{1e-10};
    opts.execution = ex;
    if (push(from_map_report(kStageNames[1], check_trace_condition(spec, d, d_prime, trials, rng.fork(2), opts))))
      return finish_refuted(1);
  }
  // (c) projections keep being projections of the same rank
  {
    StageResult s;
    s.name = kStageNames[2];
    auto samples = sample_stage(trials, ex, rng.fork(3), [&](std::size_t i, RandomSource& local) {
      const Eigen::Index k = static_cast<Eigen::Index>(i % static_cast<std::size_t>(dim + 1));
      const Effect p = random_projection(dim, k, local);
      const Matrix img = phi(p).matrix();
      const EigenDecomposition eig = eig_hermitian(img);
      double off = 0.0;
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double x = eig.eigenvalues(j);
        off = std::max(off, std::min(std::abs(x), std::abs(x - 1.0)));
      }
      const Eigen::Index image_rank = (eig.eigenvalues.array() > rank_threshold(eig)).count();
      Sample out;
      out.residual = off;
      out.violated = off > tol::sharp || image_rank != k;
      if (out.violated) out.witness.inputs = {{"P", p.matrix()}};
      return out;
    });
    fold(s, samples, "projection_rank");
    if (push(std::move(s))) return finish_refuted(2);
  }
  // (d) phi(lambda I) = lambda I and phi(lambda P) = lambda phi(P)
  {
    StageResult s;
    s.name = kStageNames[3];
    const std::array<double, 5> lambdas = {0.0, 0.25, 0.5, 0.75, 1.0};
    double scalar_residual = 0.0;
    for (const double lambda : lambdas) {
      const Effect scalar = Effect::scalar(dim, lambda);
      const double r = (phi(scalar).matrix() - scalar.matrix()).norm();
      scalar_residual = std::max(scalar_residual, r);
      if (r > config.stage_tol && s.witnesses.empty()) {
        s.verdict = StageVerdict::Fail;
        s.witnesses.push_back(Witness{"scalar_fixing", 0, r, {{"E", scalar.matrix()}}});
      }
    }
    s.residual = scalar_residual;
    auto samples = sample_stage(trials, ex, rng.fork(4), [&](std::size_t, RandomSource& local) {
      const Ray r = probable_ray(dim, d, config.min_probability, local);
      const Matrix p = r.projection();
      const Matrix img = phi(Effect::trusted(p)).matrix();
      Sample out;
      for (const double lambda : lambdas) {
        const double res = (phi(Effect::trusted(lambda * p)).matrix() - lambda * img).norm();
        out.residual = std::max(out.residual, res);
      }
      out.violated = out.residual > config.stage_tol;
      if (out.violated) out.witness.inputs = {{"P", p}};
      return out;
    });
    fold(s, samples, "homogeneity");
    s.data = Json{{"scalar_residual", scalar_residual}, {"lambdas", lambdas}};
    if (push(std::move(s))) return finish_refuted(3);
  }
  // (e) rank-one orthogonality through the two-eigenvalue probe lambda P + mu P^perp
  {
    StageResult s;
    s.name = kStageNames[4];
    const double lambda = config.weak_lambda;
    const double mu = config.weak_mu;
    const Matrix id = identity(dim);
    auto samples = sample_stage(trials, ex, rng.fork(5), [&](std::size_t, RandomSource& local) {
      const Ray p = probable_ray(dim, d, config.min_probability, local);
      const Ray q = orthogonal_ray(p, local);
      const Matrix pm = p.projection();
      const Effect e = Effect::trusted(lambda * pm + mu * (id - pm));
      const Matrix img_e = phi(e).matrix();
      const Ray p_img = dominant_ray(phi(Effect::trusted(pm)).matrix());
      const Ray q_img = dominant_ray(phi(Effect::trusted(q.projection())).matrix());
      const EigenDecomposition eig = eig_hermitian(img_e);
      const double bracket = std::max({0.0, lambda - eig.smallest(), eig.largest() - mu});
      const double strength_err = std::max(std::abs(strength(eig, p_img) - lambda), std::abs(strength(eig, q_img) - mu));
      const double overlap = p_img.overlap(q_img);
      Sample out;
      out.residual = std::max({bracket, strength_err, overlap});
      out.aux = overlap;
      out.violated = std::max(bracket, strength_err) > config.stage_tol || overlap > config.ortho_tol;
      if (out.violated) out.witness.inputs = {{"P", pm}, {"Q", q.projection()}, {"E", e.matrix()}};
      return out;
    });
    double max_overlap = 0.0;
    for (const auto& x : samples) max_overlap = std::max(max_overlap, x.aux);
    fold(s, samples, "rank_one_orthogonality");
    s.residual = std::max(s.residual, max_overlap);
    s.data = Json{{"lambda", lambda}, {"mu", mu}, {"max_image_overlap", max_overlap}};
    if (push(std::move(s))) return finish_refuted(4);
  }
  // (f) reconstruction, preceded in dim 2 by the additivity and orthocomplement checks
  Implementer implementer;
  {
    StageResult s;
    s.name = kStageNames[5];
    if (dim == 2) {
      CheckOptions opts;
      opts.execution = ex;
      const MapReport ortho = check_ortho_compatibility(spec, dim, trials, rng.fork(6), opts);
      auto additivity = sample_stage(trials, ex, rng.fork(7), [&](std::size_t, RandomSource& local) {
        const Ray p = random_ray(dim, local);
        const Ray q = orthogonal_ray(p, local);
        const double a = local.uniform();
        const double b = local.uniform();
        const Matrix pm = p.projection();
        const Matrix qm = q.projection();
        const Matrix lhs = phi(Effect::trusted(a * pm + b * qm)).matrix();
        const Matrix rhs = a * phi(Effect::trusted(pm)).matrix() + b * phi(Effect::trusted(qm)).matrix();
        Sample out;
        out.residual = (lhs - rhs).norm();
        out.violated = out.residual > config.stage_tol;
        if (out.violated) out.witness.inputs = {{"P", pm}, {"Q", qm}};
        return out;
      });
      fold(s, additivity, "dim2_additivity");
      if (!ortho.passed()) {
        s.verdict = StageVerdict::Fail;
        for (const auto& w : ortho.witnesses) s.witnesses.push_back(w);
      }
      s.residual = std::max(s.residual, ortho.max_residual);
      s.data["dim2_branch"] = Json{{"ortho_residual", ortho.max_residual}, {"ortho_passed", ortho.passed()}};
      if (s.verdict == StageVerdict::Fail) {
        s.message = "dimension-2 branch failed";
        push(std::move(s));
        return finish_refuted(5);
      }
    }
    try {
      const ReconstructionResult rec = reconstruct_wigner(rank_one_oracle(phi_fn, dim), {config.ortho_tol});
      implementer = rec.implementer();
      s.data["kind"] = to_string(rec.kind);
      s.data["max_residual"] = rec.max_residual;
      s.residual = std::max(s.residual, rec.max_residual);
    } catch (const Error& err) {
      s.verdict = StageVerdict::Fail;
      s.message = err.what();
    }
    if (push(std::move(s))) return finish_refuted(5);
  }
  // (g) phi(E) = U E U* on random effects
  {
    StageResult s;
    s.name = kStageNames[6];
    auto samples = sample_stage(trials, ex, rng.fork(8), [&](std::size_t, RandomSource& local) {
      const Effect e = random_effect(dim, local);
      Sample out;
      out.residual = (phi(e).matrix() - implementer.congruence(e.matrix())).norm();
      out.violated = out.residual > config.stage_tol;
      if (out.violated) out.witness.inputs = {{"E", e.matrix()}};
      return out;
    });
    fold(s, samples, "global_congruence");
    if (push(std::move(s))) return finish_refuted(6);
  }

  report.final.verdict = FinalVerdict::CertifiedAutomorphism;
  report.final.kind = implementer.kind;
  report.final.unitary = implementer.unitary;
  return report;
}

}  // namespace qeffect
