#include "qeffect/sharp.hpp"

#include <algorithm>
#include <cmath>

namespace qeffect {

SemilinearOperator::SemilinearOperator(Matrix a, bool conjugating) : a_(std::move(a)), conjugating_(conjugating) {
  require_square(a_, "semilinear operator");
  const RealVector sv = Eigen::JacobiSVD<Matrix>(a_).singularValues();
  if (!(sv(sv.size() - 1) > 1e-9 * sv(0))) {
    throw Error(ErrorKind::Singular, "semilinear operator condition exceeds 1e9");
  }
}

Matrix SemilinearOperator::gram() const {
  const Matrix g = hermitian_part(a_.adjoint() * a_);
  return conjugating_ ? Matrix(g.conjugate()) : g;
}

SemilinearOperator random_semilinear(Eigen::Index n, RandomSource& rng) {
  Matrix a = random_invertible(n, rng);
  const bool flag = rng.bernoulli();
  return SemilinearOperator(std::move(a), flag);
}

SubspaceProjection SubspaceProjection::from_matrix(const Matrix& p) {
  require_square(p, "projection");
  if (!is_hermitian(p)) throw Error(ErrorKind::NotHermitian, "projection is not Hermitian");
  const Matrix h = hermitian_part(p);
  const double idem = (h * h - h).norm();
  if (idem > 1e-9) throw Error(ErrorKind::InvalidInput, "projection is not idempotent, ||P^2 - P|| = " + std::to_string(idem));
  const EigenDecomposition eig = eig_hermitian(h);
  return SubspaceProjection(h, (eig.eigenvalues.array() > 0.5).count());
}

SubspaceProjection SubspaceProjection::onto_span(const Matrix& columns) {
  const Matrix q = orthonormal_basis(columns);
  return SubspaceProjection(hermitian_part(q * q.adjoint()), q.cols());
}

Matrix SubspaceProjection::basis() const {
  if (rank_ == 0) return Matrix(dim(), 0);
  const EigenDecomposition eig = eig_hermitian(p_);
  return eig.eigenvectors.rightCols(rank_);
}

SubspaceProjection SubspaceProjection::complement() const {
  return SubspaceProjection(identity(dim()) - p_, dim() - rank_);
}

SubspaceProjection join(const SubspaceProjection& p, const SubspaceProjection& q) {
  require_same_dim(p.matrix(), q.matrix(), "join");
  const Matrix bp = p.basis();
  const Matrix bq = q.basis();
  Matrix cols(p.dim(), bp.cols() + bq.cols());
  cols << bp, bq;
  return SubspaceProjection::onto_span(cols);
}

SubspaceProjection meet(const SubspaceProjection& p, const SubspaceProjection& q) {
  require_same_dim(p.matrix(), q.matrix(), "meet");
  return join(p.complement(), q.complement()).complement();
}

bool proj_leq(const SubspaceProjection& p, const SubspaceProjection& q) {
  require_same_dim(p.matrix(), q.matrix(), "proj_leq");
  return (q.matrix() * p.matrix() - p.matrix()).norm() <= 1e-8;
}

SubspaceProjection induced_map(const SemilinearOperator& a, const SubspaceProjection& p) {
  if (a.dim() != p.dim()) throw Error(ErrorKind::DimensionMismatch, "induced_map: operator and projection dimensions");
  const Matrix basis = p.basis();
  Matrix images(p.dim(), basis.cols());
  for (Eigen::Index j = 0; j < basis.cols(); ++j) images.col(j) = a.apply(basis.col(j));
  return SubspaceProjection::onto_span(images);
}

namespace {

void require_states(const SemilinearOperator& a, const State& d, const State& d_prime) {
  if (a.dim() != d.dim() || a.dim() != d_prime.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "operator and states must share a dimension");
  }
}

double rayleigh(const Matrix& root, const Vector& x) { return (root * x).squaredNorm() / x.squaredNorm(); }

Matrix column(const Vector& v) { return Matrix(v); }

}  // namespace

double ratio_identity_residual(const SemilinearOperator& a, const State& d, const State& d_prime, const Vector& x) {
  require_states(a, d, d_prime);
  const Matrix root = matrix_function(d.matrix(), MatrixFunction::Sqrt);
  const Matrix root_prime = matrix_function(d_prime.matrix(), MatrixFunction::Sqrt);
  return std::abs(rayleigh(root_prime, a.apply(x)) - rayleigh(root, x));
}

double rank_one_trace_residual(const SemilinearOperator& a, const State& d, const State& d_prime, const Vector& x) {
  require_states(a, d, d_prime);
  const SubspaceProjection px = SubspaceProjection::onto_span(x);
  const SubspaceProjection img = induced_map(a, px);
  return std::abs(trace_pair(img.matrix(), d_prime.matrix()) - trace_pair(px.matrix(), d.matrix()));
}

double quadratic_identity_residual(const SemilinearOperator& a, const State& d, const State& d_prime, const Vector& x) {
  require_states(a, d, d_prime);
  const Vector ax = a.apply(x);
  const Complex lhs = ax.dot(d_prime.matrix() * ax) * x.squaredNorm();
  const Complex rhs = x.dot(d.matrix() * x) * ax.squaredNorm();
  return std::abs(lhs - rhs);
}

double orthogonal_pair_residual(const SemilinearOperator& a, const State& d, const Vector& x, const Vector& y) {
  // <u, v> = v^H u
  const Complex dxy = y.dot(d.matrix() * x);
  const Complex gxy = y.dot(a.gram() * x);
  return std::abs(dxy * gxy);
}

MapReport check_ratio_identity(const SemilinearOperator& a, const State& d, const State& d_prime,
                               std::size_t samples, const RandomSource& rng, const SharpCheckOptions& options) {
  require_states(a, d, d_prime);
  if (samples < 1) throw Error(ErrorKind::InvalidInput, "samples must be >= 1");
  MapReport report;
  report.name = "ratio_identity";
  report.trials = samples;
  report.seed = rng.seed();
  report.tolerance = options.tolerance;

  const Eigen::Index n = a.dim();
  const Matrix root_prime = matrix_function(d_prime.matrix(), MatrixFunction::Sqrt);
  // anchor y with sqrt(D') A y != 0
  RandomSource anchor_rng = rng.fork(~std::uint64_t{0});
  Vector y = random_unit_vector(n, anchor_rng);
  while ((root_prime * a.apply(y)).norm() <= 1e-6) y = random_unit_vector(n, anchor_rng);

  struct Outcome {
    TrialSample plain, structured;
    double gap = 0.0;
  };
  auto outcomes = run_trials(samples, options.execution, [&](std::size_t i) {
    RandomSource local = rng.fork(i);
    Outcome out;
    const Vector x = random_unit_vector(n, local);
    const Complex lambda = local.complex_normal();
    const Vector probe = x + lambda * y;

    const double r1 = ratio_identity_residual(a, d, d_prime, x);
    out.plain = {r1, r1 > options.tolerance, {}};
    if (out.plain.violated) out.plain.witness = Witness{"", i, r1, {{"x", column(x)}}};

    const double r2 = ratio_identity_residual(a, d, d_prime, probe);
    out.structured = {r2, r2 > options.tolerance, {}};
    if (out.structured.violated) out.structured.witness = Witness{"", i, r2, {{"x", column(probe)}}};

    out.gap = std::max(std::abs(r1 - rank_one_trace_residual(a, d, d_prime, x)),
                       std::abs(r2 - rank_one_trace_residual(a, d, d_prime, probe)));
    return out;
  });

  std::vector<TrialSample> plain, structured;
  double gap = 0.0;
  for (auto& o : outcomes) {
    plain.push_back(std::move(o.plain));
    structured.push_back(std::move(o.structured));
    gap = std::max(gap, o.gap);
  }
  absorb(report, "ratio_random", plain);
  absorb(report, "ratio_structured", structured);
  report.metrics.emplace_back("equivalence_gap", gap);
  return report;
}

MapReport check_polarized_identity(const SemilinearOperator& a, const State& d, const State& d_prime,
                                   std::size_t samples, const RandomSource& rng, const SharpCheckOptions& options) {
  require_states(a, d, d_prime);
  if (samples < 1) throw Error(ErrorKind::InvalidInput, "samples must be >= 1");
  MapReport report;
  report.name = "polarized_identity";
  report.trials = samples;
  report.seed = rng.seed();
  report.tolerance = options.tolerance;
  const Eigen::Index n = a.dim();

  struct Outcome {
    TrialSample quadratic, pair;
  };
  auto outcomes = run_trials(samples, options.execution, [&](std::size_t i) {
    RandomSource local = rng.fork(i);
    Outcome out;
    const Vector x = random_unit_vector(n, local);
    const double r1 = quadratic_identity_residual(a, d, d_prime, x);
    out.quadratic = {r1, r1 > options.tolerance, {}};
    if (out.quadratic.violated) out.quadratic.witness = Witness{"", i, r1, {{"x", column(x)}}};

    if (n >= 2) {
      Vector y = random_unit_vector(n, local);
      y -= x * x.dot(y);
      y.normalize();
      const double r2 = orthogonal_pair_residual(a, d, x, y);
      out.pair = {r2, r2 > options.tolerance, {}};
      if (out.pair.violated) out.pair.witness = Witness{"", i, r2, {{"x", column(x)}, {"y", column(y)}}};
    }
    return out;
  });
  std::vector<TrialSample> quadratic, pair;
  for (auto& o : outcomes) {
    quadratic.push_back(std::move(o.quadratic));
    pair.push_back(std::move(o.pair));
  }
  absorb(report, "quadratic", quadratic);
  absorb(report, "orthogonal_pair", pair);
  return report;
}

GramExtraction extract_unitary(const SemilinearOperator& a, double tol) {
  const EigenDecomposition eig = eig_hermitian(a.gram());
  const double lo = eig.smallest();
  const double hi = eig.largest();
  if (!(lo > 0.0)) throw Error(ErrorKind::Singular, "A*A is singular");
  const double spread = (hi - lo) / hi;
  if (spread <= tol) {
    const double mu = eig.eigenvalues.mean();
    SemilinearOperator u(a.matrix() / std::sqrt(mu), a.conjugating());
    const double defect = (u.matrix().adjoint() * u.matrix() - identity(a.dim())).norm();
    if (defect > 10.0 * std::max(tol, 1e-12) * std::sqrt(static_cast<double>(a.dim()))) {
      throw Error(ErrorKind::NumericalBreakdown, "rescaled operator is not unitary, defect " + std::to_string(defect));
    }
    return ScalarGram{mu, spread, std::move(u)};
  }
  const Eigen::Index last = eig.eigenvalues.size() - 1;
  const double h = 1.0 / std::sqrt(2.0);
  NonScalarGram ns;
  ns.spread = spread;
  ns.x = h * (eig.eigenvectors.col(0) + eig.eigenvectors.col(last));
  ns.y = h * (eig.eigenvectors.col(0) - eig.eigenvectors.col(last));
  ns.coupling = std::abs(ns.y.dot(a.gram() * ns.x));
  return ns;
}

Json Theorem2Config::to_json() const {
  return Json{{"trials", trials},
              {"trace_tol", trace_tol},
              {"identity_tol", identity_tol},
              {"scalar_state_tol", scalar_state_tol},
              {"gram_tol", gram_tol},
              {"verify_tol", verify_tol},
              {"remark_samples", remark_samples}};
}

SemilinearOperator documented_nonunitary(Eigen::Index n) {
  RealVector diag(n);
  for (Eigen::Index i = 0; i < n; ++i) diag(i) = static_cast<double>(i + 1);
  return SemilinearOperator(Matrix(diag.cast<Complex>().asDiagonal()), false);
}

namespace {

struct Sample {
  double residual = 0.0;
  bool violated = false;
  Witness witness;
};

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
    stage.witnesses.push_back(std::move(w));
  }
}

// Trace condition on random projections of ranks 1..n-1.
std::vector<Sample> trace_samples(const SemilinearOperator& a, const State& d, const State& d_prime,
                                  std::size_t count, const RandomSource& rng, double tol, Execution ex) {
  const Eigen::Index n = a.dim();
  return run_trials(count, ex, [&](std::size_t i) {
    RandomSource local = rng.fork(i);
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(i % static_cast<std::size_t>(std::max<Eigen::Index>(1, n - 1)));
    const SubspaceProjection p = SubspaceProjection::from_matrix(random_projection_matrix(n, std::min(k, n), local));
    const SubspaceProjection img = induced_map(a, p);
    Sample s;
    s.residual = std::abs(trace_pair(img.matrix(), d_prime.matrix()) - trace_pair(p.matrix(), d.matrix()));
    s.violated = s.residual > tol;
    if (s.violated) s.witness = Witness{"", i, s.residual, {{"P", p.matrix()}}};
    return s;
  });
}

}  // namespace

ClassificationReport theorem2_harness(const SemilinearOperator& a, const State& d, const State& d_prime,
                                      const RandomSource& rng, const Theorem2Config& config) {
  require_states(a, d, d_prime);
  if (config.trials < 1) throw Error(ErrorKind::InvalidInput, "trials must be >= 1");
  const Eigen::Index n = a.dim();
  const Execution ex = config.execution;

  ClassificationReport report;
  report.pipeline = "theorem2";
  report.seed = rng.seed();
  report.dim = n;
  report.config = config.to_json();

  const EigenDecomposition d_eig = eig_hermitian(d.matrix());
  const double d_spread = d_eig.largest() - d_eig.smallest();
  const bool scalar_state = d_spread <= config.scalar_state_tol;
  {
    StageResult s;
    s.name = "1_state_scalarity";
    s.verdict = StageVerdict::Info;
    s.residual = d_spread;
    s.data = Json{{"eigenvalue_spread", d_spread}, {"scalar", scalar_state}};
    report.stages.push_back(std::move(s));
  }

  if (scalar_state) {
    // tr(phi(P) D') must equal tr(P D) = k/n for every rank-k P, which pins D' = D.
    StageResult forced;
    forced.name = "remark_forced_state";
    auto samples = run_trials(config.trials, ex, [&](std::size_t i) {
      RandomSource local = rng.fork(100 + i);
      const Eigen::Index k = n >= 2 ? 1 + static_cast<Eigen::Index>(i % static_cast<std::size_t>(n - 1)) : 1;
      const SubspaceProjection p = SubspaceProjection::from_matrix(random_projection_matrix(n, k, local));
      const SubspaceProjection img = induced_map(a, p);
      Sample s;
      s.residual = std::abs(trace_pair(img.matrix(), d_prime.matrix()) - static_cast<double>(k) / static_cast<double>(n));
      s.violated = s.residual > config.trace_tol;
      if (s.violated) s.witness = Witness{"", i, s.residual, {{"P", p.matrix()}}};
      return s;
    });
    fold(forced, samples, "forced_state");
    forced.data = Json{{"state_gap", (d_prime.matrix() - d.matrix()).norm()}};
    if (forced.verdict == StageVerdict::Fail) forced.message = "trace condition fails, so D' differs from D = I/n";
    report.stages.push_back(std::move(forced));

    StageResult witness;
    witness.name = "remark_nonunitary_operator";
    const SemilinearOperator aw = documented_nonunitary(n);
    const State mixed = State::maximally_mixed(n);
    fold(witness, trace_samples(aw, mixed, mixed, config.remark_samples, rng.fork(200), config.trace_tol, ex),
         "nonunitary_trace");
    const GramExtraction g = extract_unitary(aw, config.gram_tol);
    double broken_overlap = 0.0;
    if (const auto* ns = std::get_if<NonScalarGram>(&g)) {
      // orthogonal x, y whose images are not orthogonal: no unitary congruence agrees
      const Vector ax = aw.apply(ns->x);
      const Vector ay = aw.apply(ns->y);
      broken_overlap = std::abs(ay.dot(ax)) / (ax.norm() * ay.norm());
      witness.witnesses.push_back(Witness{"orthogonality_broken", 0, broken_overlap,
                                          {{"A", aw.matrix()}, {"x", Matrix(ns->x)}, {"y", Matrix(ns->y)}}});
    }
    if (broken_overlap <= 1e-3) witness.verdict = StageVerdict::Fail;
    witness.data = Json{{"operator", "diag(1..n)"}, {"image_overlap_of_orthogonal_pair", broken_overlap}};
    report.stages.push_back(std::move(witness));

    report.final.verdict = FinalVerdict::HypothesisDegenerate;
    report.final.stage = "1_state_scalarity";
    return report;
  }

  if (n < 3) throw Error(ErrorKind::DimensionTooSmall, "the projection-lattice characterization needs dim >= 3");

  auto refuted = [&](std::size_t next) {
    static const char* names[] = {"1_state_scalarity", "2_trace_condition", "3_identities", "4_gram_scalar",
                                  "5_induced_congruence"};
    report.final.verdict = FinalVerdict::Refuted;
    report.final.stage = report.stages.back().name;
    for (std::size_t k = next; k < 5; ++k) {
      StageResult s;
      s.name = names[k];
      s.verdict = StageVerdict::Skipped;
      report.stages.push_back(std::move(s));
    }
    return report;
  };

  {
    StageResult s;
    s.name = "2_trace_condition";
    fold(s, trace_samples(a, d, d_prime, config.trials, rng.fork(2), config.trace_tol, ex), "trace");
    report.stages.push_back(std::move(s));
    if (report.stages.back().verdict == StageVerdict::Fail) return refuted(2);
  }
  {
    StageResult s;
    s.name = "3_identities";
    SharpCheckOptions opts{config.identity_tol, ex};
    const MapReport ratio = check_ratio_identity(a, d, d_prime, config.trials, rng.fork(3), opts);
    const MapReport polar = check_polarized_identity(a, d, d_prime, config.trials, rng.fork(4), opts);
    s.verdict = ratio.passed() && polar.passed() ? StageVerdict::Pass : StageVerdict::Fail;
    s.residual = std::max(ratio.max_residual, polar.max_residual);
    for (const auto* r : {&ratio, &polar})
      for (const auto& w : r->witnesses) s.witnesses.push_back(w);
    s.data = Json{{"ratio_residual", ratio.max_residual},
                  {"polarized_residual", polar.max_residual},
                  {"equivalence_gap", ratio.metrics.front().second}};
    report.stages.push_back(std::move(s));
    if (report.stages.back().verdict == StageVerdict::Fail) return refuted(3);
  }
  Implementer implementer;
  {
    StageResult s;
    s.name = "4_gram_scalar";
    const GramExtraction g = extract_unitary(a, config.gram_tol);
    if (const auto* sc = std::get_if<ScalarGram>(&g)) {
      s.residual = sc->spread;
      s.data = Json{{"mu", sc->mu}, {"spread", sc->spread}};
      implementer = Implementer{a.kind(), sc->unitary.matrix()};
    } else {
      const auto& ns = std::get<NonScalarGram>(g);
      s.verdict = StageVerdict::Fail;
      s.residual = ns.spread;
      s.message = "trace condition held on samples but A*A is not scalar";
      s.data = Json{{"spread", ns.spread}, {"coupling", ns.coupling}};
      s.witnesses.push_back(Witness{"gram_not_scalar", 0, ns.coupling, {{"x", Matrix(ns.x)}, {"y", Matrix(ns.y)}}});
      report.anomaly = true;
    }
    report.stages.push_back(std::move(s));
    if (report.stages.back().verdict == StageVerdict::Fail) return refuted(4);
  }
  {
    StageResult s;
    s.name = "5_induced_congruence";
    auto samples = run_trials(config.trials, ex, [&](std::size_t i) {
      RandomSource local = rng.fork(500 + i);
      const Eigen::Index k = 1 + static_cast<Eigen::Index>(i % static_cast<std::size_t>(n - 1));
      const SubspaceProjection p = SubspaceProjection::from_matrix(random_projection_matrix(n, k, local));
      Sample out;
      out.residual = (induced_map(a, p).matrix() - implementer.congruence(p.matrix())).norm();
      out.violated = out.residual > config.verify_tol;
      if (out.violated) out.witness = Witness{"", i, out.residual, {{"P", p.matrix()}}};
      return out;
    });
    fold(s, samples, "induced_congruence");
    report.stages.push_back(std::move(s));
    if (report.stages.back().verdict == StageVerdict::Fail) return refuted(5);
  }

  report.final.verdict = FinalVerdict::CertifiedAutomorphism;
  report.final.kind = implementer.kind;
  report.final.unitary = implementer.unitary;
  return report;
}

ProjectionMapOracle remark_dim2_twist(const State& d, double kappa) {
  if (d.dim() != 2) throw Error(ErrorKind::BadDimension, "the twist map lives in dimension 2");
  const EigenDecomposition eig = eig_hermitian(d.matrix());
  if (std::abs(eig.largest() - eig.smallest()) <= 1e-9) {
    throw Error(ErrorKind::DegenerateState, "state has equal eigenvalues");
  }
  const Matrix v = eig.eigenvectors;
  return {2, [v, kappa](const Ray& r) {
            if (r.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "twist oracle expects dimension 2");
            const Vector c = v.adjoint() * r.vector();
            const double a0 = std::abs(c(0));
            const double a1 = std::abs(c(1));
            if (a0 == 0.0 || a1 == 0.0) return r;  // poles carry no azimuth
            const double cos_polar = a0 * a0 - a1 * a1;
            const double azimuth = std::arg(c(1)) - std::arg(c(0)) + kappa * cos_polar;
            Vector out(2);
            out(0) = a0;
            out(1) = std::polar(a1, azimuth);
            return Ray(v * out);
          }};
}

}  // namespace qeffect
