#include "qeffect/cli.hpp"

#include "qeffect/json_io.hpp"
#include "qeffect/order_maps.hpp"
#include "qeffect/reconstruction.hpp"
#include "qeffect/sharp.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>

namespace qeffect::cli {

namespace {

struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::size_t trials = 100;
  std::optional<double> tol;
  std::string out;
  bool parallel = false;

  Execution execution() const { return parallel ? Execution::Parallel : Execution::Serial; }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "PRNG seed (default 20021027)");
  cmd->add_option("--trials", c.trials, "samples per check")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", c.tol, "override the pass/fail tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "write the report to a file instead of stdout");
  cmd->add_flag("--parallel", c.parallel, "run trials with OpenMP");
}

Json header(const char* command, const Common& c) {
  return Json{{"tool", kToolName}, {"version", kToolVersion}, {"command", command}, {"seed", c.seed},
              {"trials", c.trials}};
}

void emit(const Json& j, const Common& c, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidInput, c.out + ": cannot write file");
  f << text;
}

bool is_auto(const std::string& s, std::string& kind) {
  const std::string suffix = ":auto";
  if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    kind = s.substr(0, s.size() - suffix.size());
    return true;
  }
  return false;
}

EffectMapSpec load_map(const std::string& arg, Eigen::Index dim, RandomSource rng) {
  std::string kind;
  if (!is_auto(arg, kind)) return io::spec_from_json(io::parse_file(arg), "map");
  if (dim < 1) throw Error(ErrorKind::InvalidInput, "--dim is required with " + arg);
  if (kind == "unitary") return EffectMapSpec::unitary(haar_unitary(dim, rng));
  if (kind == "antiunitary") return EffectMapSpec::antiunitary(haar_unitary(dim, rng));
  if (kind == "mk") return EffectMapSpec::mk(random_mk_parameter(dim, rng));
  throw Error(ErrorKind::InvalidInput, "--map: unknown generator \"" + kind + "\"");
}

struct StatePair {
  State d;
  State d_prime;
};

StatePair load_states(const std::string& states, const std::string& d_file, const std::string& dp_file,
                      const EffectMapSpec* spec, Eigen::Index dim, RandomSource rng) {
  if (!d_file.empty() || !dp_file.empty()) {
    if (d_file.empty() || dp_file.empty()) throw Error(ErrorKind::InvalidInput, "--state and --state-prime go together");
    return {io::state_from_json(io::parse_file(d_file), "state"),
            io::state_from_json(io::parse_file(dp_file), "state_prime")};
  }
  if (states != "auto") throw Error(ErrorKind::InvalidInput, "--states must be \"auto\" or use --state/--state-prime");
  State d = random_state(dim, rng);
  if (spec != nullptr) {
    if (auto matched = suggest_matching_state(*spec, d)) return {d, *matched};
  }
  State dp = random_state(dim, rng);
  return {d, dp};
}

Json matrices_json(const StatePair& s) {
  return Json{{"D", io::matrix_to_json(s.d.matrix(), "state")},
              {"D_prime", io::matrix_to_json(s.d_prime.matrix(), "state")}};
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  Common common;
  std::string kind = "effect";
  Eigen::Index dim = 2;
  Eigen::Index rank = 1;
};

int run_gen(const GenArgs& a, std::ostream& out) {
  RandomSource rng(a.common.seed);
  Json j;
  if (a.kind == "unitary") {
    j = io::matrix_to_json(haar_unitary(a.dim, rng), "unitary");
  } else if (a.kind == "effect") {
    j = io::matrix_to_json(random_effect(a.dim, rng).matrix(), "effect");
  } else if (a.kind == "state") {
    j = io::matrix_to_json(random_state(a.dim, rng).matrix(), "state");
  } else if (a.kind == "projection") {
    j = io::matrix_to_json(random_projection(a.dim, a.rank, rng).matrix(), "projection");
  } else if (a.kind == "ray") {
    j = io::ray_to_json(random_ray(a.dim, rng));
  } else if (a.kind == "semilinear") {
    j = io::semilinear_to_json(random_semilinear(a.dim, rng));
  } else if (a.kind == "mk-parameter") {
    j = io::matrix_to_json(random_mk_parameter(a.dim, rng), "effect");
  } else {
    throw Error(ErrorKind::InvalidInput, "--kind: unknown kind \"" + a.kind + "\"");
  }
  Json prov{{"tool", kToolName}, {"version", kToolVersion}, {"seed", a.common.seed}};
  j["provenance"] = std::move(prov);
  emit(j, a.common, out);
  return kPass;
}

// ---- check-map -------------------------------------------------------------

struct CheckMapArgs {
  Common common;
  std::string map;
  Eigen::Index dim = 0;
  std::string checks = "order,ortho,trace";
  std::string states = "auto";
  std::string state_file, state_prime_file;
};

int run_check_map(const CheckMapArgs& a, std::ostream& out) {
  const RandomSource root(a.common.seed);
  const EffectMapSpec spec = load_map(a.map, a.dim, root.fork(1000));
  const Eigen::Index dim = spec.dim();
  if (a.dim > 0 && a.dim != dim) throw Error(ErrorKind::DimensionMismatch, "--dim disagrees with the map dimension");

  CheckOptions opts;
  opts.execution = a.common.execution();
  if (a.common.tol) opts.tolerance = *a.common.tol;
  CheckOptions trace_opts{a.common.tol.value_or(1e-10)};
  trace_opts.execution = opts.execution;

  Json j = header("check-map", a.common);
  j["tolerances"] = Json{{"order", opts.tolerance}, {"ortho", opts.tolerance}, {"trace", trace_opts.tolerance}};
  j["map"] = io::spec_to_json(spec);
  Json reports = Json::array();
  bool ok = true;
  auto want = [&](const char* name) { return a.checks.find(name) != std::string::npos; };

  if (want("order")) {
    const MapReport r = check_order_preservation(spec, dim, a.common.trials, root.fork(1), opts);
    ok = ok && r.passed();
    reports.push_back(io::report_to_json(r));
  }
  if (want("ortho")) {
    const MapReport r = check_ortho_compatibility(spec, dim, a.common.trials, root.fork(2), opts);
    ok = ok && r.passed();
    reports.push_back(io::report_to_json(r));
  }
  if (want("trace")) {
    const StatePair s = load_states(a.states, a.state_file, a.state_prime_file, &spec, dim, root.fork(1001));
    const MapReport r = check_trace_condition(spec, s.d, s.d_prime, a.common.trials, root.fork(3), trace_opts);
    ok = ok && r.passed();
    j["states"] = matrices_json(s);
    reports.push_back(io::report_to_json(r));
  }
  j["reports"] = std::move(reports);
  j["verdict"] = ok ? "pass" : "fail";
  emit(j, a.common, out);
  return ok ? kPass : kFail;
}

// ---- classify ----------------------------------------------------------------

struct ClassifyArgs {
  Common common;
  std::string map = "unitary:auto";
  Eigen::Index dim = 0;
  std::string states = "auto";
  std::string state_file, state_prime_file;
};

int run_classify(const ClassifyArgs& a, std::ostream& out) {
  const RandomSource root(a.common.seed);
  const EffectMapSpec spec = load_map(a.map, a.dim, root.fork(1000));
  const Eigen::Index dim = spec.dim();
  if (a.dim > 0 && a.dim != dim) throw Error(ErrorKind::DimensionMismatch, "--dim disagrees with the map dimension");
  const StatePair s = load_states(a.states, a.state_file, a.state_prime_file, &spec, dim, root.fork(1001));

  Theorem1Config cfg;
  cfg.trials = a.common.trials;
  cfg.execution = a.common.execution();
  if (a.common.tol) cfg.stage_tol = *a.common.tol;
  const ClassificationReport report = classify_theorem1(spec, s.d, s.d_prime, dim, root, cfg);

  Json j = header("classify", a.common);
  j["tolerances"] = report.config;
  j["map"] = io::spec_to_json(spec);
  j["states"] = matrices_json(s);
  j["report"] = io::report_to_json(report);
  emit(j, a.common, out);
  return report.certified() ? kPass : kFail;
}

// ---- theorem2 ----------------------------------------------------------------

struct Theorem2Args {
  Common common;
  std::string op = "unitary:auto";
  Eigen::Index dim = 0;
  double scale = 1.0;
  std::string states = "auto";
  std::string state_file, state_prime_file;
};

int run_theorem2(const Theorem2Args& a, std::ostream& out) {
  const RandomSource root(a.common.seed);
  RandomSource op_rng = root.fork(1000);
  std::string kind;
  std::optional<SemilinearOperator> op;
  std::optional<Implementer> transport;
  if (is_auto(a.op, kind)) {
    if (a.dim < 1) throw Error(ErrorKind::InvalidInput, "--dim is required with " + a.op);
    if (kind == "unitary" || kind == "antiunitary") {
      const Matrix u = haar_unitary(a.dim, op_rng);
      const bool conj = kind == "antiunitary";
      op.emplace(a.scale * u, conj);
      transport = Implementer{conj ? Linearity::Antilinear : Linearity::Linear, u};
    } else if (kind == "random") {
      op.emplace(random_semilinear(a.dim, op_rng));
    } else {
      throw Error(ErrorKind::InvalidInput, "--operator: unknown generator \"" + kind + "\"");
    }
  } else {
    op.emplace(io::semilinear_from_json(io::parse_file(a.op), "operator"));
  }
  const Eigen::Index dim = op->dim();

  std::optional<StatePair> s;
  if (!a.state_file.empty() || !a.state_prime_file.empty()) {
    s = load_states("", a.state_file, a.state_prime_file, nullptr, dim, root.fork(1001));
  } else if (a.states == "scalar") {
    s = StatePair{State::maximally_mixed(dim), State::maximally_mixed(dim)};
  } else if (a.states == "auto") {
    RandomSource srng = root.fork(1001);
    State d = random_state(dim, srng);
    if (transport) {
      s = StatePair{d, State::from_matrix(transport->congruence(d.matrix()) / transport->congruence(d.matrix()).trace().real())};
    } else {
      s = StatePair{d, random_state(dim, srng)};
    }
  } else {
    throw Error(ErrorKind::InvalidInput, "--states must be auto, scalar, or use --state/--state-prime");
  }

  Theorem2Config cfg;
  cfg.trials = a.common.trials;
  cfg.execution = a.common.execution();
  if (a.common.tol) {
    cfg.trace_tol = *a.common.tol;
    cfg.identity_tol = *a.common.tol;
  }
  const ClassificationReport report = theorem2_harness(*op, s->d, s->d_prime, root, cfg);

  Json j = header("theorem2", a.common);
  j["tolerances"] = report.config;
  j["operator"] = io::semilinear_to_json(*op);
  j["states"] = matrices_json(*s);
  j["report"] = io::report_to_json(report);
  emit(j, a.common, out);
  return report.certified() ? kPass : kFail;
}

// ---- strength ------------------------------------------------------------------

struct StrengthArgs {
  Common common;
  std::string effect, ray;
  bool json = false;
};

int run_strength(const StrengthArgs& a, std::ostream& out) {
  const Effect e = io::effect_from_json(io::parse_file(a.effect), "effect");
  const Ray r = io::ray_from_json(io::parse_file(a.ray), "ray");
  if (e.dim() != r.dim()) throw Error(ErrorKind::DimensionMismatch, "effect and ray dimensions differ");
  const double s = strength(e, r);
  if (!a.json) {
    // shortest round-trip decimal form
    const std::string text = Json(s).dump() + "\n";
    if (a.common.out.empty()) {
      out << text;
    } else {
      std::ofstream f(a.common.out, std::ios::binary);
      f << text;
    }
    return kPass;
  }
  Json j{{"tool", kToolName}, {"version", kToolVersion}, {"command", "strength"}, {"strength", s}};
  emit(j, a.common, out);
  return kPass;
}

// ---- demos -------------------------------------------------------------------

struct DemoArgs {
  Common common;
  Eigen::Index dim = 2;
  double kappa = 1.0;
};

int run_demo_mk(const DemoArgs& a, std::ostream& out) {
  const RandomSource root(a.common.seed);
  RandomSource t_rng = root.fork(1000);
  const EffectMapSpec spec = EffectMapSpec::mk(random_mk_parameter(a.dim, t_rng));
  CheckOptions opts;
  opts.execution = a.common.execution();
  if (a.common.tol) opts.tolerance = *a.common.tol;
  const MapReport order = check_order_preservation(spec, a.dim, a.common.trials, root.fork(1), opts);
  const MapReport ortho = check_ortho_compatibility(spec, a.dim, a.common.trials, root.fork(2), opts);
  const bool observed = order.passed() && !ortho.passed();

  Json j = header("demo mk-counterexample", a.common);
  j["tolerances"] = Json{{"order", opts.tolerance}, {"ortho", opts.tolerance}};
  j["map"] = io::spec_to_json(spec);
  j["order"] = io::report_to_json(order);
  j["ortho"] = io::report_to_json(ortho);
  j["expected"] = "order=pass, ortho=fail";
  j["observed"] = observed;
  emit(j, a.common, out);
  return observed ? kPass : kFail;
}

int run_demo_scalar(const DemoArgs& a, std::ostream& out) {
  const RandomSource root(a.common.seed);
  RandomSource op_rng = root.fork(1000);
  const SemilinearOperator op = random_semilinear(a.dim, op_rng);
  const State mixed = State::maximally_mixed(a.dim);
  Theorem2Config cfg;
  cfg.trials = a.common.trials;
  cfg.execution = a.common.execution();
  if (a.common.tol) cfg.trace_tol = *a.common.tol;
  const ClassificationReport report = theorem2_harness(op, mixed, mixed, root, cfg);
  const auto* forced = report.stage("remark_forced_state");
  const auto* witness = report.stage("remark_nonunitary_operator");
  const bool observed = report.final.verdict == FinalVerdict::HypothesisDegenerate && forced != nullptr &&
                        forced->verdict == StageVerdict::Pass && witness != nullptr &&
                        witness->verdict == StageVerdict::Pass;
  Json j = header("demo scalar-state", a.common);
  j["tolerances"] = report.config;
  j["operator"] = io::semilinear_to_json(op);
  j["report"] = io::report_to_json(report);
  j["expected"] = "hypothesis_degenerate; trace condition holds for a non-unitary operator";
  j["observed"] = observed;
  emit(j, a.common, out);
  return observed ? kPass : kFail;
}

int run_demo_twist(const DemoArgs& a, std::ostream& out) {
  const double tol = a.common.tol.value_or(1e-10);
  const Matrix dm = (Matrix(2, 2) << 0.75, 0.0, 0.0, 0.25).finished();
  const State d = State::from_matrix(dm);
  const ProjectionMapOracle twist = remark_dim2_twist(d, a.kappa);

  const RandomSource root(a.common.seed);
  double worst_trace = 0.0;
  for (std::size_t i = 0; i < a.common.trials; ++i) {
    RandomSource local = root.fork(i);
    const Ray r = random_ray(2, local);
    worst_trace = std::max(worst_trace, std::abs(trace_pair(twist(r).projection(), dm) - trace_pair(r.projection(), dm)));
  }
  // orthogonal pair at polar angle pi/4 and its antipode (eigenbasis of D is the standard basis)
  const double half = std::numbers::pi / 8.0;
  const Ray p(Vector((Vector(2) << std::cos(half), std::sin(half)).finished()));
  const Ray q(Vector((Vector(2) << std::sin(half), -std::cos(half)).finished()));
  const double overlap = twist(p).overlap(twist(q));

  std::string reconstruction = "succeeded";
  try {
    reconstruct_wigner(twist);
  } catch (const Error& e) {
    reconstruction = to_string(e.kind());
  }
  const bool observed = worst_trace <= tol && (a.kappa == 0.0 ? overlap <= 1e-10 : overlap > 0.1);

  Json j = header("demo dim2-twist", a.common);
  j["tolerances"] = Json{{"trace", tol}, {"overlap_threshold", 0.1}};
  j["kappa"] = a.kappa;
  j["state"] = io::matrix_to_json(dm, "state");
  j["trace_condition_max_residual"] = worst_trace;
  j["orthogonal_pair"] = Json{{"p", io::ray_to_json(p)}, {"q", io::ray_to_json(q)}};
  j["image_overlap"] = overlap;
  j["reconstruction"] = reconstruction;
  j["expected"] = "trace condition holds, orthogonality broken";
  j["observed"] = observed;
  emit(j, a.common, out);
  return observed ? kPass : kFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effect-algebra automorphism toolkit", "qeffect"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "emit a random instance as JSON");
  add_common(gen_cmd, gen.common);
  gen_cmd->add_option("--kind", gen.kind, "unitary|effect|state|projection|ray|semilinear|mk-parameter")->required();
  gen_cmd->add_option("--dim", gen.dim, "Hilbert space dimension")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--rank", gen.rank, "projection rank")->check(CLI::NonNegativeNumber);

  CheckMapArgs cm;
  auto* cm_cmd = app.add_subcommand("check-map", "order / orthocomplement / trace checks on a map");
  add_common(cm_cmd, cm.common);
  cm_cmd->add_option("--map", cm.map, "map JSON file, or unitary:auto|antiunitary:auto|mk:auto")->required();
  cm_cmd->add_option("--dim", cm.dim, "dimension for generated maps")->check(CLI::PositiveNumber);
  cm_cmd->add_option("--checks", cm.checks, "comma list of order,ortho,trace");
  cm_cmd->add_option("--states", cm.states, "auto");
  cm_cmd->add_option("--state", cm.state_file, "state D JSON file");
  cm_cmd->add_option("--state-prime", cm.state_prime_file, "state D' JSON file");

  ClassifyArgs cl;
  auto* cl_cmd = app.add_subcommand("classify", "staged order/trace characterization pipeline");
  add_common(cl_cmd, cl.common);
  cl_cmd->add_option("--map", cl.map, "map JSON file, or unitary:auto|antiunitary:auto|mk:auto");
  cl_cmd->add_option("--dim", cl.dim, "dimension for generated maps")->check(CLI::PositiveNumber);
  cl_cmd->add_option("--states", cl.states, "auto");
  cl_cmd->add_option("--state", cl.state_file, "state D JSON file");
  cl_cmd->add_option("--state-prime", cl.state_prime_file, "state D' JSON file");

  Theorem2Args t2;
  auto* t2_cmd = app.add_subcommand("theorem2", "projection-lattice harness for a semilinear operator");
  add_common(t2_cmd, t2.common);
  t2_cmd->add_option("--operator", t2.op, "operator JSON file, or unitary:auto|antiunitary:auto|random:auto");
  t2_cmd->add_option("--dim", t2.dim, "dimension for generated operators")->check(CLI::PositiveNumber);
  t2_cmd->add_option("--scale", t2.scale, "scale c of generated c*U operators")->check(CLI::PositiveNumber);
  t2_cmd->add_option("--states", t2.states, "auto|scalar");
  t2_cmd->add_option("--state", t2.state_file, "state D JSON file");
  t2_cmd->add_option("--state-prime", t2.state_prime_file, "state D' JSON file");

  StrengthArgs st;
  auto* st_cmd = app.add_subcommand("strength", "strength of an effect along a ray");
  add_common(st_cmd, st.common);
  st_cmd->add_option("--effect", st.effect, "effect JSON file")->required();
  st_cmd->add_option("--ray", st.ray, "ray JSON file")->required();
  st_cmd->add_flag("--json", st.json, "print a JSON record instead of the bare number");

  auto* demo_cmd = app.add_subcommand("demo", "documented counterexamples");
  demo_cmd->require_subcommand(1);
  DemoArgs mk_demo, scalar_demo, twist_demo;
  scalar_demo.dim = 3;
  twist_demo.common.trials = 500;
  auto* mk_cmd = demo_cmd->add_subcommand("mk-counterexample", "order-preserving map that is not an automorphism");
  add_common(mk_cmd, mk_demo.common);
  mk_cmd->add_option("--dim", mk_demo.dim, "dimension")->check(CLI::PositiveNumber);
  auto* scalar_cmd = demo_cmd->add_subcommand("scalar-state", "degenerate scalar state");
  add_common(scalar_cmd, scalar_demo.common);
  scalar_cmd->add_option("--dim", scalar_demo.dim, "dimension")->check(CLI::Range(2, 32));
  auto* twist_cmd = demo_cmd->add_subcommand("dim2-twist", "dimension-2 trace-preserving twist");
  add_common(twist_cmd, twist_demo.common);
  twist_cmd->add_option("--kappa", twist_demo.kappa, "twist strength");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("qeffect");
  for (const auto& a : args) argv_store.push_back(a);
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "qeffect: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen, out);
    if (*cm_cmd) return run_check_map(cm, out);
    if (*cl_cmd) return run_classify(cl, out);
    if (*t2_cmd) return run_theorem2(t2, out);
    if (*st_cmd) return run_strength(st, out);
    if (*mk_cmd) return run_demo_mk(mk_demo, out);
    if (*scalar_cmd) return run_demo_scalar(scalar_demo, out);
    if (*twist_cmd) return run_demo_twist(twist_demo, out);
  } catch (const Error& e) {
    err << "qeffect: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "qeffect: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace qeffect::cli
