#include "qeffect/json_io.hpp"

#include <fstream>
#include <sstream>

namespace qeffect::io {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::InvalidInput, path + ": " + what);
}

const Json& field(const Json& j, const char* name, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(name);
  if (it == j.end()) bad(path + "." + name, "missing field");
  return *it;
}

Eigen::Index positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) bad(path, "expected a positive integer");
  return static_cast<Eigen::Index>(j.get<long long>());
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Json matrix_to_json(const Matrix& m, const char* kind) {
  Json j = matrix_to_json(m);
  j["kind"] = kind;
  return j;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  const Eigen::Index rows = positive_int(field(j, "rows", path), path + ".rows");
  const Eigen::Index cols = positive_int(field(j, "cols", path), path + ".cols");
  const Json& data = field(j, "data", path);
  if (!data.is_array()) bad(path + ".data", "expected an array");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    bad(path + ".data", "expected " + std::to_string(rows * cols) + " entries, found " + std::to_string(data.size()));
  }
  Matrix m(rows, cols);
  for (Eigen::Index idx = 0; idx < rows * cols; ++idx) {
    const std::string at = path + ".data[" + std::to_string(idx) + "]";
    const Json& e = data[static_cast<std::size_t>(idx)];
    if (!e.is_array() || e.size() != 2) bad(at, "expected a [re, im] pair");
    m(idx / cols, idx % cols) = Complex(number(e[0], at + "[0]"), number(e[1], at + "[1]"));
  }
  return m;
}

Matrix tagged_matrix_from_json(const Json& j, const char* expected, const std::string& path) {
  if (j.is_object()) {
    auto it = j.find("kind");
    if (it != j.end()) {
      if (!it->is_string()) bad(path + ".kind", "expected a string");
      if (it->get<std::string>() != expected) {
        bad(path + ".kind", "expected \"" + std::string(expected) + "\", found \"" + it->get<std::string>() + "\"");
      }
    }
  }
  return matrix_from_json(j, path);
}

Effect effect_from_json(const Json& j, const std::string& path) {
  // projections are effects too
  if (j.is_object() && j.contains("kind") && j["kind"] == "projection") {
    return Effect::from_matrix(tagged_matrix_from_json(j, "projection", path));
  }
  return Effect::from_matrix(tagged_matrix_from_json(j, "effect", path));
}

State state_from_json(const Json& j, const std::string& path) {
  return State::from_matrix(tagged_matrix_from_json(j, "state", path));
}

Ray ray_from_json(const Json& j, const std::string& path) {
  const Matrix m = tagged_matrix_from_json(j, "ray", path);
  if (m.cols() != 1) bad(path + ".cols", "a ray is a single-column matrix");
  const Vector v = m.col(0);
  if (std::abs(v.norm() - 1.0) > 1e-12) bad(path + ".data", "ray vector is not a unit vector");
  return Ray(v);
}

Json ray_to_json(const Ray& r) { return matrix_to_json(Matrix(r.vector()), "ray"); }

Json spec_to_json(const EffectMapSpec& spec) {
  Json j{{"variant", to_string(spec.variant)}};
  if (spec.variant == MapVariant::Compose) {
    j["matrix"] = nullptr;
    Json members = Json::array();
    for (const auto& m : spec.members) members.push_back(spec_to_json(m));
    j["members"] = std::move(members);
  } else {
    j["matrix"] = matrix_to_json(spec.matrix);
    j["members"] = nullptr;
  }
  return j;
}

EffectMapSpec spec_from_json(const Json& j, const std::string& path) {
  const Json& variant = field(j, "variant", path);
  if (!variant.is_string()) bad(path + ".variant", "expected a string");
  const std::string v = variant.get<std::string>();
  EffectMapSpec spec;
  if (v == "compose") {
    const Json& members = field(j, "members", path);
    if (!members.is_array() || members.empty()) bad(path + ".members", "expected a nonempty array");
    std::vector<EffectMapSpec> list;
    for (std::size_t i = 0; i < members.size(); ++i)
      list.push_back(spec_from_json(members[i], path + ".members[" + std::to_string(i) + "]"));
    spec = EffectMapSpec::compose(std::move(list));
  } else {
    const Matrix m = matrix_from_json(field(j, "matrix", path), path + ".matrix");
    if (v == "unitary")
      spec = EffectMapSpec::unitary(m);
    else if (v == "antiunitary")
      spec = EffectMapSpec::antiunitary(m);
    else if (v == "mk")
      spec = EffectMapSpec::mk(m);
    else if (v == "mk_inverse")
      spec = EffectMapSpec::mk_inverse(m);
    else
      bad(path + ".variant", "unknown variant \"" + v + "\"");
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    bad(path, e.what());
  }
  return spec;
}

Json semilinear_to_json(const SemilinearOperator& a) {
  return Json{{"matrix", matrix_to_json(a.matrix())}, {"conjugating", a.conjugating()}};
}

SemilinearOperator semilinear_from_json(const Json& j, const std::string& path) {
  const Matrix m = matrix_from_json(field(j, "matrix", path), path + ".matrix");
  const Json& flag = field(j, "conjugating", path);
  if (!flag.is_boolean()) bad(path + ".conjugating", "expected a boolean");
  return SemilinearOperator(m, flag.get<bool>());
}

Json witness_to_json(const Witness& w) {
  Json inputs = Json::object();
  for (const auto& [name, m] : w.inputs) inputs[name] = matrix_to_json(m);
  return Json{{"check", w.check}, {"trial", w.trial}, {"residual", w.residual}, {"inputs", std::move(inputs)}};
}

Json report_to_json(const MapReport& r) {
  Json witnesses = Json::array();
  for (const auto& w : r.witnesses) witnesses.push_back(witness_to_json(w));
  Json metrics = Json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  return Json{{"name", r.name},          {"verdict", to_string(r.verdict)}, {"seed", r.seed},
              {"trials", r.trials},      {"tolerance", r.tolerance},        {"max_residual", r.max_residual},
              {"violations", r.violations}, {"witnesses", std::move(witnesses)}, {"notes", r.notes},
              {"metrics", std::move(metrics)}};
}

Json report_to_json(const ClassificationReport& r) {
  Json stages = Json::array();
  for (const auto& s : r.stages) {
    Json witnesses = Json::array();
    for (const auto& w : s.witnesses) witnesses.push_back(witness_to_json(w));
    Json js{{"name", s.name}, {"verdict", to_string(s.verdict)}, {"residual", s.residual}};
    if (!s.message.empty()) js["message"] = s.message;
    js["witnesses"] = std::move(witnesses);
    js["data"] = s.data;
    stages.push_back(std::move(js));
  }
  Json final{{"verdict", to_string(r.final.verdict)}};
  if (r.final.verdict == FinalVerdict::CertifiedAutomorphism) {
    final["kind"] = to_string(r.final.kind);
    final["unitary"] = matrix_to_json(r.final.unitary);
  } else {
    final["stage"] = r.final.stage;
  }
  return Json{{"pipeline", r.pipeline}, {"seed", r.seed},        {"dim", r.dim},
              {"config", r.config},     {"anomaly", r.anomaly},  {"stages", std::move(stages)},
              {"final", std::move(final)}};
}

Json parse_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, origin + ": malformed JSON (" + e.what() + ")");
  }
}

Json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

}  // namespace qeffect::io
