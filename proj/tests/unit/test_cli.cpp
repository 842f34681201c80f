#include "qeffect/cli.hpp"
#include "qeffect/json_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qeffect;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("qeffect_test_" + name);
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("classify certifies a generated congruence") {
  const Run r = run({"classify", "--dim", "4", "--seed", "7", "--map", "unitary:auto", "--states", "auto"});
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["report"]["final"]["verdict"] == "certified_automorphism");
  CHECK(j["tool"] == "qeffect");
  CHECK(j["seed"] == 7);
  CHECK(j["trials"] == 100);
  CHECK(j.contains("tolerances"));
}

TEST_CASE("counterexample demo") {
  const Run r = run({"demo", "mk-counterexample", "--dim", "2", "--seed", "1"});
  CHECK(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["order"]["verdict"] == "pass");
  CHECK(j["ortho"]["verdict"] == "fail");
  CHECK(j["ortho"]["witnesses"].size() >= 1);
}

TEST_CASE("strength prints the bare number") {
  const std::string e = temp_file("E.json", R"({"kind":"effect","rows":2,"cols":2,"data":[[0.5,0],[0,0],[0,0],[1,0]]})");
  const std::string ray = temp_file("r.json", R"({"kind":"ray","rows":2,"cols":1,"data":[[1,0],[0,0]]})");
  const Run r = run({"strength", "--effect", e, "--ray", ray});
  CHECK(r.code == 0);
  CHECK(r.out == "0.5\n");
}

TEST_CASE("generated files load back") {
  for (const char* kind : {"unitary", "effect", "state", "projection", "ray", "semilinear"}) {
    const Run r = run({"gen", "--kind", kind, "--dim", "3", "--seed", "4", "--rank", "1"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["provenance"]["seed"] == 4);
    const std::string k = kind;
    if (k == "effect" || k == "projection") CHECK_NOTHROW(io::effect_from_json(j));
    if (k == "state") CHECK_NOTHROW(io::state_from_json(j));
    if (k == "ray") CHECK_NOTHROW(io::ray_from_json(j));
    if (k == "semilinear") CHECK_NOTHROW(io::semilinear_from_json(j));
    if (k == "unitary") CHECK_NOTHROW(io::tagged_matrix_from_json(j, "unitary", "u"));
  }
}

TEST_CASE("check-map reads a map file") {
  const Run g = run({"gen", "--kind", "unitary", "--dim", "3", "--seed", "2"});
  Json u = Json::parse(g.out);
  u.erase("provenance");
  u.erase("kind");
  const Json spec{{"variant", "antiunitary"}, {"matrix", u}, {"members", nullptr}};
  const std::string path = temp_file("spec.json", spec.dump());
  const Run r = run({"check-map", "--map", path, "--trials", "30"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["verdict"] == "pass");

  const Run mk = run({"check-map", "--map", "mk:auto", "--dim", "2", "--checks", "ortho"});
  CHECK(mk.code == 1);
}

TEST_CASE("theorem2 paths") {
  CHECK(run({"theorem2", "--dim", "3", "--operator", "unitary:auto", "--scale", "1.7"}).code == 0);
  CHECK(run({"theorem2", "--dim", "3", "--operator", "antiunitary:auto"}).code == 0);
  CHECK(run({"theorem2", "--dim", "3", "--operator", "random:auto"}).code == 1);
  const Run degenerate = run({"theorem2", "--dim", "3", "--operator", "random:auto", "--states", "scalar"});
  CHECK(degenerate.code == 1);
  CHECK(Json::parse(degenerate.out)["report"]["final"]["verdict"] == "hypothesis_degenerate");
}

TEST_CASE("remark demos") {
  CHECK(run({"demo", "scalar-state"}).code == 0);
  const Run t = run({"demo", "dim2-twist"});
  CHECK(t.code == 0);
  const Json j = Json::parse(t.out);
  CHECK(j["image_overlap"].get<double>() > 0.1);
  CHECK(j["trace_condition_max_residual"].get<double>() <= 1e-10);
  CHECK(j["trials"] == 500);
}

TEST_CASE("usage and input errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"classify", "--map", "unitary:auto"}).code == 2);  // no --dim
  CHECK(run({"classify", "--map", "/nonexistent.json"}).code == 2);
  CHECK(run({"gen", "--kind", "tensor", "--dim", "2"}).code == 2);
  CHECK(run({"check-map", "--map", "mk:auto", "--dim", "2", "--trials", "0"}).code == 2);
  const std::string bad = temp_file("bad.json", R"({"kind":"effect","rows":2,"cols":2,"data":[[1,0]]})");
  const std::string ray = temp_file("r2.json", R"({"kind":"ray","rows":2,"cols":1,"data":[[1,0],[0,0]]})");
  const Run r = run({"strength", "--effect", bad, "--ray", ray});
  CHECK(r.code == 2);
  CHECK(r.err.find("effect.data") != std::string::npos);
  CHECK(run({"demo", "dim2-twist", "--kappa", "0"}).code == 0);
}

TEST_CASE("--out writes a file") {
  const auto path = (std::filesystem::temp_directory_path() / "qeffect_test_out.json").string();
  const Run r = run({"demo", "mk-counterexample", "--out", path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(Json::parse(buf.str())["order"]["verdict"] == "pass");
}

TEST_CASE("identical arguments give identical bytes") {
  const std::vector<std::string> args = {"classify", "--dim", "3", "--seed", "11", "--map", "antiunitary:auto"};
  CHECK(run(args).out == run(args).out);
  std::vector<std::string> par = args;
  par.push_back("--parallel");
  // execution mode does not leak into the report
  CHECK(run(par).out == run(args).out);
}

}  // TEST_SUITE
