#include "../oracles.hpp"
#include "qeffect/json_io.hpp"

#include <doctest.h>

#include <cstring>

using namespace qeffect;

namespace {

std::string error_text(const Json& j) {
  try {
    io::matrix_from_json(j);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(Complex) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_SUITE("json_io") {

TEST_CASE("matrices round-trip bit for bit") {
  RandomSource r(1);
  for (int i = 0; i < 20; ++i) {
    const Matrix m = gaussian_matrix(1 + i % 5, 1 + (i * 3) % 4, r) * std::pow(10.0, r.uniform(-300, 300));
    const Json j = io::matrix_to_json(m);
    const Matrix back = io::matrix_from_json(io::parse_text(j.dump(), "mem"));
    CHECK(bit_equal(m, back));
  }
  CHECK(Json(0.1).dump() == "0.1");
}

TEST_CASE("row-major layout") {
  Matrix m(2, 2);
  m << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
  const Json j = io::matrix_to_json(m);
  CHECK(j["rows"] == 2);
  CHECK(j["data"][1][0] == 3.0);
  CHECK(j["data"][2][1] == 6.0);
}

TEST_CASE("errors name the offending field") {
  CHECK(error_text(Json::parse(R"({"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[1,"x"]]})")).find("matrix.data[3][1]") !=
        std::string::npos);
  CHECK(error_text(Json::parse(R"({"rows":2,"cols":2,"data":[[1,0]]})")).find("matrix.data") != std::string::npos);
  CHECK(error_text(Json::parse(R"({"cols":2,"data":[]})")).find("matrix.rows") != std::string::npos);
  CHECK(error_text(Json::parse(R"({"rows":0,"cols":2,"data":[]})")).find("matrix.rows") != std::string::npos);
  CHECK(error_text(Json::parse(R"({"rows":1,"cols":1,"data":[[1]]})")).find("matrix.data[0]") != std::string::npos);
  CHECK_THROWS_AS(io::parse_text("{not json", "mem"), Error);
}

TEST_CASE("kind tags are enforced") {
  const Json eff = io::matrix_to_json(oracle::diag({0.5, 1}), "effect");
  CHECK_NOTHROW(io::effect_from_json(eff));
  CHECK_THROWS_AS(io::state_from_json(eff), Error);
  const Json proj = io::matrix_to_json(oracle::diag({1, 0}), "projection");
  CHECK(frobenius(io::effect_from_json(proj).matrix() - oracle::diag({1, 0})) == 0.0);
  // untagged input is accepted
  CHECK_NOTHROW(io::effect_from_json(io::matrix_to_json(oracle::diag({0.5, 1}))));
}

TEST_CASE("rays") {
  const Ray r = io::ray_from_json(Json::parse(R"({"kind":"ray","rows":2,"cols":1,"data":[[1,0],[0,0]]})"));
  CHECK(r == Ray::basis(2, 0));
  CHECK_THROWS_AS(io::ray_from_json(Json::parse(R"({"rows":2,"cols":1,"data":[[2,0],[0,0]]})")), Error);
  CHECK_THROWS_AS(io::ray_from_json(Json::parse(R"({"rows":1,"cols":2,"data":[[1,0],[0,0]]})")), Error);
  RandomSource g(2);
  const Ray x = random_ray(4, g);
  CHECK(bit_equal(io::ray_from_json(io::ray_to_json(x)).vector(), x.vector()));
}

TEST_CASE("map specs") {
  RandomSource r(3);
  const EffectMapSpec spec = EffectMapSpec::compose(
      {EffectMapSpec::mk(random_mk_parameter(3, r)), EffectMapSpec::antiunitary(haar_unitary(3, r))});
  const EffectMapSpec back = io::spec_from_json(io::parse_text(io::spec_to_json(spec).dump(), "mem"));
  CHECK(back.variant == MapVariant::Compose);
  REQUIRE(back.members.size() == 2);
  CHECK(back.members[0].variant == MapVariant::MK);
  CHECK(bit_equal(back.members[1].matrix, spec.members[1].matrix));

  Json bad = io::spec_to_json(EffectMapSpec::unitary(identity(2)));
  bad["variant"] = "shear";
  CHECK_THROWS_AS(io::spec_from_json(bad), Error);
  Json not_unitary = io::spec_to_json(EffectMapSpec::unitary(2.0 * identity(2)));
  CHECK_THROWS_AS(io::spec_from_json(not_unitary), Error);
}

TEST_CASE("semilinear operators") {
  RandomSource r(4);
  const SemilinearOperator a = random_semilinear(3, r);
  const SemilinearOperator back = io::semilinear_from_json(io::semilinear_to_json(a));
  CHECK(back.conjugating() == a.conjugating());
  CHECK(bit_equal(back.matrix(), a.matrix()));
}

TEST_CASE("reports carry replay information") {
  const MapReport rep = check_ortho_compatibility(EffectMapSpec::mk(oracle::diag({1.0, 0.5})), 2, 20, RandomSource(9));
  const Json j = io::report_to_json(rep);
  CHECK(j["seed"] == 9);
  CHECK(j["trials"] == 20);
  CHECK(j["tolerance"] == 1e-8);
  CHECK(j["verdict"] == "fail");
  REQUIRE(j["witnesses"].size() == 1);
  const Matrix e = io::matrix_from_json(j["witnesses"][0]["inputs"]["E"]);
  CHECK(bit_equal(e, rep.witnesses[0].inputs[0].second));
}

}  // TEST_SUITE
