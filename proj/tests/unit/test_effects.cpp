#include "../oracles.hpp"
#include "qeffect/effects.hpp"

#include <doctest.h>

#include <numbers>

using namespace qeffect;

namespace {

Ray ray_of(std::initializer_list<Complex> v) { return Ray(oracle::vec(v)); }

Effect diag_effect(std::initializer_list<double> d) { return Effect::from_matrix(oracle::diag(d)); }

}  // namespace

TEST_SUITE("effects") {

TEST_CASE("construction rejects non-effects") {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::InvalidInput;
  };
  CHECK(kind_of([] { Effect::from_matrix(oracle::diag({1.2, 0.5})); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { Effect::from_matrix(oracle::diag({-0.1, 0.5})); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { Effect::from_matrix(Matrix::Zero(2, 3)); }) == ErrorKind::NonSquare);
  CHECK(kind_of([] { State::from_matrix(oracle::diag({0.5, 0.6})); }) == ErrorKind::InvalidInput);
  // tiny excursions are clamped rather than rejected
  const Effect e = Effect::from_matrix(oracle::diag({1.0 + 1e-12, -1e-12}));
  CHECK(oracle::min_eigenvalue(e.matrix()) >= 0.0);
  CHECK(oracle::eigenvalues(e.matrix())(1) <= 1.0);
}

TEST_CASE("orthocomplement") {
  CHECK(frobenius(orthocomplement(Effect::zero(3)).matrix() - identity(3)) == 0.0);
  CHECK(frobenius(orthocomplement(Effect::scalar(3, 0.3)).matrix() - 0.7 * identity(3)) < 1e-15);
  RandomSource r(2);
  for (int i = 0; i < 20; ++i) {
    const Effect e = random_effect(4, r);
    CHECK(frobenius(orthocomplement(orthocomplement(e)).matrix() - e.matrix()) < 1e-15);
  }
}

TEST_CASE("strength worked examples") {
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(strength(diag_effect({0.5, 1.0}), Ray::basis(2, 0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(strength(diag_effect({1.0, 0.0}), ray_of({h, h})) == 0.0);
  const double closed = strength(diag_effect({0.5, 1.0}), ray_of({h, h}));
  CHECK(closed == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(std::abs(oracle::bisection_strength(oracle::diag({0.5, 1.0}), oracle::vec({h, h})) - 2.0 / 3.0) < 1e-9);
  // saturates at 1
  CHECK(strength(Effect::unit(3), Ray::basis(3, 1)) == 1.0);
}

TEST_CASE("strength matches the bisection oracle") {
  double worst = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    RandomSource r(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 5);
    const Effect full = random_effect(n, r);
    const Ray any = random_ray(n, r);
    worst = std::max(worst, std::abs(strength(full, any) - oracle::bisection_strength(full.matrix(), any.vector())));
    // rank-deficient effect with a ray in its range
    const Effect thin = Effect::from_matrix(random_rank_deficient_effect(n, 1 + static_cast<Eigen::Index>(seed % (n - 1)), r));
    const Ray inside(Vector(thin.matrix() * random_unit_vector(n, r)));
    worst = std::max(worst, std::abs(strength(thin, inside) - oracle::bisection_strength(thin.matrix(), inside.vector())));
    count += 2;
  }
  CHECK(count >= 500);
  CHECK(worst <= 1e-6);
}

TEST_CASE("strength of eigenvectors equals eigenvalues") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource r(seed);
    const Effect e = random_effect(4, r);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(e.matrix());
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(strength(e, Ray(Vector(es.eigenvectors().col(k)))) - es.eigenvalues()(k)) <= 1e-9);
    }
  }
}

TEST_CASE("strength of scalar effects") {
  RandomSource r(4);
  for (int i = 0; i < 50; ++i) {
    const double lambda = r.uniform();
    CHECK(std::abs(strength(Effect::scalar(3, lambda), random_ray(3, r)) - lambda) <= 1e-9);
  }
}

TEST_CASE("strength is monotone in the order") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource r(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 5);
    const auto [e, f] = comparable_pair(n, r);
    for (int k = 0; k < 5; ++k) {
      const Ray ray = random_ray(n, r);
      CHECK(strength(e, ray) <= strength(f, ray) + 1e-8);
    }
  }
}

TEST_CASE("weak atom below the effect") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource r(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 5);
    const Effect e = random_effect(n, r);
    const Ray ray = random_ray(n, r);
    const WeakAtom atom{strength(e, ray), ray};
    CHECK(loewner_leq(atom.effect().matrix(), e.matrix(), 1e-8));
    // and slightly more is not below
    if (atom.coefficient < 1.0 - 1e-6) {
      CHECK_FALSE(loewner_leq((atom.coefficient + 1e-6) * ray.projection(), e.matrix(), 1e-12));
    }
  }
}

TEST_CASE("unitary congruence preserves strength") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource r(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 5);
    const Effect e = random_effect(n, r);
    const Ray ray = random_ray(n, r);
    const Matrix u = haar_unitary(n, r);
    const Effect moved = Effect::from_matrix(u * e.matrix() * u.adjoint());
    CHECK(std::abs(strength(moved, Ray(Vector(u * ray.vector()))) - strength(e, ray)) <= 1e-8);
  }
}

TEST_CASE("trace pairing") {
  RandomSource r(6);
  const State d = random_state(3, r);
  CHECK(trace_pair(Effect::unit(3), d) == doctest::Approx(1.0).epsilon(1e-14));
  const Ray ray = random_ray(3, r);
  const Matrix p = ray.projection();
  CHECK(trace_pair(p, p) == doctest::Approx(1.0).epsilon(1e-14));

  // Bloch: P with n = (0,0,1), D with d = (0,0,0.5) -> (1 + n.d)/2
  const Matrix pz = oracle::diag({1, 0});
  const Matrix dz = oracle::diag({0.75, 0.25});
  CHECK(std::abs(trace_pair(pz, dz) - 0.75) < 1e-15);

  // generic Bloch vectors against the (1 + n.d)/2 formula
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d n = oracle::bloch(std::acos(r.uniform(-1, 1)), r.uniform(0, 2 * std::numbers::pi));
    const Eigen::Vector3d dv = r.uniform() * oracle::bloch(std::acos(r.uniform(-1, 1)), r.uniform(0, 2 * std::numbers::pi));
    auto rho = [](const Eigen::Vector3d& v) {
      Matrix m(2, 2);
      m << 1.0 + v(2), Complex(v(0), -v(1)), Complex(v(0), v(1)), 1.0 - v(2);
      return Matrix(0.5 * m);
    };
    CHECK(std::abs(trace_pair(rho(n), rho(dv)) - 0.5 * (1.0 + n.dot(dv))) < 1e-14);
  }
}

TEST_CASE("trace pairing is affine in the effect") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource r(seed);
    const Effect e = random_effect(4, r), f = random_effect(4, r);
    const State d = random_state(4, r);
    const double a = r.uniform();
    const Matrix mix = a * e.matrix() + (1 - a) * f.matrix();
    CHECK(std::abs(trace_pair(mix, d.matrix()) - (a * trace_pair(e, d) + (1 - a) * trace_pair(f, d))) <= 1e-10);
  }
}

TEST_CASE("sharpness and rank") {
  CHECK(is_sharp(Effect::unit(3)));
  CHECK(rank(Effect::unit(3)) == 3);
  RandomSource r(1);
  const Ray ray = random_ray(3, r);
  const Effect half = Effect::from_matrix(0.5 * ray.projection());
  CHECK_FALSE(is_sharp(half));
  CHECK(rank(half) == 1);
  const Effect p = random_projection(4, 2, r);
  CHECK(is_sharp(p));
  CHECK(rank(p) == 2);
  CHECK(rank(Effect::zero(3)) == 0);
}

TEST_CASE("rays") {
  const Ray a(oracle::vec({Complex(0, 2), 0}));
  CHECK(a == Ray::basis(2, 0));
  CHECK(a.vector().norm() == doctest::Approx(1.0));
  CHECK_THROWS_AS(Ray(oracle::vec({0, 0})), Error);
}

}  // TEST_SUITE
