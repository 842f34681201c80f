#include "../oracles.hpp"
#include "qeffect/linalg.hpp"
#include "qeffect/random.hpp"

#include <doctest.h>

using namespace qeffect;

TEST_SUITE("linalg") {

TEST_CASE("identity has unit spectrum") {
  const auto e = eig_hermitian(identity(3));
  for (int i = 0; i < 3; ++i) CHECK(e.eigenvalues(i) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((e.eigenvectors.adjoint() * e.eigenvectors - identity(3)).norm() < 1e-12);
}

TEST_CASE("diagonal input returns sorted diagonal") {
  const auto e = eig_hermitian(oracle::diag({1.0, 0.5}));
  CHECK(e.eigenvalues(0) == doctest::Approx(0.5));
  CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
  // columns are standard basis vectors up to phase
  CHECK(std::abs(e.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("jacobi agrees with an independent solver") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomSource rng(seed);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % 10);
    const Matrix g = gaussian_matrix(n, n, rng);
    const Matrix m = hermitian_part(g);
    const auto mine = eig_hermitian(m);
    const Eigen::VectorXd ref = oracle::eigenvalues(m);
    CHECK((mine.eigenvalues - ref).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, m.norm()));
  }
}

TEST_CASE("reconstruction residual across dims 1..10 and 200 seeds") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    for (Eigen::Index n = 1; n <= 10; ++n) {
      RandomSource rng(seed * 31 + static_cast<std::uint64_t>(n));
      const Matrix m = hermitian_part(gaussian_matrix(n, n, rng)) * rng.uniform(0.1, 10.0);
      const auto e = eig_hermitian(m);
      worst = std::max(worst, frobenius(m - e.reconstruct()) / std::max(1.0, frobenius(m)));
      REQUIRE((e.eigenvectors.adjoint() * e.eigenvectors - identity(n)).norm() < 1e-10);
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("degenerate and clustered spectra") {
  RandomSource rng(5);
  RealVector spectrum(6);
  spectrum << 0.0, 0.0, 1e-14, 0.5, 0.5, 1.0;
  const Matrix m = hermitian_with_spectrum(spectrum, rng);
  const auto e = eig_hermitian(m);
  CHECK((e.eigenvalues - spectrum).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(frobenius(m - e.reconstruct()) < 1e-12);
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(eig_hermitian(Matrix::Zero(2, 3)), Error);
  Matrix nh = Matrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  try {
    eig_hermitian(nh);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
  try {
    loewner_leq(identity(2), identity(3));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("loewner order examples") {
  CHECK(loewner_leq(Matrix::Zero(2, 2), identity(2)));
  CHECK(loewner_leq(oracle::diag({0.5, 0.2}), oracle::diag({0.6, 0.2})));
  CHECK_FALSE(loewner_leq(oracle::diag({0.6, 0.2}), oracle::diag({0.5, 0.2})));
  CHECK_FALSE(loewner_leq(oracle::diag({1, 0}), oracle::diag({0, 1})));
  CHECK_FALSE(loewner_leq(oracle::diag({0, 1}), oracle::diag({1, 0})));
}

TEST_CASE("loewner antisymmetry up to tolerance") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(seed);
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(seed % 5);
    const Matrix a = random_effect_matrix(n, rng);
    const Matrix noise = hermitian_part(gaussian_matrix(n, n, rng)) * 1e-11;
    const Matrix b = a + noise;
    if (loewner_leq(a, b) && loewner_leq(b, a)) CHECK(frobenius(a - b) <= 10 * tol::psd);
    CHECK(loewner_leq(a, a));
  }
}

TEST_CASE("matrix function examples") {
  CHECK(frobenius(matrix_function(oracle::diag({0.25, 1}), MatrixFunction::Sqrt) - oracle::diag({0.5, 1})) < 1e-14);
  CHECK(frobenius(matrix_function(oracle::diag({0.5, 0}), MatrixFunction::Pinv) - oracle::diag({2, 0})) < 1e-14);
  const Matrix s = oracle::diag({1, 1.0 / 3.0});
  const Matrix r = matrix_function(s, MatrixFunction::InvSqrt);
  CHECK(frobenius(r - oracle::diag({1, std::sqrt(3.0)})) < 1e-12);
  CHECK(frobenius(r * r * s - identity(2)) < 1e-12);
  CHECK_THROWS_AS(matrix_function(oracle::diag({0.5, 0}), MatrixFunction::Inv), Error);
  CHECK_THROWS_AS(matrix_function(oracle::diag({0.5, -0.1}), MatrixFunction::Sqrt), Error);
}

TEST_CASE("sqrt squares back for psd inputs") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rng(seed);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(seed % 8);
    const Matrix g = gaussian_matrix(n, n, rng);
    const Matrix m = g * g.adjoint();
    const Matrix r = matrix_function(m, MatrixFunction::Sqrt);
    CHECK(frobenius(r * r - m) <= 1e-9 * std::max(1.0, frobenius(m)));
  }
}

TEST_CASE("pinv satisfies the Penrose identities") {
  RandomSource rng(3);
  const Matrix m = random_rank_deficient_effect(5, 3, rng);
  const Matrix p = matrix_function(m, MatrixFunction::Pinv);
  CHECK(frobenius(m * p * m - m) < 1e-10);
  CHECK(frobenius(p * m * p - p) < 1e-8);
}

TEST_CASE("orthonormal basis spans the input") {
  RandomSource rng(8);
  Matrix cols = gaussian_matrix(5, 3, rng);
  cols.col(2) = cols.col(0) + Complex(0, 2) * cols.col(1);  // dependent column
  const Matrix q = orthonormal_basis(cols);
  CHECK(q.cols() == 2);
  CHECK((q.adjoint() * q - identity(2)).norm() < 1e-12);
  CHECK((q * q.adjoint() * cols - cols).norm() < 1e-10);
}

}  // TEST_SUITE
