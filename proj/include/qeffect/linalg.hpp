#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qeffect {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Global tolerance policy shared by every module.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double eig = 1e-9;
inline constexpr double rank = 1e-9;  // scaled by max(1, largest eigenvalue)
inline constexpr double psd = 1e-9;
inline constexpr double sharp = 1e-7;
inline constexpr double range = 1e-7;
inline constexpr double jacobi_offdiag = 1e-13;
inline constexpr int jacobi_max_sweeps = 100;
}  // namespace tol

enum class ErrorKind {
  NonSquare,
  NotHermitian,
  DimensionMismatch,
  NotPSD,
  Singular,
  BadDimension,
  NumericalBreakdown,
  OrthogonalityViolated,
  PhaseInconsistent,
  VerificationFailed,
  KindMismatch,
  DimensionTooSmall,
  DegenerateState,
  InvalidInput,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct EigenDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns, unitary

  Matrix reconstruct() const;
  double smallest() const { return eigenvalues(0); }
  double largest() const { return eigenvalues(eigenvalues.size() - 1); }
};

double frobenius(const Matrix& m);
double hermiticity_residual(const Matrix& m);
bool is_hermitian(const Matrix& m, double tolerance = tol::hermitian);

/// (M + M*)/2; callers use it to strip rounding asymmetry after products.
Matrix hermitian_part(const Matrix& m);
Matrix identity(Eigen::Index n);

void require_square(const Matrix& m, const char* what);
void require_same_dim(const Matrix& a, const Matrix& b, const char* what);

/// Cyclic Jacobi eigensolver for Hermitian matrices.
EigenDecomposition eig_hermitian(const Matrix& m);

/// Relative rank threshold for a decomposition: rank_tol * max(1, lambda_max).
double rank_threshold(const EigenDecomposition& eig);

/// B - A is PSD up to tol * max(1, ||B - A||_F).
bool loewner_leq(const Matrix& a, const Matrix& b, double tolerance = tol::psd);

/// Smallest eigenvalue of B - A; negative values measure the order violation.
double loewner_margin(const Matrix& a, const Matrix& b);

enum class MatrixFunction { Sqrt, InvSqrt, Pinv, Inv };

Matrix matrix_function(const Matrix& m, MatrixFunction kind);
Matrix matrix_function(const EigenDecomposition& eig, MatrixFunction kind);

/// Entrywise complex conjugate in the standard basis.
inline Matrix conj(const Matrix& m) { return m.conjugate(); }

/// Projection x x* / ||x||^2.
Matrix rank_one_projection(const Vector& x);

/// Orthonormal basis of the column span, modified Gram-Schmidt with column
/// pivoting. Columns whose residual norm falls below rank_tol are dropped.
Matrix orthonormal_basis(const Matrix& columns);

}  // namespace qeffect
