#include "qeffect/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qeffect {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquare: return "NonSquare";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::BadDimension: return "BadDimension";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::OrthogonalityViolated: return "OrthogonalityViolated";
    case ErrorKind::PhaseInconsistent: return "PhaseInconsistent";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::DegenerateState: return "DegenerateState";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

Matrix EigenDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

double frobenius(const Matrix& m) { return m.norm(); }

double hermiticity_residual(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tolerance) {
  return m.rows() == m.cols() &&
         hermiticity_residual(m) <= tolerance * std::max(1.0, m.norm());
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorKind::NonSquare, std::string(what) + " is " + std::to_string(m.rows()) +
                                          "x" + std::to_string(m.cols()));
  }
}

void require_same_dim(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

namespace {

double off_diagonal_mass(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One unitary rotation W on the (p, q) plane, W = [[c, s e], [-s conj(e), c]],
// chosen so that (W* A W)(p, q) = 0. Updates A <- W* A W and V <- V W.
void jacobi_rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const Complex apq = a(p, q);
  const double g = std::abs(apq);
  if (g == 0.0) return;
  const Complex e = apq / g;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * g);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  const Complex se = s * e;
  const Complex sec = s * std::conj(e);
  const Eigen::Index n = a.rows();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp - sec * akq;
    a(k, q) = se * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk - se * aqk;
    a(q, k) = sec * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp - sec * vkq;
    v(k, q) = se * vkp + c * vkq;
  }
}

}  // namespace

EigenDecomposition eig_hermitian(const Matrix& m) {
  require_square(m, "eig_hermitian input");
  if (!is_hermitian(m)) {
    throw Error(ErrorKind::NotHermitian,
                "Hermiticity residual " + std::to_string(hermiticity_residual(m)));
  }
  const Eigen::Index n = m.rows();
  Matrix a = hermitian_part(m);
  Matrix v = identity(n);
  const double scale = a.norm();
  const double target = tol::jacobi_offdiag * scale;

  int sweep = 0;
  while (off_diagonal_mass(a) > target) {
    if (++sweep > tol::jacobi_max_sweeps) {
      throw Error(ErrorKind::NumericalBreakdown, "Jacobi did not converge in 100 sweeps");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) jacobi_rotate(a, v, p, q);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  return out;
}

double rank_threshold(const EigenDecomposition& eig) {
  return tol::rank * std::max(1.0, eig.largest());
}

double loewner_margin(const Matrix& a, const Matrix& b) {
  require_same_dim(a, b, "loewner comparison");
  return eig_hermitian(b - a).smallest();
}

bool loewner_leq(const Matrix& a, const Matrix& b, double tolerance) {
  require_same_dim(a, b, "loewner comparison");
  const Matrix diff = b - a;
  return eig_hermitian(diff).smallest() >= -tolerance * std::max(1.0, diff.norm());
}

Matrix matrix_function(const EigenDecomposition& eig, MatrixFunction kind) {
  const double scale = std::max(1.0, eig.eigenvalues.cwiseAbs().maxCoeff());
  if (eig.smallest() < -tol::psd * scale) {
    throw Error(ErrorKind::NotPSD, "smallest eigenvalue " + std::to_string(eig.smallest()));
  }
  const double cut = rank_threshold(eig);
  if (kind == MatrixFunction::Inv && eig.smallest() <= cut) {
    throw Error(ErrorKind::Singular, "smallest eigenvalue " + std::to_string(eig.smallest()));
  }
  RealVector f(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double x = eig.eigenvalues(i);
    if (x <= cut) {
      f(i) = 0.0;
      continue;
    }
    switch (kind) {
      case MatrixFunction::Sqrt: f(i) = std::sqrt(x); break;
      case MatrixFunction::InvSqrt: f(i) = 1.0 / std::sqrt(x); break;
      case MatrixFunction::Pinv:
      case MatrixFunction::Inv: f(i) = 1.0 / x; break;
    }
  }
  const Matrix& v = eig.eigenvectors;
  return hermitian_part(v * f.cast<Complex>().asDiagonal() * v.adjoint());
}

Matrix matrix_function(const Matrix& m, MatrixFunction kind) {
  return matrix_function(eig_hermitian(m), kind);
}

Matrix rank_one_projection(const Vector& x) {
  const double n2 = x.squaredNorm();
  if (n2 == 0.0) throw Error(ErrorKind::InvalidInput, "projection onto the zero vector");
  return x * x.adjoint() / n2;
}

Matrix orthonormal_basis(const Matrix& columns) {
  Matrix work = columns;
  const Eigen::Index n = work.rows();
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < work.cols(); ++j) max_norm = std::max(max_norm, work.col(j).norm());
  const double cut = tol::rank * std::max(1.0, max_norm);

  Matrix basis(n, 0);
  std::vector<bool> used(static_cast<std::size_t>(work.cols()), false);
  while (basis.cols() < n) {
    Eigen::Index best = -1;
    double best_norm = cut;
    for (Eigen::Index j = 0; j < work.cols(); ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      const double nj = work.col(j).norm();
      if (nj > best_norm) {
        best_norm = nj;
        best = j;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    Vector q = work.col(best) / best_norm;
    // second pass keeps the basis orthonormal to working precision
    q -= basis * (basis.adjoint() * q);
    q.normalize();
    basis.conservativeResize(n, basis.cols() + 1);
    basis.col(basis.cols() - 1) = q;
    for (Eigen::Index j = 0; j < work.cols(); ++j) {
      if (!used[static_cast<std::size_t>(j)]) work.col(j) -= q * q.dot(work.col(j));
    }
  }
  return basis;
}

}  // namespace qeffect
