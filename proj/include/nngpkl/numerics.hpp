#pragma once

// Dense symmetric linear algebra used by every other module: Cholesky
// factorization, triangular solves, inverses, Frobenius norms and symmetric
// eigendecomposition. Everything is a pure function on immutable values;
// matrices are dense (the studies here run at n <= a few hundred).

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

#include "nngpkl/errors.hpp"

namespace nngpkl {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Dense symmetric matrix. Construction averages the input with its transpose,
// which makes mat(i,j) == mat(j,i) hold exactly (the two entries are computed
// by the same floating-point expression). Size must be at least 1x1.
template <typename Scalar = double>
class SymMatrix {
 public:
  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
      throw DimensionMismatch("SymMatrix: input must be square with n >= 1, got " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    mat_ = Scalar(0.5) * (m + m.transpose());
  }

  static SymMatrix identity(Index n) { return SymMatrix(Matrix<Scalar>::Identity(n, n)); }
  static SymMatrix zero(Index n) { return SymMatrix(Matrix<Scalar>::Zero(n, n)); }
  static SymMatrix from_diagonal(const Vector<Scalar>& d) {
    return SymMatrix(Matrix<Scalar>(d.asDiagonal()));
  }

  Index size() const { return mat_.rows(); }
  const Matrix<Scalar>& mat() const { return mat_; }
  Scalar operator()(Index i, Index j) const { return mat_(i, j); }

 private:
  Matrix<Scalar> mat_;
};

using SymMatrixd = SymMatrix<double>;

template <typename Scalar>
SymMatrix<Scalar> operator+(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("SymMatrix +: size mismatch");
  return SymMatrix<Scalar>(a.mat() + b.mat());
}

template <typename Scalar>
SymMatrix<Scalar> operator-(const SymMatrix<Scalar>& a, const SymMatrix<Scalar>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("SymMatrix -: size mismatch");
  return SymMatrix<Scalar>(a.mat() - b.mat());
}

template <typename Scalar>
SymMatrix<Scalar> operator*(Scalar s, const SymMatrix<Scalar>& a) {
  return SymMatrix<Scalar>(s * a.mat());
}

// a + s*I without disturbing off-diagonal entries.
template <typename Scalar>
SymMatrix<Scalar> add_diagonal(const SymMatrix<Scalar>& a, Scalar s) {
  Matrix<Scalar> m = a.mat();
  m.diagonal().array() += s;
  return SymMatrix<Scalar>(m);
}

// Lower-triangular Cholesky factor together with the log-determinant of the
// factored matrix. The log-determinant always comes from the factor diagonal
// (2 * sum log L_ii), never from a raw determinant, so it cannot overflow.
template <typename Scalar = double>
struct CholFactor {
  Matrix<Scalar> lower;
  Scalar logdet;
};

// Spectral decomposition a = vectors^T * diag(values) * vectors. Rows of
// `vectors` are the eigenvectors; `values` is sorted descending. Each
// eigenvector is sign-fixed so its first nonzero component is positive,
// making repeated runs reproducible.
template <typename Scalar = double>
struct EigDecomp {
  Matrix<Scalar> vectors;
  Vector<Scalar> values;
};

// Throws NotPositiveDefinite as soon as a pivot is <= 0. There is no
// automatic jitter: the divergence values asserted downstream sit at 1e-12
// tolerances, which silent regularization would perturb.
template <typename Scalar>
CholFactor<Scalar> cholesky(const SymMatrix<Scalar>& a) {
  Eigen::LLT<Matrix<Scalar>> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: matrix of size " + std::to_string(a.size()) +
                              " is not positive definite");
  }
  Matrix<Scalar> lower = llt.matrixL();
  const Scalar logdet = Scalar(2) * lower.diagonal().array().log().sum();
  return {std::move(lower), logdet};
}

template <typename Scalar>
Vector<Scalar> solve(const CholFactor<Scalar>& f, const Vector<Scalar>& b) {
  if (b.size() != f.lower.rows()) {
    throw DimensionMismatch("solve: rhs has length " + std::to_string(b.size()) +
                            ", factor has size " + std::to_string(f.lower.rows()));
  }
  Vector<Scalar> y = f.lower.template triangularView<Eigen::Lower>().solve(b);
  return f.lower.transpose().template triangularView<Eigen::Upper>().solve(y);
}

template <typename Scalar>
Matrix<Scalar> solve(const CholFactor<Scalar>& f, const Matrix<Scalar>& b) {
  if (b.rows() != f.lower.rows()) {
    throw DimensionMismatch("solve: rhs has " + std::to_string(b.rows()) +
                            " rows, factor has size " + std::to_string(f.lower.rows()));
  }
  Matrix<Scalar> y = f.lower.template triangularView<Eigen::Lower>().solve(b);
  return f.lower.transpose().template triangularView<Eigen::Upper>().solve(y);
}

template <typename Scalar>
SymMatrix<Scalar> inverse(const SymMatrix<Scalar>& a) {
  const CholFactor<Scalar> f = cholesky(a);
  Matrix<Scalar> inv = solve(f, Matrix<Scalar>(Matrix<Scalar>::Identity(a.size(), a.size())));
  return SymMatrix<Scalar>(inv);
}

template <typename Scalar>
Scalar frobenius_norm(const SymMatrix<Scalar>& a) {
  return a.mat().norm();
}

// Tridiagonalization + implicit QL via Eigen's self-adjoint solver, whose
// iteration cap is 30*n; exceeding it signals pathological input.
template <typename Scalar>
EigDecomp<Scalar> sym_eig(const SymMatrix<Scalar>& a) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(a.mat());
  if (es.info() != Eigen::Success) {
    throw ConvergenceFailure("sym_eig: eigensolver failed to converge");
  }
  EigDecomp<Scalar> out;
  // Eigen returns ascending order with eigenvectors as columns; flip to
  // descending with eigenvectors as rows.
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().transpose().colwise().reverse();
  for (Index i = 0; i < out.vectors.rows(); ++i) {
    for (Index j = 0; j < out.vectors.cols(); ++j) {
      const Scalar v = out.vectors(i, j);
      if (v != Scalar(0)) {
        if (v < Scalar(0)) out.vectors.row(i) = -out.vectors.row(i);
        break;
      }
    }
  }
  return out;
}

}  // namespace nngpkl
