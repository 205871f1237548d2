#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nngpkl/numerics.hpp"
#include "test_support.hpp"

using namespace nngpkl;
using test_support::random_spd;
using test_support::random_symmetric;
using test_support::random_uniform_matrix;
using test_support::rel_frobenius_error;

TEST_CASE("SymMatrix enforces shape and symmetry") {
  CHECK_THROWS_AS(SymMatrixd(Eigen::MatrixXd::Zero(2, 3)), DimensionMismatch);
  CHECK_THROWS_AS(SymMatrixd(Eigen::MatrixXd::Zero(0, 0)), DimensionMismatch);

  const Eigen::MatrixXd g = random_uniform_matrix(7, 7, 11);
  const SymMatrixd a(g);
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < a.size(); ++j) CHECK(a(i, j) == a(j, i));  // exact

  CHECK(SymMatrixd::identity(3).mat() == Eigen::MatrixXd::Identity(3, 3));
  CHECK(SymMatrixd::zero(2).mat() == Eigen::MatrixXd::Zero(2, 2));
  const SymMatrixd d = SymMatrixd::from_diagonal(Eigen::Vector2d(2.0, 4.0));
  CHECK(d(0, 0) == 2.0);
  CHECK(d(1, 1) == 4.0);
  CHECK(d(0, 1) == 0.0);
}

TEST_CASE("cholesky of the identity is the identity with zero logdet") {
  const CholFactor<double> f = cholesky(SymMatrixd::identity(3));
  CHECK(f.lower == Eigen::MatrixXd::Identity(3, 3));
  CHECK(f.logdet == 0.0);
}

TEST_CASE("cholesky of [[4,2],[2,5]] is [[2,0],[1,2]]") {
  Eigen::Matrix2d a;
  a << 4, 2, 2, 5;
  const CholFactor<double> f = cholesky(SymMatrixd(a));
  Eigen::Matrix2d want;
  want << 2, 0, 1, 2;
  CHECK((f.lower - want).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(f.logdet == doctest::Approx(std::log(16.0)).epsilon(1e-14));
  // L L^T reconstructs the input: direct 2x2 multiplication gives [[4,2],[2,5]].
  CHECK(rel_frobenius_error(f.lower * f.lower.transpose(), a) < 1e-15);
}

TEST_CASE("cholesky rejects an indefinite matrix") {
  Eigen::Matrix2d a;
  a << 1, 2, 2, 1;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(cholesky(SymMatrixd(a)), NotPositiveDefinite);
}

TEST_CASE("solve against examples") {
  const CholFactor<double> id = cholesky(SymMatrixd::identity(3));
  const Eigen::Vector3d b(1, 2, 3);
  CHECK(solve(id, Eigen::VectorXd(b)) == b);

  Eigen::Matrix2d a;
  a << 4, 2, 2, 5;
  const CholFactor<double> f = cholesky(SymMatrixd(a));
  const Eigen::VectorXd x = solve(f, Eigen::VectorXd(Eigen::Vector2d(4, 2)));
  CHECK(x(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x(1) == doctest::Approx(0.0).epsilon(1e-14));

  const CholFactor<double> d = cholesky(SymMatrixd::from_diagonal(Eigen::Vector2d(2, 4)));
  const Eigen::VectorXd y = solve(d, Eigen::VectorXd(Eigen::Vector2d(2, 4)));
  CHECK(y(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(y(1) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(solve(f, Eigen::VectorXd(b)), DimensionMismatch);
  CHECK_THROWS_AS(solve(f, Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3))), DimensionMismatch);
}

TEST_CASE("solve with a matrix right-hand side gives the residual contract") {
  const SymMatrixd a = random_spd(6, 21);
  const CholFactor<double> f = cholesky(a);
  const Eigen::MatrixXd b = random_uniform_matrix(6, 3, 22);
  const Eigen::MatrixXd x = solve(f, b);
  CHECK(rel_frobenius_error(a.mat() * x, b) < 1e-12);
}

TEST_CASE("inverse against examples") {
  CHECK(inverse(SymMatrixd::identity(2)).mat() == Eigen::MatrixXd::Identity(2, 2));

  const SymMatrixd d = inverse(SymMatrixd::from_diagonal(Eigen::Vector2d(2, 4)));
  CHECK(d(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d(1, 1) == doctest::Approx(0.25).epsilon(1e-15));

  Eigen::Matrix2d a;
  a << 4, 2, 2, 5;
  const SymMatrixd inv = inverse(SymMatrixd(a));
  Eigen::Matrix2d want;  // adjugate over determinant: (1/16) [[5,-2],[-2,4]]
  want << 5.0 / 16.0, -2.0 / 16.0, -2.0 / 16.0, 4.0 / 16.0;
  CHECK((inv.mat() - want).cwiseAbs().maxCoeff() < 1e-15);

  Eigen::Matrix2d bad;
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(inverse(SymMatrixd(bad)), NotPositiveDefinite);
}

TEST_CASE("frobenius_norm against examples") {
  CHECK(frobenius_norm(SymMatrixd::zero(4)) == 0.0);
  CHECK(frobenius_norm(SymMatrixd::identity(3)) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  Eigen::Matrix2d a;
  a << 1, 2, 2, 1;  // 1 + 4 + 4 + 1 = 10
  CHECK(frobenius_norm(SymMatrixd(a)) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-15));
}

TEST_CASE("sym_eig on diagonal input sorts descending with sign-fixed axes") {
  const EigDecomp<double> e = sym_eig(SymMatrixd::from_diagonal(Eigen::Vector2d(3, 1)));
  CHECK(e.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(1.0).epsilon(1e-14));
  // Eigenvectors (rows) are a permutation of the identity axes.
  CHECK(e.vectors.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-14));
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) {
      const double v = e.vectors(i, j);
      CHECK((std::abs(v) < 1e-14 || std::abs(v - 1.0) < 1e-14));  // sign convention: positive
    }
  }
}

TEST_CASE("sym_eig of [[0,1],[1,0]] has eigenvalues 1 and -1") {
  Eigen::Matrix2d a;
  a << 0, 1, 1, 0;
  const EigDecomp<double> e = sym_eig(SymMatrixd(a));
  CHECK(e.values(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(e.values(1) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("sym_eig of the identity gives all ones") {
  const EigDecomp<double> e = sym_eig(SymMatrixd::identity(3));
  for (Index i = 0; i < 3; ++i) CHECK(e.values(i) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("sym_eig satisfies the decomposition invariants on random symmetric input") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 2 + static_cast<Index>(seed % 9);
    const SymMatrixd a = random_symmetric(n, seed);
    const EigDecomp<double> e = sym_eig(a);
    const Eigen::MatrixXd orth = e.vectors.transpose() * e.vectors;
    CHECK((orth - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd recon = e.vectors.transpose() * e.values.asDiagonal() * e.vectors;
    CHECK(rel_frobenius_error(recon, a.mat()) < 1e-9);
    for (Index i = 0; i + 1 < n; ++i) CHECK(e.values(i) >= e.values(i + 1));
    // Sign convention: first nonzero component of each eigenvector positive.
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        if (e.vectors(i, j) != 0.0) {
          CHECK(e.vectors(i, j) > 0.0);
          break;
        }
      }
    }
  }
}

TEST_CASE("cholesky round-trips and matches eigenvalue determinants on random SPD input") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 2 + static_cast<Index>((3 * seed) % 9);
    const SymMatrixd a = random_spd(n, seed);
    const CholFactor<double> f = cholesky(a);
    CHECK(rel_frobenius_error(f.lower * f.lower.transpose(), a.mat()) < 1e-10);
    const EigDecomp<double> e = sym_eig(a);
    const double det_from_eigs = e.values.prod();
    CHECK(std::abs(std::exp(f.logdet) - det_from_eigs) / det_from_eigs < 1e-8);
  }
}

TEST_CASE("inverse is an involution on well-conditioned matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Index n = 2 + static_cast<Index>((7 * seed) % 9);
    const SymMatrixd a = random_spd(n, 100 + seed);
    const EigDecomp<double> e = sym_eig(a);
    REQUIRE(e.values(0) / e.values(n - 1) < 1e6);
    CHECK(rel_frobenius_error(inverse(inverse(a)).mat(), a.mat()) < 1e-8);
  }
}

TEST_CASE("frobenius_norm is invariant under the orthogonal transforms sym_eig produces") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Index n = 3 + static_cast<Index>(seed % 6);
    const Eigen::MatrixXd p = sym_eig(random_symmetric(n, 200 + seed)).vectors;
    const SymMatrixd a = random_symmetric(n, 300 + seed);
    const double lhs = (p.transpose() * a.mat() * p).norm();
    CHECK(std::abs(lhs - frobenius_norm(a)) / frobenius_norm(a) < 1e-10);
  }
}

TEST_CASE_TEMPLATE("core operations instantiate across scalar types", T, double, long double) {
  using Mat = Matrix<T>;
  Mat a(2, 2);
  a << T(4), T(2), T(2), T(5);
  const SymMatrix<T> sym(a);
  const CholFactor<T> f = cholesky(sym);
  CHECK(static_cast<double>(f.lower(0, 0)) == doctest::Approx(2.0));
  const Vector<T> x = solve(f, Vector<T>(Eigen::Matrix<T, 2, 1>(T(4), T(2))));
  CHECK(static_cast<double>(x(0)) == doctest::Approx(1.0));
  CHECK(static_cast<double>(frobenius_norm(SymMatrix<T>::identity(3))) ==
        doctest::Approx(std::sqrt(3.0)));
}
