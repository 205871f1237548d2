#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nngpkl/divergence.hpp"
#include "nngpkl/models.hpp"
#include "test_support.hpp"

using namespace nngpkl;
using test_support::rel_frobenius_error;

namespace {

LocationSet random_unit_square(Index n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd pts(n, 2);
  for (Index i = 0; i < n; ++i) {
    pts(i, 0) = rng.uniform();
    pts(i, 1) = rng.uniform();
  }
  return LocationSet(std::move(pts));
}

}  // namespace

TEST_CASE("GaussianModel caches a consistent log-determinant and rejects bad input") {
  const SymMatrixd spd = test_support::random_spd(4, 3);
  const GaussianModel cov = GaussianModel::from_covariance(spd);
  const GaussianModel prec = GaussianModel::from_precision(spd);
  const double logdet = cholesky(spd).logdet;
  CHECK(cov.logdet_cov() == doctest::Approx(logdet).epsilon(1e-10));
  CHECK(prec.logdet_cov() == doctest::Approx(-logdet).epsilon(1e-10));
  CHECK(cov.mean() == Eigen::VectorXd::Zero(4));

  // covariance_matrix materializes the precision inverse
  CHECK(rel_frobenius_error(prec.covariance_matrix().mat(), inverse(spd).mat()) < 1e-12);
  CHECK(cov.covariance_matrix().mat() == spd.mat());

  Eigen::Matrix2d indefinite;
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaussianModel::from_covariance(SymMatrixd(indefinite)), NotPositiveDefinite);
  CHECK_THROWS_AS(GaussianModel::from_covariance(Eigen::VectorXd::Zero(3), spd),
                  DimensionMismatch);
}

TEST_CASE("parent_model adds the nugget to the diagonal") {
  CHECK(parent_model(SymMatrixd::identity(2), 0.0).matrix().mat() ==
        Eigen::MatrixXd::Identity(2, 2));
  CHECK(parent_model(SymMatrixd::identity(2), 1.0).matrix().mat() ==
        2.0 * Eigen::MatrixXd::Identity(2, 2));

  // three-point parent: diagonal sigma2*(1 + delta2) with sigma2 = 1
  const double delta2 = 0.3;
  const SymMatrixd r = three_point_corr_matrix(ThreePointCorr(0.5, 0.3, 0.4));
  const GaussianModel parent = parent_model(r, delta2);
  for (Index i = 0; i < 3; ++i) CHECK(parent.matrix()(i, i) == 1.0 + delta2);
  CHECK(parent.matrix()(0, 1) == 0.5);
  CHECK_THROWS_AS(parent_model(r, -0.1), std::invalid_argument);
}

TEST_CASE("response_model against its degenerate shapes") {
  const SymMatrixd c = test_support::random_spd(5, 11);
  const double tau2 = 0.4;

  // saturated DAG: equals the parent model
  const GaussianModel resp = response_model(c, tau2, NeighborDag::saturated(5));
  CHECK(resp.shape() == GaussianShape::precision);
  const GaussianModel parent = parent_model(c, tau2);
  CHECK(rel_frobenius_error(resp.covariance_matrix().mat(), parent.matrix().mat()) < 1e-9);
  CHECK(kl_gaussian(parent, resp) < 1e-10);

  // m = 0: independent components with variances c_ii + tau2
  const GaussianModel ind = response_model(c, tau2, NeighborDag::independent(5));
  for (Index i = 0; i < 5; ++i) {
    CHECK(ind.matrix()(i, i) == doctest::Approx(1.0 / (c(i, i) + tau2)).epsilon(1e-14));
    for (Index j = i + 1; j < 5; ++j) CHECK(ind.matrix()(i, j) == 0.0);
  }
}

TEST_CASE("latent_model against its degenerate shapes") {
  const SymMatrixd c = test_support::random_spd(5, 13);
  const double tau2 = 0.4;

  const GaussianModel lat = latent_model(c, tau2, NeighborDag::saturated(5));
  CHECK(lat.shape() == GaussianShape::covariance);
  CHECK(rel_frobenius_error(lat.matrix().mat(), parent_model(c, tau2).matrix().mat()) < 1e-9);

  // tau2 = 0: response and latent are the same Vecchia approximation of C
  const NeighborDag dag(5, {{}, {0}, {1}, {1, 2}, {3}});
  const GaussianModel resp0 = response_model(c, 0.0, dag);
  const GaussianModel lat0 = latent_model(c, 0.0, dag);
  CHECK((resp0.covariance_matrix().mat() - lat0.matrix().mat()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("three-point pipeline models match the closed forms") {
  // response: chain Vecchia of sigma2*R + tau2*I; latent: chain Vecchia of
  // sigma2*R then + tau2*I
  const double sigma2 = 1.0;
  const NeighborDag chain = three_point_chain_dag();
  const ThreePointCorr corr(0.5, 0.2, 0.4);
  const SymMatrixd r = three_point_corr_matrix(corr);
  for (const double delta2 : {0.0, 0.25, 1.0, 2.0}) {
    const double tau2 = sigma2 * delta2;
    const auto [want_response, want_latent] = three_point_closed_forms(sigma2, delta2, corr);
    const GaussianModel resp = response_model(sigma2 * r, tau2, chain);
    const GaussianModel lat = latent_model(sigma2 * r, tau2, chain);
    CHECK((resp.covariance_matrix().mat() - want_response.mat()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((lat.matrix().mat() - want_latent.mat()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("three_point_closed_forms against examples") {
  // delta2 = 0: the two matrices coincide
  const ThreePointCorr corr(0.5, 0.3, 0.4);
  const auto [r0, l0] = three_point_closed_forms(1.0, 0.0, corr);
  CHECK(r0.mat() == l0.mat());

  // sigma2 = 1, delta2 = 1, rho12 = rho23 = 0.8: corner entries 0.32 vs 0.64
  const auto [r1, l1] = three_point_closed_forms(1.0, 1.0, ThreePointCorr(0.8, 0.5, 0.8));
  CHECK(r1(0, 2) == doctest::Approx(0.32).epsilon(1e-15));
  CHECK(l1(0, 2) == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(r1(0, 0) == 2.0);
  CHECK(l1(0, 0) == 2.0);

  // sigma2 scales every entry
  const auto [r2, l2] = three_point_closed_forms(2.0, 1.0, ThreePointCorr(0.8, 0.5, 0.8));
  CHECK((r2.mat() - 2.0 * r1.mat()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((l2.mat() - 2.0 * l1.mat()).cwiseAbs().maxCoeff() < 1e-15);

  CHECK_THROWS_AS(three_point_closed_forms(0.0, 1.0, corr), std::invalid_argument);
  CHECK_THROWS_AS(three_point_closed_forms(1.0, -1.0, corr), std::invalid_argument);
}

TEST_CASE("closed forms agree with the pipeline over a parameter grid") {
  // rho13 affects only the parent, never the closed forms: vary it and check
  // the pipeline outputs stay put.
  const NeighborDag chain = three_point_chain_dag();
  for (const double sigma2 : {0.5, 1.0, 2.0}) {
    for (const double delta2 : {0.0, 0.1, 1.0}) {
      for (const double rho12 : {-0.6, 0.3, 0.8}) {
        for (const double rho23 : {-0.5, 0.4}) {
          for (const double rho13 : {-0.3, 0.0, 0.5}) {
            if (!three_point_corr_valid(rho12, rho13, rho23)) continue;
            const ThreePointCorr corr(rho12, rho13, rho23);
            const SymMatrixd c = sigma2 * three_point_corr_matrix(corr);
            const auto [want_response, want_latent] = three_point_closed_forms(sigma2, delta2, corr);
            const double tau2 = sigma2 * delta2;
            CHECK((response_model(c, tau2, chain).covariance_matrix().mat() -
                   want_response.mat()).cwiseAbs().maxCoeff() < 1e-10);
            CHECK((latent_model(c, tau2, chain).matrix().mat() - want_latent.mat())
                      .cwiseAbs().maxCoeff() < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("saturated DAG gives zero divergence for both models") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Index n = 4 + static_cast<Index>(seed);
    const LocationSet locs = random_unit_square(n, 40 + seed);
    const SymMatrixd c = cov_matrix(KernelSpec(KernelFamily::matern32, 1.5, 0.4), locs);
    const ModelTriple triple = model_triple(c, 0.3, NeighborDag::saturated(n));
    CHECK(std::abs(kl_gaussian(triple.parent, triple.response)) < 1e-10);
    CHECK(std::abs(kl_gaussian(triple.parent, triple.latent)) < 1e-10);
  }
}

TEST_CASE("tau2 = 0 collapses response and latent to the same model") {
  const LocationSet locs = random_unit_square(8, 77);
  const Ordering ord = build_ordering(locs, CoordinateOrder{});
  const NeighborDag dag = build_neighbor_dag(locs, ord, 2);
  const SymMatrixd c = cov_matrix(KernelSpec(KernelFamily::exponential, 1.0, 0.3), reorder(locs, ord));
  const ModelTriple triple = model_triple(c, 0.0, dag);
  CHECK((triple.response.covariance_matrix().mat() - triple.latent.matrix().mat())
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}
