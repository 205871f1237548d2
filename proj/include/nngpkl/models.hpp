#pragma once

// Observed-data Gaussian models for a common configuration: the parent GP
// model with covariance C + tau2*I, the response model that applies the
// Vecchia approximation to C + tau2*I itself, and the latent model that
// applies it to C before adding the nugget. Also the three-point closed
// forms the generic pipeline is checked against.

#include <string>
#include <utility>

#include "nngpkl/covariance.hpp"
#include "nngpkl/numerics.hpp"
#include "nngpkl/vecchia.hpp"

namespace nngpkl {

enum class GaussianShape { covariance, precision };

// Mean vector plus either a covariance or a precision matrix, with the
// Cholesky factor of the stored matrix and the covariance log-determinant
// cached at construction (construction therefore also proves the matrix is
// positive definite).
class GaussianModel {
 public:
  static GaussianModel from_covariance(Eigen::VectorXd mean, SymMatrixd sigma) {
    return GaussianModel(std::move(mean), std::move(sigma), GaussianShape::covariance);
  }
  static GaussianModel from_precision(Eigen::VectorXd mean, SymMatrixd q) {
    return GaussianModel(std::move(mean), std::move(q), GaussianShape::precision);
  }
  static GaussianModel from_covariance(SymMatrixd sigma) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(sigma.size());
    return from_covariance(std::move(mean), std::move(sigma));
  }
  static GaussianModel from_precision(SymMatrixd q) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(q.size());
    return from_precision(std::move(mean), std::move(q));
  }

  Index size() const { return matrix_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  GaussianShape shape() const { return shape_; }
  // The stored matrix: covariance or precision depending on shape().
  const SymMatrixd& matrix() const { return matrix_; }
  const CholFactor<double>& factor() const { return factor_; }
  double logdet_cov() const { return logdet_cov_; }

  // Materialized covariance; inverts the stored precision when needed.
  SymMatrixd covariance_matrix() const {
    if (shape_ == GaussianShape::covariance) return matrix_;
    return SymMatrixd(solve(factor_, Eigen::MatrixXd(Eigen::MatrixXd::Identity(size(), size()))));
  }

 private:
  GaussianModel(Eigen::VectorXd mean, SymMatrixd matrix, GaussianShape shape)
      : mean_(std::move(mean)),
        matrix_(std::move(matrix)),
        shape_(shape),
        factor_(cholesky(matrix_)) {
    if (mean_.size() != matrix_.size()) {
      throw DimensionMismatch("GaussianModel: mean length " + std::to_string(mean_.size()) +
                              " does not match matrix size " + std::to_string(matrix_.size()));
    }
    logdet_cov_ = shape_ == GaussianShape::covariance ? factor_.logdet : -factor_.logdet;
  }

  Eigen::VectorXd mean_;
  SymMatrixd matrix_;
  GaussianShape shape_;
  CholFactor<double> factor_;
  double logdet_cov_;
};

// Zero-mean model with covariance C + tau2*I.
inline GaussianModel parent_model(const SymMatrixd& c, double tau2) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("parent_model: tau2 must be >= 0");
  return GaussianModel::from_covariance(add_diagonal(c, tau2));
}

// Vecchia approximation applied to the observed-data covariance K = C +
// tau2*I; kept in precision shape, the way the model is used downstream.
inline GaussianModel response_model(const SymMatrixd& c, double tau2, const NeighborDag& dag) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("response_model: tau2 must be >= 0");
  return GaussianModel::from_precision(
      precision_from_factor(vecchia_factor(add_diagonal(c, tau2), dag)));
}

// Vecchia approximation applied to the latent covariance C, nugget added
// afterwards: covariance Ctilde + tau2*I.
inline GaussianModel latent_model(const SymMatrixd& c, double tau2, const NeighborDag& dag) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("latent_model: tau2 must be >= 0");
  return GaussianModel::from_covariance(
      add_diagonal(cov_from_factor(vecchia_factor(c, dag)), tau2));
}

struct ModelTriple {
  GaussianModel parent;
  GaussianModel response;
  GaussianModel latent;
};

inline ModelTriple model_triple(const SymMatrixd& c, double tau2, const NeighborDag& dag) {
  return {parent_model(c, tau2), response_model(c, tau2, dag), latent_model(c, tau2, dag)};
}

// The three-point chain DAG: node 1 conditions on node 0, node 2 on node 1.
// This is the DAG that reproduces the closed-form matrices below through the
// generic pipeline.
inline NeighborDag three_point_chain_dag() { return NeighborDag(3, {{}, {0}, {1}}); }

// Closed-form observed-data covariances of the two models for three points
// with correlations (rho12, rho13, rho23) under the chain DAG. Both share
// the diagonal sigma2*(1 + delta2) and the entries sigma2*rho12 and
// sigma2*rho23; they differ only at (0,2):
//   response: sigma2 * rho12*rho23 / (1 + delta2)
//   latent:   sigma2 * rho12*rho23
// rho13 drops out of both (the chain replaces it); it only affects the
// parent. Returns (response, latent).
inline std::pair<SymMatrixd, SymMatrixd> three_point_closed_forms(double sigma2, double delta2,
                                                                  const ThreePointCorr& c) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("three_point_closed_forms: sigma2 must be > 0");
  if (!(delta2 >= 0.0)) throw std::invalid_argument("three_point_closed_forms: delta2 must be >= 0");
  const double diag = sigma2 * (1.0 + delta2);
  Eigen::Matrix3d response;
  response << diag, sigma2 * c.rho12, sigma2 * c.rho12 * c.rho23 / (1.0 + delta2),  //
      sigma2 * c.rho12, diag, sigma2 * c.rho23,                                     //
      sigma2 * c.rho12 * c.rho23 / (1.0 + delta2), sigma2 * c.rho23, diag;
  Eigen::Matrix3d latent;
  latent << diag, sigma2 * c.rho12, sigma2 * c.rho12 * c.rho23,  //
      sigma2 * c.rho12, diag, sigma2 * c.rho23,                  //
      sigma2 * c.rho12 * c.rho23, sigma2 * c.rho23, diag;
  return {SymMatrixd(response), SymMatrixd(latent)};
}

}  // namespace nngpkl
