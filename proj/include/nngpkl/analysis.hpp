#pragma once

// Shrinkage analysis of the Vecchia approximation error. With E the error of
// approximating C^-1, the exact collapsed-space precision difference
//   (C + tau2 I)^-1 - (Ctilde + tau2 I)^-1
// has leading term B = (I + tau2 Ctilde^-1)^-1 E (I + tau2 Ctilde^-1)^-1,
// whose Frobenius norm never exceeds that of E (strictly smaller for
// tau2 > 0): the latent model shrinks the approximation error.

#include <string>

#include "nngpkl/numerics.hpp"
#include "nngpkl/vecchia.hpp"

namespace nngpkl {

// E = C^-1 - Ctilde^-1.
inline SymMatrixd error_matrix(const SymMatrixd& c, const NeighborDag& dag) {
  return inverse(c) - precision_from_factor(vecchia_factor(c, dag));
}

// B = S E S with S = (I + tau2 * c_tilde_prec)^-1, computed through linear
// solves with I + tau2 * c_tilde_prec rather than an explicit inverse. For
// tau2 = 0 this returns E unchanged.
inline SymMatrixd leading_term(const SymMatrixd& c_tilde_prec, double tau2, const SymMatrixd& e) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("leading_term: tau2 must be >= 0");
  if (c_tilde_prec.size() != e.size()) {
    throw DimensionMismatch("leading_term: precision and error matrix sizes differ");
  }
  const SymMatrixd scale = add_diagonal(tau2 * c_tilde_prec, 1.0);
  const CholFactor<double> f = cholesky(scale);
  const Eigen::MatrixXd half = solve(f, e.mat());           // S E
  return SymMatrixd(solve(f, Eigen::MatrixXd(half.transpose())));  // S E^T S^T = S E S
}

// Numerical check of the identity I - Ctilde^-1 (Ctilde^-1 + tau^-2 I)^-1 =
// (I + tau2 Ctilde^-1)^-1 that turns the exact-difference expansion into the
// shrunken form of the leading term. Returns the max-entry deviation between
// the two sides; well-conditioned inputs stay below 1e-9.
inline double spectral_identity_check(const SymMatrixd& c_tilde_prec, double tau2) {
  if (!(tau2 > 0.0)) throw std::invalid_argument("spectral_identity_check: tau2 must be > 0");
  const Index n = c_tilde_prec.size();
  const SymMatrixd m_star = add_diagonal(c_tilde_prec, 1.0 / tau2);
  const Eigen::MatrixXd lhs =
      Eigen::MatrixXd::Identity(n, n) - c_tilde_prec.mat() * inverse(m_star).mat();
  const Eigen::MatrixXd rhs = inverse(add_diagonal(tau2 * c_tilde_prec, 1.0)).mat();
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

// Delta = (C + tau2 I)^-1 - (Ctilde + tau2 I)^-1, the exact collapsed-space
// precision difference between the parent and latent models.
inline SymMatrixd exact_difference(const SymMatrixd& c, double tau2, const NeighborDag& dag) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("exact_difference: tau2 must be >= 0");
  const SymMatrixd cov_latent = cov_from_factor(vecchia_factor(c, dag));
  return inverse(add_diagonal(c, tau2)) - inverse(add_diagonal(cov_latent, tau2));
}

// The matrices behind one shrinkage evaluation. m_exact and m_approx involve
// tau^-2, so this assembly requires tau2 > 0; the report below also covers
// tau2 = 0 by computing its pieces directly.
struct ShrinkageIntermediates {
  SymMatrixd error;       // E = C^-1 - Ctilde^-1
  SymMatrixd m_exact;     // C^-1 + tau^-2 I
  SymMatrixd m_approx;    // Ctilde^-1 + tau^-2 I
  SymMatrixd leading;     // B
  SymMatrixd difference;  // Delta
};

inline ShrinkageIntermediates shrinkage_intermediates(const SymMatrixd& c, double tau2,
                                                      const NeighborDag& dag) {
  if (!(tau2 > 0.0)) throw std::invalid_argument("shrinkage_intermediates: tau2 must be > 0");
  const SymMatrixd prec_exact = inverse(c);
  const VecchiaFactor factor = vecchia_factor(c, dag);
  const SymMatrixd prec_approx = precision_from_factor(factor);
  const SymMatrixd error = prec_exact - prec_approx;
  return {error, add_diagonal(prec_exact, 1.0 / tau2), add_diagonal(prec_approx, 1.0 / tau2),
          leading_term(prec_approx, tau2, error),
          inverse(add_diagonal(c, tau2)) - inverse(add_diagonal(cov_from_factor(factor), tau2))};
}

// Frobenius norms of E, B, Delta and Delta - B with the derived ratios.
// bound_holds records norm_b <= norm_e up to 1e-12 relative slack; it is a
// theorem for this construction, so a false value is a bug. The spectral
// norms are carried as observational fields only, never asserted.
struct ShrinkageReport {
  double norm_e;
  double norm_b;
  double norm_delta;
  double norm_remainder;
  double ratio_shrink;     // norm_b / norm_e
  double ratio_remainder;  // norm_remainder / norm_e^2
  double norm_e_spectral;
  double norm_b_spectral;
  bool bound_holds;
};

inline double spectral_norm(const SymMatrixd& a) {
  const EigDecomp<double> eig = sym_eig(a);
  return eig.values.cwiseAbs().maxCoeff();
}

inline ShrinkageReport shrinkage_report(const SymMatrixd& c, double tau2, const NeighborDag& dag) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("shrinkage_report: tau2 must be >= 0");
  const VecchiaFactor factor = vecchia_factor(c, dag);
  const SymMatrixd prec_approx = precision_from_factor(factor);
  const SymMatrixd error = inverse(c) - prec_approx;
  const SymMatrixd leading = leading_term(prec_approx, tau2, error);
  const SymMatrixd difference =
      inverse(add_diagonal(c, tau2)) - inverse(add_diagonal(cov_from_factor(factor), tau2));

  ShrinkageReport r;
  r.norm_e = frobenius_norm(error);
  r.norm_b = frobenius_norm(leading);
  r.norm_delta = frobenius_norm(difference);
  r.norm_remainder = frobenius_norm(difference - leading);
  r.ratio_shrink = r.norm_b / r.norm_e;
  r.ratio_remainder = r.norm_remainder / (r.norm_e * r.norm_e);
  r.norm_e_spectral = spectral_norm(error);
  r.norm_b_spectral = spectral_norm(leading);
  r.bound_holds = r.norm_b <= r.norm_e * (1.0 + 1e-12);
  return r;
}

// || K^-1 - Ktilde^-1 ||_F with K = C + tau2 I: the corresponding error for
// the response model. Reported alongside shrinkage output as an observational
// column; its closeness to ||E||_F is a heuristic, so it is never asserted.
inline double response_error_norm(const SymMatrixd& c, double tau2, const NeighborDag& dag) {
  if (!(tau2 >= 0.0)) throw std::invalid_argument("response_error_norm: tau2 must be >= 0");
  const SymMatrixd k = add_diagonal(c, tau2);
  return frobenius_norm(inverse(k) - precision_from_factor(vecchia_factor(k, dag)));
}

}  // namespace nngpkl
