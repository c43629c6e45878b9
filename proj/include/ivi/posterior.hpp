#pragma once

#include <Eigen/Dense>

#include "ivi/prior.hpp"

namespace ivi {

// Exact linear-Gaussian posterior, the ground truth for every comparison.
// Both nodal and spectral-coefficient representations are kept.
struct GaussianPosterior {
  Eigen::VectorXd mean;         // nodal
  Eigen::MatrixXd covariance;   // nodal, dense symmetric
  Eigen::VectorXd mean_coeffs;  // in the prior basis
  Eigen::MatrixXd cov_coeffs;   // in the prior basis
};

// C = C0 - C0 H^T (Gamma + H C0 H^T)^{-1} H C0 with C0 represented
// spectrally; mean = C H^T Gamma^{-1} d.
GaussianPosterior exact_posterior(const PriorSpectrum& spectrum,
                                  const Eigen::MatrixXd& H,
                                  const Eigen::VectorXd& gamma_diag,
                                  const Eigen::VectorXd& d);

// Per-mode scalars driving the closed-form eta/S/variance formulas.
struct ModeParams {
  Eigen::VectorXd a;        // Rayleigh quotients e_i^T H^T Gamma^-1 H e_i, i <= M
  Eigen::VectorXd c;        // leading prior eigenvalues, i <= M
  Eigen::VectorXd a_tilde;  // a_i + 1/c_i
  double M_prime = 0.0;     // M + sum a_i c_i
  int M = 0;
};

ModeParams hessian_mode_coefficients(const Eigen::MatrixXd& H,
                                     const Eigen::VectorXd& gamma_diag,
                                     const PriorSpectrum& spectrum);

// Diagonal-model KL divergence D_KL(nu || mu) up to an additive constant:
// 1/2 sum_i [log(c_i/s_i) + s_i/c_i + s_i a_i] over the retained modes.
double kl_gaussian(const Eigen::VectorXd& s, const ModeParams& params);

// Dense two-Gaussian KL for finite-dimensional cross-checks.
double kl_gaussian_dense(const Eigen::VectorXd& mean0,
                         const Eigen::MatrixXd& cov0,
                         const Eigen::VectorXd& mean1,
                         const Eigen::MatrixXd& cov1);

// Off-diagonal mass of the Gauss-Newton Hessian in the prior basis,
// ||A - diag(A)||_F / ||A||_F; reported so the diagonal assumption can be
// judged per problem.
double hessian_offdiagonal_ratio(const Eigen::MatrixXd& H,
                                 const Eigen::VectorXd& gamma_diag,
                                 const PriorSpectrum& spectrum);

}  // namespace ivi
