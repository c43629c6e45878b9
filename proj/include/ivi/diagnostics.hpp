#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ivi/posterior.hpp"
#include "ivi/prior.hpp"
#include "ivi/sgd_vi.hpp"

namespace ivi {

enum class CovProvenance { empirical, formula, low_rank, exact };

// Nodal matrix representation of a covariance operator w.r.t. the Lagrange
// basis: entry (i,j) approximates c(x_i, x_j).
struct CovarianceField {
  Eigen::MatrixXd c;
  CovProvenance provenance = CovProvenance::empirical;
};

// Unbiased sample covariance of nodal fields; needs >= 2 samples.
CovarianceField covariance_matrix_repr(
    const std::vector<Eigen::VectorXd>& nodal_samples);
// sum_i s_i e_i e_i^T over all modes.
CovarianceField covariance_matrix_repr(const VariationalPosterior& nu,
                                       const PriorSpectrum& spectrum);
CovarianceField covariance_matrix_repr(const GaussianPosterior& posterior);

// Eigenpairs of the prior-preconditioned Hessian C0^{1/2} H^T G^-1 H C0^{1/2}
// in the prior basis, descending.
struct PphEigenpairs {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd v;  // columns orthonormal in the coefficient space
};

PphEigenpairs prior_preconditioned_hessian(const PriorSpectrum& spectrum,
                                           const Eigen::MatrixXd& H,
                                           const Eigen::VectorXd& gamma_diag);

// c(x,y) ~ c0(x,y) - sum_{k<=r} d_k vt_k(x) vt_k(y), vt_k = C0^{1/2} v_k,
// d_k = lambda_k/(lambda_k + 1). r = full rank reproduces the exact field.
CovarianceField low_rank_posterior_cov_field(const PriorSpectrum& spectrum,
                                             const PphEigenpairs& pairs,
                                             int r);

// {c(x_i, x_{i+k})}; k = 0 is the variance function. 2-D fields use the
// diagonal node pairing (x_i, x_{i+k}) in node index along the grid diagonal.
Eigen::VectorXd variance_covariance_function(const CovarianceField& field,
                                             int k);

// ||A - B||_F^2 / ||B||_F^2 (squared ratio, as the tables are defined).
double frobenius_rel_error(const CovarianceField& a, const CovarianceField& b);

// ||u - u_ref||_M^2 / ||u_ref||_M^2 (squared ratio in the mass norm).
double relative_l2_error(const Eigen::VectorXd& u,
                         const Eigen::VectorXd& u_ref, const SparseMat& mass);

// mean +- z * sqrt(variance) with the two-sided normal quantile.
struct CredibilityBand {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

CredibilityBand credibility_band(const Eigen::VectorXd& mean,
                                 const Eigen::VectorXd& variances,
                                 double level);

double normal_quantile_two_sided(double level);  // 1.959964 at 0.95

}  // namespace ivi
