#include "ivi/posterior.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "ivi/errors.hpp"

namespace ivi {

GaussianPosterior exact_posterior(const PriorSpectrum& spectrum,
                                  const Eigen::MatrixXd& H,
                                  const Eigen::VectorXd& gamma_diag,
                                  const Eigen::VectorXd& d) {
  const int nd = static_cast<int>(H.rows());
  if (gamma_diag.size() != nd || d.size() != nd)
    throw ValidationError("exact_posterior: dimension mismatch");
  if ((gamma_diag.array() <= 0).any())
    throw ValidationError("exact_posterior: Gamma must be positive");

  // Work in the prior basis: H~ = H E, C0 = diag(c).
  const Eigen::MatrixXd ht = H * spectrum.modes;
  const Eigen::VectorXd& c = spectrum.c;
  const Eigen::MatrixXd hc = ht * c.asDiagonal();           // H~ C0
  Eigen::MatrixXd k = hc * ht.transpose();                  // H~ C0 H~^T
  k.diagonal() += gamma_diag;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(k);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("exact_posterior: (Gamma + H C0 H^T) not factorizable");

  GaussianPosterior post;
  post.cov_coeffs = Eigen::MatrixXd(c.asDiagonal());
  post.cov_coeffs -= hc.transpose() * ldlt.solve(hc);
  post.mean_coeffs =
      post.cov_coeffs * (ht.transpose() * (d.array() / gamma_diag.array()).matrix());
  post.mean = spectrum.modes * post.mean_coeffs;
  post.covariance = spectrum.modes * post.cov_coeffs * spectrum.modes.transpose();
  return post;
}

ModeParams hessian_mode_coefficients(const Eigen::MatrixXd& H,
                                     const Eigen::VectorXd& gamma_diag,
                                     const PriorSpectrum& spectrum) {
  ModeParams mp;
  mp.M = spectrum.M;
  mp.a.resize(mp.M);
  mp.c = spectrum.c.head(mp.M);
  mp.a_tilde.resize(mp.M);
  for (int i = 0; i < mp.M; ++i) {
    const Eigen::VectorXd he = H * spectrum.modes.col(i);
    mp.a[i] = (he.array().square() / gamma_diag.array()).sum();
    mp.a_tilde[i] = mp.a[i] + 1.0 / mp.c[i];
  }
  mp.M_prime = mp.M + mp.a.dot(mp.c);
  return mp;
}

double kl_gaussian(const Eigen::VectorXd& s, const ModeParams& params) {
  if (s.size() < params.M)
    throw ValidationError("kl_gaussian: variance vector shorter than M");
  double kl = 0.0;
  for (int i = 0; i < params.M; ++i) {
    if (s[i] <= 0 || params.c[i] <= 0)
      throw ValidationError("kl_gaussian: variances must be positive");
    kl += std::log(params.c[i] / s[i]) + s[i] / params.c[i] + s[i] * params.a[i];
  }
  return 0.5 * kl;
}

double kl_gaussian_dense(const Eigen::VectorXd& mean0,
                         const Eigen::MatrixXd& cov0,
                         const Eigen::VectorXd& mean1,
                         const Eigen::MatrixXd& cov1) {
  const int k = static_cast<int>(mean0.size());
  const Eigen::LLT<Eigen::MatrixXd> llt1(cov1);
  const Eigen::LLT<Eigen::MatrixXd> llt0(cov0);
  if (llt1.info() != Eigen::Success || llt0.info() != Eigen::Success)
    throw NumericError("kl_gaussian_dense: covariance not positive definite");
  const Eigen::VectorXd dm = mean1 - mean0;
  const double trace = llt1.solve(cov0).trace();
  const double quad = dm.dot(llt1.solve(dm));
  double logdet = 0.0;
  for (int i = 0; i < k; ++i)
    logdet += 2.0 * (std::log(llt1.matrixL()(i, i)) - std::log(llt0.matrixL()(i, i)));
  return 0.5 * (trace + quad - k + logdet);
}

double hessian_offdiagonal_ratio(const Eigen::MatrixXd& H,
                                 const Eigen::VectorXd& gamma_diag,
                                 const PriorSpectrum& spectrum) {
  const int m = spectrum.M;
  const Eigen::MatrixXd he = H * spectrum.modes.leftCols(m);
  Eigen::MatrixXd a = he.transpose() *
                      gamma_diag.cwiseInverse().asDiagonal() * he;
  const double total = a.norm();
  if (total == 0) return 0.0;
  a.diagonal().setZero();
  return a.norm() / total;
}

}  // namespace ivi
