#include "ivi/diagnostics.hpp"

#include <cmath>

#include "ivi/errors.hpp"

namespace ivi {

CovarianceField covariance_matrix_repr(
    const std::vector<Eigen::VectorXd>& nodal_samples) {
  if (nodal_samples.size() < 2)
    throw ValidationError("covariance_matrix_repr: need at least 2 samples");
  const int n = static_cast<int>(nodal_samples.front().size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (const auto& s : nodal_samples) mean += s;
  mean /= static_cast<double>(nodal_samples.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (const auto& s : nodal_samples) {
    const Eigen::VectorXd d = s - mean;
    cov.noalias() += d * d.transpose();
  }
  cov /= static_cast<double>(nodal_samples.size()) - 1.0;
  return {cov, CovProvenance::empirical};
}

CovarianceField covariance_matrix_repr(const VariationalPosterior& nu,
                                       const PriorSpectrum& spectrum) {
  const Eigen::MatrixXd c =
      spectrum.modes * nu.s.asDiagonal() * spectrum.modes.transpose();
  return {c, CovProvenance::formula};
}

CovarianceField covariance_matrix_repr(const GaussianPosterior& posterior) {
  return {posterior.covariance, CovProvenance::exact};
}

PphEigenpairs prior_preconditioned_hessian(const PriorSpectrum& spectrum,
                                           const Eigen::MatrixXd& H,
                                           const Eigen::VectorXd& gamma_diag) {
  const Eigen::MatrixXd ht = H * spectrum.modes;
  const Eigen::MatrixXd hs = ht * spectrum.c.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd s =
      hs.transpose() * gamma_diag.cwiseInverse().asDiagonal() * hs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  if (eig.info() != Eigen::Success)
    throw NumericError("prior_preconditioned_hessian: eigensolver failed");
  PphEigenpairs out;
  const int n = static_cast<int>(s.rows());
  out.lambda.resize(n);
  out.v.resize(n, n);
  for (int i = 0; i < n; ++i) {  // descending; the operator is PSD, so
    out.lambda[i] = std::max(0.0, eig.eigenvalues()[n - 1 - i]);
    out.v.col(i) = eig.eigenvectors().col(n - 1 - i);
  }
  return out;
}

CovarianceField low_rank_posterior_cov_field(const PriorSpectrum& spectrum,
                                             const PphEigenpairs& pairs,
                                             int r) {
  if (r < 0 || r > pairs.lambda.size())
    throw ValidationError("low_rank_posterior_cov_field: bad rank");
  Eigen::MatrixXd coeff = Eigen::MatrixXd(spectrum.c.asDiagonal());
  const Eigen::VectorXd sqrt_c = spectrum.c.cwiseSqrt();
  for (int k = 0; k < r; ++k) {
    const double dk = pairs.lambda[k] / (pairs.lambda[k] + 1.0);
    const Eigen::VectorXd vt = sqrt_c.cwiseProduct(pairs.v.col(k));
    coeff.noalias() -= dk * vt * vt.transpose();
  }
  const Eigen::MatrixXd c =
      spectrum.modes * coeff * spectrum.modes.transpose();
  return {c, CovProvenance::low_rank};
}

Eigen::VectorXd variance_covariance_function(const CovarianceField& field,
                                             int k) {
  const int n = static_cast<int>(field.c.rows());
  if (k < 0 || k >= n)
    throw ValidationError("variance_covariance_function: offset out of range");
  Eigen::VectorXd out(n - k);
  for (int i = 0; i < n - k; ++i) out[i] = field.c(i, i + k);
  return out;
}

double frobenius_rel_error(const CovarianceField& a, const CovarianceField& b) {
  if (a.c.rows() != b.c.rows() || a.c.cols() != b.c.cols())
    throw ValidationError("frobenius_rel_error: shape mismatch");
  const double denom = b.c.squaredNorm();
  if (denom == 0.0)
    throw ValidationError("frobenius_rel_error: reference field is zero");
  return (a.c - b.c).squaredNorm() / denom;
}

double relative_l2_error(const Eigen::VectorXd& u,
                         const Eigen::VectorXd& u_ref, const SparseMat& mass) {
  const double denom = u_ref.dot(mass * u_ref);
  if (denom == 0.0)
    throw ValidationError("relative_l2_error: reference function is zero");
  const Eigen::VectorXd d = u - u_ref;
  return d.dot(mass * d) / denom;
}

double normal_quantile_two_sided(double level) {
  if (level <= 0.0 || level >= 1.0)
    throw ValidationError("normal quantile: level must lie in (0,1)");
  // Invert Phi(x) = (1 + erf(x/sqrt2))/2 at (1+level)/2 by bisection.
  const double target = 0.5 * (1.0 + level);
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double cdf = 0.5 * (1.0 + std::erf(mid / std::sqrt(2.0)));
    if (cdf < target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

CredibilityBand credibility_band(const Eigen::VectorXd& mean,
                                 const Eigen::VectorXd& variances,
                                 double level) {
  if ((variances.array() < 0).any())
    throw ValidationError("credibility_band: negative variance");
  const double z = normal_quantile_two_sided(level);
  CredibilityBand band;
  band.lower = mean - z * variances.cwiseSqrt();
  band.upper = mean + z * variances.cwiseSqrt();
  return band;
}

}  // namespace ivi
