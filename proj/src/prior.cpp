#include "ivi/prior.hpp"

#include <lapacke.h>

#include <cmath>

#include "ivi/errors.hpp"

namespace ivi {

PriorOperator build_prior(const Mesh& mesh, const AssembledOperators& ops,
                          double alpha_prior) {
  if (alpha_prior <= 0)
    throw ValidationError("build_prior: alpha_prior must be positive");
  PriorOperator prior;
  prior.alpha_prior = alpha_prior;
  prior.neumann_operator = ops.mass + alpha_prior * ops.stiffness_neumann;
  prior.mesh = &mesh;
  return prior;
}

PriorSpectrum prior_spectrum(const PriorOperator& prior,
                             const AssembledOperators& ops, double C_M) {
  if (C_M <= 0.0 || C_M > 1.0)
    throw ValidationError("prior_spectrum: C_M must lie in (0, 1]");
  const int n = static_cast<int>(prior.neumann_operator.rows());

  // dsygvd: A x = lambda B x with B = mass; eigenvectors come back
  // B-orthonormal, i.e. mass-orthonormal, and lambda ascending.
  Eigen::MatrixXd a = Eigen::MatrixXd(prior.neumann_operator);
  Eigen::MatrixXd b = Eigen::MatrixXd(ops.mass);
  Eigen::VectorXd lambda(n);
  const lapack_int info = LAPACKE_dsygvd(
      LAPACK_COL_MAJOR, 1, 'V', 'L', n, a.data(), n, b.data(), n, lambda.data());
  if (info != 0)
    throw NumericError("prior_spectrum: dsygvd failed, info=" +
                       std::to_string(info));

  PriorSpectrum s;
  s.C_M = C_M;
  s.c.resize(n);
  s.modes.resize(n, n);
  // lambda ascending => c = lambda^-2 descending.
  for (int i = 0; i < n; ++i) {
    if (lambda[i] <= 0)
      throw NumericError("prior_spectrum: nonpositive operator eigenvalue");
    s.c[i] = 1.0 / (lambda[i] * lambda[i]);
    s.modes.col(i) = a.col(i);
  }
  s.M = n;
  s.truncation_warning = true;
  for (int m = 0; m < n; ++m) {
    if (s.c[m] / s.c[0] < C_M) {
      s.M = m + 1;  // smallest index with a strict ratio drop
      s.truncation_warning = false;
      break;
    }
  }
  return s;
}

Eigen::VectorXd sample_prior_with(const PriorSpectrum& spectrum,
                                  const Eigen::VectorXd& zeta) {
  if (zeta.size() != spectrum.c.size())
    throw ValidationError("sample_prior: zeta length mismatch");
  return spectrum.modes * (spectrum.c.cwiseSqrt().cwiseProduct(zeta));
}

Eigen::VectorXd sample_prior(const PriorSpectrum& spectrum, Rng& rng) {
  Eigen::VectorXd zeta(spectrum.c.size());
  for (int i = 0; i < zeta.size(); ++i) zeta[i] = rng.normal();
  return sample_prior_with(spectrum, zeta);
}

}  // namespace ivi
