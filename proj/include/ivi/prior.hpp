#pragma once

#include <Eigen/Dense>

#include "ivi/assembly.hpp"
#include "ivi/mesh.hpp"
#include "ivi/rng.hpp"

namespace ivi {

// Discrete (I - alpha*Lap) with the natural (zero-Neumann) boundary
// condition; the prior covariance C0 = (I - alpha*Lap)^{-2} acts through two
// solves with this operator in the mass inner product.
struct PriorOperator {
  double alpha_prior = 0.0;
  SparseMat neumann_operator;  // M + alpha*K_neumann
  const Mesh* mesh = nullptr;
};

PriorOperator build_prior(const Mesh& mesh, const AssembledOperators& ops,
                          double alpha_prior);

// Eigensystem of C0 under the mass inner product. Columns of `modes` are
// mass-orthonormal; c is strictly positive and nonincreasing.
struct PriorSpectrum {
  Eigen::VectorXd c;       // all node_count eigenvalues, descending
  Eigen::MatrixXd modes;   // node_count x node_count
  int M = 0;               // truncation level
  double C_M = 0.0;
  bool truncation_warning = false;  // no index satisfied c_m/c_1 < C_M
};

// Generalized symmetric eigenproblem (M + alpha*K) e = lambda M e; c = 1/lambda^2.
// M = min{m : c_m/c_1 < C_M} (strict); fallback M = node count with a warning
// flag when no index qualifies.
PriorSpectrum prior_spectrum(const PriorOperator& prior,
                             const AssembledOperators& ops, double C_M);

// u = sum_i sqrt(c_i) zeta_i e_i over all retained modes.
Eigen::VectorXd sample_prior(const PriorSpectrum& spectrum, Rng& rng);
// Deterministic variant taking the standard-normal vector explicitly.
Eigen::VectorXd sample_prior_with(const PriorSpectrum& spectrum,
                                  const Eigen::VectorXd& zeta);

}  // namespace ivi
