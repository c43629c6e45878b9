#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <memory>
#include <vector>

#include "ivi/mesh.hpp"

namespace ivi {

using SparseMat = Eigen::SparseMatrix<double>;

// Mass and stiffness matrices for piecewise-linear/bilinear Lagrange elements.
// stiffness_neumann carries the natural boundary condition (row sums vanish);
// stiffness_dirichlet has boundary rows and columns cleared with a unit
// diagonal, so boundary values stay pinned at zero under solves.
struct AssembledOperators {
  SparseMat mass;
  SparseMat stiffness_neumann;
  SparseMat stiffness_dirichlet;
  std::vector<int> interior;
};

AssembledOperators assemble_operators(const Mesh& mesh);

// Element-coefficient-weighted stiffness: sum_e int_e kappa grad u . grad v,
// kappa evaluated from nodal values of log-coefficient u_star (kappa = e^u*).
SparseMat assemble_weighted_stiffness(const Mesh& mesh,
                                      const Eigen::VectorXd& u_star);

// Solves A_II x_I = rhs_I with x = 0 on the boundary; the factorization of
// the interior block is cached.
class DirichletSolver {
 public:
  DirichletSolver(const SparseMat& a_full, const std::vector<int>& interior);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs_full) const;
  int full_size() const { return full_size_; }

 private:
  int full_size_ = 0;
  std::vector<int> interior_;
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
};

// Solver for the full (Neumann) operator, used by the prior.
class NeumannSolver {
 public:
  explicit NeumannSolver(const SparseMat& a_full);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  Eigen::SimplicialLDLT<SparseMat> ldlt_;
};

}  // namespace ivi
