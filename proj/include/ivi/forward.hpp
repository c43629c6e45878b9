#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "ivi/assembly.hpp"
#include "ivi/mesh.hpp"
#include "ivi/rng.hpp"

namespace ivi {

using SolveCounter = std::shared_ptr<std::atomic<long long>>;

inline SolveCounter make_solve_counter() {
  return std::make_shared<std::atomic<long long>>(0);
}

// Observation operator: rows are piecewise-(bi)linear interpolation weights.
Eigen::SparseMatrix<double> observation_matrix(const Mesh& mesh,
                                               const std::vector<Point>& pts);
Eigen::VectorXd observe(const Mesh& mesh, const Eigen::VectorXd& w,
                        const std::vector<Point>& pts);

// (I - alpha*Lap) w = u with w = 0 on the boundary.
class EllipticProblem {
 public:
  EllipticProblem(const Mesh& mesh, double alpha_pde);

  Eigen::VectorXd solve(const Eigen::VectorXd& u) const;  // counts 1 solve
  const Mesh& mesh() const { return mesh_; }
  const AssembledOperators& operators() const { return ops_; }
  double alpha_pde() const { return alpha_; }
  SolveCounter counter() const { return counter_; }

 private:
  Mesh mesh_;
  double alpha_;
  AssembledOperators ops_;
  std::unique_ptr<DirichletSolver> solver_;
  SolveCounter counter_;
};

// Observation-composed forward map as a dense matrix, with noise model and
// data. gamma_diag holds the diagonal of Gamma_noise.
struct LinearForwardProblem {
  Eigen::MatrixXd H;
  std::vector<Point> observation_points;
  Eigen::VectorXd gamma_diag;
  Eigen::VectorXd data;
  SolveCounter pde_solve_counter;
};

// Column j of H is observe(solve(e_j)).
Eigen::MatrixXd forward_matrix(const EllipticProblem& problem,
                               const std::vector<Point>& pts);

struct GeneratedData {
  Eigen::VectorXd d;
  Eigen::VectorXd clean;       // noiseless fine-mesh observations
  double tau_inv = 0.0;        // noise variance (Gamma = tau_inv * I)
};

// Synthetic observations from a closed-form truth evaluated on a strictly
// finer mesh. Throws unless fine_n > coarse n (inverse-crime guard) or the
// override flag is set.
GeneratedData generate_data(const std::function<double(double)>& truth,
                            int fine_n, const EllipticProblem& coarse,
                            double noise_pct, Rng& rng,
                            bool allow_inverse_crime = false);

// Default observation designs used by the experiments.
std::vector<Point> elliptic1d_observation_points();       // {i/20}, i=1..20
std::vector<Point> darcy_observation_points();            // 20x20 at (i/21, j/21)

}  // namespace ivi
