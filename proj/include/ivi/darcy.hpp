#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "ivi/forward.hpp"

namespace ivi {

// Linearization of the steady-state Darcy forward map around u_star:
//   -div(e^{u*} grad dw) = div(e^{u*} du grad w0),  dw = 0 on the boundary,
// with w0 the background pressure solve of -div(e^{u*} grad w0) = f.
struct DarcyLinearization {
  Eigen::VectorXd u_star;
  Eigen::VectorXd f;
  Eigen::VectorXd w0;
  Eigen::MatrixXd H_lin;  // observation count x node count
  SolveCounter pde_solve_counter;
};

DarcyLinearization linearize_darcy(const Mesh& mesh2d,
                                   const Eigen::VectorXd& u_star,
                                   const Eigen::VectorXd& f,
                                   const std::vector<Point>& obs_points);

struct DarcyData {
  Eigen::VectorXd d_raw;    // noisy observations of w0 + dw on the fine mesh
  Eigen::VectorXd d_lin;    // d_raw minus coarse background observations
  Eigen::VectorXd clean;
  double tau_inv = 0.0;
};

// Data for the linearized problem, generated on a strictly finer mesh from
// the same linearized model (the paper's d = F(u*) + dw + eps form):
//   clean = O_f(w0_f + H_lin,f u_truth).
DarcyData generate_darcy_data(
    const std::function<double(double, double)>& truth,
    const std::function<double(double, double)>& source, int fine_n,
    const Mesh& coarse_mesh, const DarcyLinearization& coarse,
    const std::vector<Point>& obs_points, double noise_pct, Rng& rng,
    bool allow_inverse_crime = false);

}  // namespace ivi
