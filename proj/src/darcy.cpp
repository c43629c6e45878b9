#include "ivi/darcy.hpp"

#include <array>
#include <cmath>

#include "ivi/errors.hpp"

namespace ivi {

namespace {

constexpr double kGauss = 0.57735026918962576;
constexpr std::array<std::array<double, 2>, 4> kGaussPts{
    {{-kGauss, -kGauss}, {kGauss, -kGauss}, {-kGauss, kGauss}, {kGauss, kGauss}}};

struct ShapeEval {
  std::array<double, 4> N, dx, dy;
};

ShapeEval q1_shape(double xi, double eta, double h) {
  ShapeEval s;
  s.N = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
         0.25 * (1 - xi) * (1 + eta), 0.25 * (1 + xi) * (1 + eta)};
  const double g = 2.0 / h;
  s.dx = {-0.25 * (1 - eta) * g, 0.25 * (1 - eta) * g, -0.25 * (1 + eta) * g,
          0.25 * (1 + eta) * g};
  s.dy = {-0.25 * (1 - xi) * g, -0.25 * (1 + xi) * g, 0.25 * (1 - xi) * g,
          0.25 * (1 + xi) * g};
  return s;
}

// B_ij = int kappa phi_j grad(w0) . grad(phi_i); maps du to the linearized
// right-hand side -B du.
SparseMat assemble_gradient_coupling(const Mesh& mesh,
                                     const Eigen::VectorXd& u_star,
                                     const Eigen::VectorXd& w0) {
  const double h = mesh.h;
  const double wdet = (h / 2) * (h / 2);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<size_t>(mesh.element_count()) * 16);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nd = mesh.element_nodes(e);
    for (const auto& gp : kGaussPts) {
      const ShapeEval s = q1_shape(gp[0], gp[1], h);
      double ug = 0.0, gx = 0.0, gy = 0.0;
      for (int a = 0; a < 4; ++a) {
        ug += s.N[a] * u_star[nd[a]];
        gx += s.dx[a] * w0[nd[a]];
        gy += s.dy[a] * w0[nd[a]];
      }
      const double kappa = std::exp(ug);
      for (int a = 0; a < 4; ++a) {
        const double val = wdet * kappa * (s.dx[a] * gx + s.dy[a] * gy);
        for (int b = 0; b < 4; ++b) t.emplace_back(nd[a], nd[b], val * s.N[b]);
      }
    }
  }
  SparseMat b(mesh.node_count(), mesh.node_count());
  b.setFromTriplets(t.begin(), t.end());
  return b;
}

}  // namespace

DarcyLinearization linearize_darcy(const Mesh& mesh2d,
                                   const Eigen::VectorXd& u_star,
                                   const Eigen::VectorXd& f,
                                   const std::vector<Point>& obs_points) {
  if (mesh2d.dimension != 2)
    throw ValidationError("linearize_darcy: 2-D mesh required");
  const int nn = mesh2d.node_count();
  if (u_star.size() != nn || f.size() != nn)
    throw ValidationError("linearize_darcy: field size mismatch");

  DarcyLinearization lin;
  lin.u_star = u_star;
  lin.f = f;
  lin.pde_solve_counter = make_solve_counter();

  const AssembledOperators ops = assemble_operators(mesh2d);
  const SparseMat k_w = assemble_weighted_stiffness(mesh2d, u_star);
  DirichletSolver solver(k_w, ops.interior);

  lin.w0 = solver.solve(ops.mass * f);
  lin.pde_solve_counter->fetch_add(1);

  const SparseMat b = assemble_gradient_coupling(mesh2d, u_star, lin.w0);
  const auto o = observation_matrix(mesh2d, obs_points);
  const Eigen::MatrixXd o_t = Eigen::MatrixXd(o).transpose();

  // H_lin = -O K^{-1} B assembled row-wise through adjoint solves.
  lin.H_lin.resize(static_cast<int>(obs_points.size()), nn);
  for (int r = 0; r < o_t.cols(); ++r) {
    const Eigen::VectorXd z = solver.solve(o_t.col(r));
    lin.pde_solve_counter->fetch_add(1);
    lin.H_lin.row(r) = -(b.transpose() * z).transpose();
  }
  return lin;
}

DarcyData generate_darcy_data(
    const std::function<double(double, double)>& truth,
    const std::function<double(double, double)>& source, int fine_n,
    const Mesh& coarse_mesh, const DarcyLinearization& coarse,
    const std::vector<Point>& obs_points, double noise_pct, Rng& rng,
    bool allow_inverse_crime) {
  if (noise_pct < 0)
    throw ValidationError("generate_darcy_data: noise_pct must be nonnegative");
  if (fine_n <= coarse_mesh.n && !allow_inverse_crime)
    throw ValidationError(
        "generate_darcy_data: fine_n must exceed the inversion mesh size "
        "(inverse crime); pass allow_inverse_crime to override");

  const Mesh fine = build_mesh(2, fine_n);
  const int nn = fine.node_count();
  Eigen::VectorXd u_t(nn), f(nn), u_star = Eigen::VectorXd::Zero(nn);
  for (int iy = 0; iy < fine.n; ++iy)
    for (int ix = 0; ix < fine.n; ++ix) {
      const int id = fine.index(ix, iy);
      u_t[id] = truth(fine.axis[ix], fine.axis[iy]);
      f[id] = source(fine.axis[ix], fine.axis[iy]);
    }

  const AssembledOperators ops = assemble_operators(fine);
  const SparseMat k_w = assemble_weighted_stiffness(fine, u_star);
  DirichletSolver solver(k_w, ops.interior);
  const Eigen::VectorXd w0_f = solver.solve(ops.mass * f);
  const SparseMat b_f = assemble_gradient_coupling(fine, u_star, w0_f);
  const Eigen::VectorXd dw_f = solver.solve(-(b_f * u_t));
  coarse.pde_solve_counter->fetch_add(2);

  DarcyData out;
  out.clean = observe(fine, w0_f + dw_f, obs_points);
  out.tau_inv = std::pow(noise_pct * out.clean.cwiseAbs().maxCoeff(), 2);
  out.d_raw = out.clean;
  const double sd = std::sqrt(out.tau_inv);
  for (int i = 0; i < out.d_raw.size(); ++i) out.d_raw[i] += sd * rng.normal();
  out.d_lin = out.d_raw - observe(coarse_mesh, coarse.w0, obs_points);
  return out;
}

}  // namespace ivi
