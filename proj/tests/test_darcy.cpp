#include <doctest.h>

#include <cmath>

#include "ivi/darcy.hpp"
#include "ivi/errors.hpp"

using namespace ivi;

TEST_SUITE_BEGIN("darcy");

TEST_CASE("zero source kills the linearized map") {
  const Mesh mesh = build_mesh(2, 9);
  const int nn = mesh.node_count();
  const auto lin = linearize_darcy(mesh, Eigen::VectorXd::Zero(nn),
                                   Eigen::VectorXd::Zero(nn), {{0.5, 0.5}});
  CHECK(lin.w0.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
  CHECK(lin.H_lin.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0));
}

TEST_CASE("u*=0 background reduces to the Laplace problem") {
  // -Lap w = f with manufactured w = sin(pi x) sin(pi y)
  double prev = 0.0;
  std::vector<double> errs;
  for (const int n : {9, 17, 33}) {
    const Mesh mesh = build_mesh(2, n);
    const int nn = mesh.node_count();
    Eigen::VectorXd f(nn);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        f[mesh.index(ix, iy)] = 2 * M_PI * M_PI *
                                std::sin(M_PI * mesh.axis[ix]) *
                                std::sin(M_PI * mesh.axis[iy]);
    const auto lin =
        linearize_darcy(mesh, Eigen::VectorXd::Zero(nn), f, {{0.5, 0.5}});
    double err = 0.0;
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        err = std::max(err, std::abs(lin.w0[mesh.index(ix, iy)] -
                                     std::sin(M_PI * mesh.axis[ix]) *
                                         std::sin(M_PI * mesh.axis[iy])));
    errs.push_back(err);
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.35));
  CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("observation row count matches the 20x20 lattice") {
  const Mesh mesh = build_mesh(2, 12);
  const int nn = mesh.node_count();
  Eigen::VectorXd f = Eigen::VectorXd::Ones(nn);
  const auto lin = linearize_darcy(mesh, Eigen::VectorXd::Zero(nn), f,
                                   darcy_observation_points());
  CHECK(lin.H_lin.rows() == 400);
  CHECK(lin.H_lin.cols() == nn);
}

TEST_CASE("adjoint consistency of the assembled H_lin") {
  const Mesh mesh = build_mesh(2, 11);
  const int nn = mesh.node_count();
  Eigen::VectorXd f(nn), ustar(nn);
  Rng rng(4);
  for (int iy = 0; iy < mesh.n; ++iy)
    for (int ix = 0; ix < mesh.n; ++ix) {
      f[mesh.index(ix, iy)] = 1.0 + mesh.axis[ix];
      ustar[mesh.index(ix, iy)] =
          0.3 * std::sin(M_PI * mesh.axis[ix]) * mesh.axis[iy];
    }
  std::vector<Point> pts;
  for (int i = 1; i <= 5; ++i)
    for (int j = 1; j <= 5; ++j) pts.push_back({i / 6.0, j / 6.0});
  const auto lin = linearize_darcy(mesh, ustar, f, pts);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd du(nn), y(static_cast<int>(pts.size()));
    for (int i = 0; i < nn; ++i) du[i] = rng.normal();
    for (int i = 0; i < y.size(); ++i) y[i] = rng.normal();
    const double lhs = (lin.H_lin * du).dot(y);
    const double rhs = du.dot(lin.H_lin.transpose() * y);
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-10);
  }
}

TEST_CASE("H_lin is a genuine linearization of the nonlinear forward") {
  // finite-difference directional derivative of the nonlinear solve
  const Mesh mesh = build_mesh(2, 13);
  const int nn = mesh.node_count();
  const Eigen::VectorXd ustar = Eigen::VectorXd::Zero(nn);
  Eigen::VectorXd f = Eigen::VectorXd::Ones(nn);
  std::vector<Point> pts = {{0.3, 0.6}, {0.7, 0.4}};
  const auto lin = linearize_darcy(mesh, ustar, f, pts);

  const auto ops = assemble_operators(mesh);
  const auto nonlinear_obs = [&](const Eigen::VectorXd& u) {
    const SparseMat kw = assemble_weighted_stiffness(mesh, u);
    DirichletSolver solver(kw, ops.interior);
    return observe(mesh, solver.solve(ops.mass * f), pts);
  };
  Rng rng(9);
  Eigen::VectorXd du(nn);
  for (int i = 0; i < nn; ++i) du[i] = rng.normal();
  const double eps = 1e-5;
  const Eigen::VectorXd fd =
      (nonlinear_obs(ustar + eps * du) - nonlinear_obs(ustar - eps * du)) /
      (2 * eps);
  const Eigen::VectorXd an = lin.H_lin * du;
  CHECK((fd - an).norm() / an.norm() < 1e-4);
}

TEST_CASE("darcy data generation subtracts the coarse background") {
  const Mesh mesh = build_mesh(2, 9);
  const int nn = mesh.node_count();
  Eigen::VectorXd f = Eigen::VectorXd::Ones(nn);
  std::vector<Point> pts = {{0.4, 0.5}};
  const auto lin = linearize_darcy(mesh, Eigen::VectorXd::Zero(nn), f, pts);
  Rng rng(2);
  const auto truth = [](double x, double y) { return 0.0; };
  const auto source = [](double, double) { return 1.0; };
  // truth = 0 and no noise: d_raw observes w0_fine, so d_lin is only the
  // fine-vs-coarse background discrepancy
  const DarcyData data =
      generate_darcy_data(truth, source, 33, mesh, lin, pts, 0.0, rng);
  CHECK(std::abs(data.d_lin[0]) < 5e-4);
  CHECK_THROWS_AS(generate_darcy_data(truth, source, 9, mesh, lin, pts, 0.0, rng),
                  ValidationError);
}

TEST_SUITE_END();
