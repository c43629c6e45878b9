#include "ivi/forward.hpp"

#include <cmath>

#include "ivi/errors.hpp"

namespace ivi {

namespace {

void check_point(const Mesh& mesh, const Point& p) {
  const bool ok1 = p.x >= 0.0 && p.x <= 1.0;
  const bool ok2 = mesh.dimension == 1 || (p.y >= 0.0 && p.y <= 1.0);
  if (!ok1 || !ok2)
    throw ValidationError("observe: point outside the domain");
}

}  // namespace

Eigen::SparseMatrix<double> observation_matrix(const Mesh& mesh,
                                               const std::vector<Point>& pts) {
  std::vector<Eigen::Triplet<double>> t;
  const double h = mesh.h;
  const int n = mesh.n;
  for (size_t r = 0; r < pts.size(); ++r) {
    check_point(mesh, pts[r]);
    const int jx = std::min(static_cast<int>(pts[r].x / h), n - 2);
    const double tx = (pts[r].x - mesh.axis[jx]) / h;
    if (mesh.dimension == 1) {
      t.emplace_back(r, jx, 1 - tx);
      t.emplace_back(r, jx + 1, tx);
    } else {
      const int jy = std::min(static_cast<int>(pts[r].y / h), n - 2);
      const double ty = (pts[r].y - mesh.axis[jy]) / h;
      t.emplace_back(r, mesh.index(jx, jy), (1 - tx) * (1 - ty));
      t.emplace_back(r, mesh.index(jx + 1, jy), tx * (1 - ty));
      t.emplace_back(r, mesh.index(jx, jy + 1), (1 - tx) * ty);
      t.emplace_back(r, mesh.index(jx + 1, jy + 1), tx * ty);
    }
  }
  Eigen::SparseMatrix<double> o(pts.size(), mesh.node_count());
  o.setFromTriplets(t.begin(), t.end());
  return o;
}

Eigen::VectorXd observe(const Mesh& mesh, const Eigen::VectorXd& w,
                        const std::vector<Point>& pts) {
  if (w.size() != mesh.node_count())
    throw ValidationError("observe: field size mismatch");
  return observation_matrix(mesh, pts) * w;
}

EllipticProblem::EllipticProblem(const Mesh& mesh, double alpha_pde)
    : mesh_(mesh), alpha_(alpha_pde), counter_(make_solve_counter()) {
  if (alpha_pde <= 0)
    throw ValidationError("EllipticProblem: alpha_pde must be positive");
  ops_ = assemble_operators(mesh_);
  const SparseMat a = ops_.mass + alpha_ * ops_.stiffness_neumann;
  solver_ = std::make_unique<DirichletSolver>(a, ops_.interior);
}

Eigen::VectorXd EllipticProblem::solve(const Eigen::VectorXd& u) const {
  if (u.size() != mesh_.node_count())
    throw ValidationError("solve: source size mismatch");
  counter_->fetch_add(1);
  return solver_->solve(ops_.mass * u);
}

Eigen::MatrixXd forward_matrix(const EllipticProblem& problem,
                               const std::vector<Point>& pts) {
  const int nn = problem.mesh().node_count();
  const auto o = observation_matrix(problem.mesh(), pts);
  Eigen::MatrixXd h(pts.size(), nn);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(nn);
  for (int j = 0; j < nn; ++j) {
    e[j] = 1.0;
    h.col(j) = o * problem.solve(e);
    e[j] = 0.0;
  }
  return h;
}

GeneratedData generate_data(const std::function<double(double)>& truth,
                            int fine_n, const EllipticProblem& coarse,
                            double noise_pct, Rng& rng,
                            bool allow_inverse_crime) {
  if (noise_pct < 0)
    throw ValidationError("generate_data: noise_pct must be nonnegative");
  if (fine_n <= coarse.mesh().n && !allow_inverse_crime)
    throw ValidationError(
        "generate_data: fine_n must exceed the inversion mesh size "
        "(inverse crime); pass allow_inverse_crime to override");
  const Mesh fine = build_mesh(1, fine_n);
  EllipticProblem fine_problem(fine, coarse.alpha_pde());
  Eigen::VectorXd u(fine.node_count());
  for (int i = 0; i < fine.node_count(); ++i) u[i] = truth(fine.axis[i]);
  const Eigen::VectorXd w = fine_problem.solve(u);
  GeneratedData out;
  out.clean = observe(fine, w, elliptic1d_observation_points());
  out.tau_inv = std::pow(noise_pct * out.clean.cwiseAbs().maxCoeff(), 2);
  out.d = out.clean;
  const double sd = std::sqrt(out.tau_inv);
  for (int i = 0; i < out.d.size(); ++i) out.d[i] += sd * rng.normal();
  coarse.counter()->fetch_add(1);  // one fine-mesh solve charged to the setup
  return out;
}

std::vector<Point> elliptic1d_observation_points() {
  std::vector<Point> pts;
  for (int i = 1; i <= 20; ++i) pts.push_back({i / 20.0, 0.0});
  return pts;
}

std::vector<Point> darcy_observation_points() {
  std::vector<Point> pts;
  for (int j = 1; j <= 20; ++j)
    for (int i = 1; i <= 20; ++i) pts.push_back({i / 21.0, j / 21.0});
  return pts;
}

}  // namespace ivi
