#include "ivi/assembly.hpp"

#include <array>
#include <cmath>

#include "ivi/errors.hpp"

namespace ivi {

namespace {

// Bilinear shape functions and physical gradients on the reference square.
struct ShapeEval {
  std::array<double, 4> N;
  std::array<double, 4> dx;
  std::array<double, 4> dy;
};

ShapeEval q1_shape(double xi, double eta, double h) {
  ShapeEval s;
  s.N = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta),
         0.25 * (1 - xi) * (1 + eta), 0.25 * (1 + xi) * (1 + eta)};
  const double g = 2.0 / h;  // d(xi)/dx
  s.dx = {-0.25 * (1 - eta) * g, 0.25 * (1 - eta) * g, -0.25 * (1 + eta) * g,
          0.25 * (1 + eta) * g};
  s.dy = {-0.25 * (1 - xi) * g, -0.25 * (1 + xi) * g, 0.25 * (1 - xi) * g,
          0.25 * (1 + xi) * g};
  return s;
}

constexpr double kGauss = 0.57735026918962576;  // 1/sqrt(3)
constexpr std::array<std::array<double, 2>, 4> kGaussPts{
    {{-kGauss, -kGauss}, {kGauss, -kGauss}, {-kGauss, kGauss}, {kGauss, kGauss}}};

void assemble_1d(const Mesh& mesh, std::vector<Eigen::Triplet<double>>& tm,
                 std::vector<Eigen::Triplet<double>>& tk) {
  const double h = mesh.h;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nd = mesh.element_nodes(e);
    const double me[2][2] = {{h / 3, h / 6}, {h / 6, h / 3}};
    const double ke[2][2] = {{1 / h, -1 / h}, {-1 / h, 1 / h}};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        tm.emplace_back(nd[a], nd[b], me[a][b]);
        tk.emplace_back(nd[a], nd[b], ke[a][b]);
      }
  }
}

void assemble_2d(const Mesh& mesh, std::vector<Eigen::Triplet<double>>& tm,
                 std::vector<Eigen::Triplet<double>>& tk) {
  const double h = mesh.h;
  const double wdet = (h / 2) * (h / 2);
  double me[4][4] = {};
  double ke[4][4] = {};
  for (const auto& gp : kGaussPts) {
    const ShapeEval s = q1_shape(gp[0], gp[1], h);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        me[a][b] += wdet * s.N[a] * s.N[b];
        ke[a][b] += wdet * (s.dx[a] * s.dx[b] + s.dy[a] * s.dy[b]);
      }
  }
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nd = mesh.element_nodes(e);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        tm.emplace_back(nd[a], nd[b], me[a][b]);
        tk.emplace_back(nd[a], nd[b], ke[a][b]);
      }
  }
}

SparseMat dirichlet_clear(const SparseMat& k, const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(k.nonZeros());
  for (int col = 0; col < k.outerSize(); ++col)
    for (SparseMat::InnerIterator it(k, col); it; ++it) {
      const bool rb = mesh.is_boundary(static_cast<int>(it.row()));
      const bool cb = mesh.is_boundary(static_cast<int>(it.col()));
      if (!rb && !cb) t.emplace_back(it.row(), it.col(), it.value());
    }
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.is_boundary(i)) t.emplace_back(i, i, 1.0);
  SparseMat out(k.rows(), k.cols());
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

}  // namespace

AssembledOperators assemble_operators(const Mesh& mesh) {
  std::vector<Eigen::Triplet<double>> tm, tk;
  if (mesh.dimension == 1)
    assemble_1d(mesh, tm, tk);
  else
    assemble_2d(mesh, tm, tk);
  const int nn = mesh.node_count();
  AssembledOperators ops;
  ops.mass.resize(nn, nn);
  ops.mass.setFromTriplets(tm.begin(), tm.end());
  ops.stiffness_neumann.resize(nn, nn);
  ops.stiffness_neumann.setFromTriplets(tk.begin(), tk.end());
  ops.stiffness_dirichlet = dirichlet_clear(ops.stiffness_neumann, mesh);
  ops.interior = mesh.interior_nodes();
  return ops;
}

SparseMat assemble_weighted_stiffness(const Mesh& mesh,
                                      const Eigen::VectorXd& u_star) {
  if (mesh.dimension != 2)
    throw ValidationError("weighted stiffness is a 2-D assembly");
  if (u_star.size() != mesh.node_count())
    throw ValidationError("u_star length must match the node count");
  const double h = mesh.h;
  const double wdet = (h / 2) * (h / 2);
  std::vector<Eigen::Triplet<double>> tk;
  tk.reserve(static_cast<size_t>(mesh.element_count()) * 16);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto nd = mesh.element_nodes(e);
    for (const auto& gp : kGaussPts) {
      const ShapeEval s = q1_shape(gp[0], gp[1], h);
      double ug = 0.0;
      for (int a = 0; a < 4; ++a) ug += s.N[a] * u_star[nd[a]];
      const double kappa = std::exp(ug);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          tk.emplace_back(nd[a], nd[b],
                          wdet * kappa * (s.dx[a] * s.dx[b] + s.dy[a] * s.dy[b]));
    }
  }
  SparseMat out(mesh.node_count(), mesh.node_count());
  out.setFromTriplets(tk.begin(), tk.end());
  return out;
}

DirichletSolver::DirichletSolver(const SparseMat& a_full,
                                 const std::vector<int>& interior)
    : full_size_(static_cast<int>(a_full.rows())), interior_(interior) {
  std::vector<int> map(full_size_, -1);
  for (size_t i = 0; i < interior_.size(); ++i) map[interior_[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> t;
  for (int col = 0; col < a_full.outerSize(); ++col)
    for (SparseMat::InnerIterator it(a_full, col); it; ++it) {
      const int r = map[static_cast<int>(it.row())];
      const int c = map[static_cast<int>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  SparseMat a_ii(interior_.size(), interior_.size());
  a_ii.setFromTriplets(t.begin(), t.end());
  ldlt_.compute(a_ii);
  if (ldlt_.info() != Eigen::Success)
    throw NumericError("DirichletSolver: factorization failed");
}

Eigen::VectorXd DirichletSolver::solve(const Eigen::VectorXd& rhs_full) const {
  if (rhs_full.size() != full_size_)
    throw ValidationError("DirichletSolver: rhs size mismatch");
  Eigen::VectorXd rhs_i(interior_.size());
  for (size_t i = 0; i < interior_.size(); ++i) rhs_i[i] = rhs_full[interior_[i]];
  const Eigen::VectorXd x_i = ldlt_.solve(rhs_i);
  if (ldlt_.info() != Eigen::Success)
    throw NumericError("DirichletSolver: solve failed");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(full_size_);
  for (size_t i = 0; i < interior_.size(); ++i) x[interior_[i]] = x_i[i];
  return x;
}

NeumannSolver::NeumannSolver(const SparseMat& a_full) {
  ldlt_.compute(a_full);
  if (ldlt_.info() != Eigen::Success)
    throw NumericError("NeumannSolver: factorization failed");
}

Eigen::VectorXd NeumannSolver::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = ldlt_.solve(rhs);
  if (ldlt_.info() != Eigen::Success)
    throw NumericError("NeumannSolver: solve failed");
  return x;
}

}  // namespace ivi
