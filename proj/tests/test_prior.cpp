#include <doctest.h>

#include <cmath>

#include "ivi/errors.hpp"
#include "ivi/prior.hpp"

using namespace ivi;

namespace {

struct PriorFixture {
  Mesh mesh;
  AssembledOperators ops;
  PriorOperator prior;
  PriorSpectrum spectrum;
  PriorFixture(int n, double alpha, double cm, int dim = 1)
      : mesh(build_mesh(dim, n)),
        ops(assemble_operators(mesh)),
        prior(build_prior(mesh, ops, alpha)),
        spectrum(prior_spectrum(prior, ops, cm)) {}
};

}  // namespace

TEST_SUITE_BEGIN("prior");

TEST_CASE("alpha must be positive") {
  const Mesh mesh = build_mesh(1, 10);
  const auto ops = assemble_operators(mesh);
  CHECK_THROWS_AS(build_prior(mesh, ops, 0.0), ValidationError);
}

TEST_CASE("constant mode keeps eigenvalue one for any alpha") {
  for (const double alpha : {0.05, 10.0, 1000.0}) {
    PriorFixture f(40, alpha, 1e-3);
    // largest c is the constant mode: lambda = 1 up to solver roundoff,
    // which grows with the conditioning of M + alpha*K
    CHECK(f.spectrum.c[0] == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("mass-orthonormality of the modes") {
  PriorFixture f(60, 0.05, 1e-3);
  const Eigen::MatrixXd gram =
      f.spectrum.modes.transpose() * f.ops.mass * f.spectrum.modes;
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(60, 60);
  CHECK((gram - eye).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("eigenvalues descend and match the continuous operator") {
  PriorFixture f(100, 0.05, 1e-3);
  for (int i = 1; i < f.spectrum.c.size(); ++i)
    CHECK(f.spectrum.c[i] <= f.spectrum.c[i - 1] + 1e-15);
  // low modes track (1 + alpha (k pi)^2)^{-2}
  for (int k = 1; k <= 4; ++k) {
    const double cont = std::pow(1.0 + 0.05 * k * k * M_PI * M_PI, -2.0);
    CHECK(f.spectrum.c[k] == doctest::Approx(cont).epsilon(2e-3));
  }
}

TEST_CASE("spectral consistency: two Neumann solves reproduce c_i e_i") {
  PriorFixture f(50, 0.05, 1e-3);
  const NeumannSolver solver(f.prior.neumann_operator);
  for (const int i : {0, 3, 10}) {
    const Eigen::VectorXd e = f.spectrum.modes.col(i);
    const Eigen::VectorXd once = solver.solve(f.ops.mass * e);
    const Eigen::VectorXd twice = solver.solve(f.ops.mass * once);
    CHECK((twice - f.spectrum.c[i] * e).norm() / (f.spectrum.c[i] * e.norm()) <
          1e-8);
  }
}

TEST_CASE("truncation level for the paper settings") {
  PriorFixture f(100, 0.05, 1e-3);
  // The generalized FEM eigenproblem puts the c_m/c_1 < 1e-3 crossing at
  // m = 9; the paper's Fig. 1 reports M = 97 under an operator
  // normalization it never states. See the acceptance suite, criterion 9.
  CHECK(f.spectrum.M == 9);
  CHECK_FALSE(f.spectrum.truncation_warning);
}

TEST_CASE("strict-inequality convention at C_M = 1") {
  PriorFixture f(30, 0.05, 1.0);
  // c_1/c_1 = 1 is not < 1; the first strictly smaller eigenvalue qualifies.
  CHECK(f.spectrum.M == 2);
}

TEST_CASE("truncation is monotone in C_M") {
  const Mesh mesh = build_mesh(1, 40);
  const auto ops = assemble_operators(mesh);
  const auto prior = build_prior(mesh, ops, 0.05);
  int prev = 1 << 30;
  for (const double cm : {1e-6, 1e-4, 1e-2, 0.5, 1.0}) {
    const auto s = prior_spectrum(prior, ops, cm);
    CHECK(s.M <= prev);
    prev = s.M;
  }
}

TEST_CASE("degenerate zeta gives the zero field") {
  PriorFixture f(20, 0.05, 1e-3);
  const Eigen::VectorXd u =
      sample_prior_with(f.spectrum, Eigen::VectorXd::Zero(20));
  CHECK(u.norm() == doctest::Approx(0.0));
}

TEST_CASE("equal seeds give identical fields") {
  PriorFixture f(25, 0.05, 1e-3);
  Rng a(42), b(42);
  const Eigen::VectorXd ua = sample_prior(f.spectrum, a);
  const Eigen::VectorXd ub = sample_prior(f.spectrum, b);
  CHECK((ua - ub).norm() == 0.0);
}

TEST_CASE("empirical mode variances match the eigenvalues") {
  PriorFixture f(60, 0.05, 1e-3);
  Rng rng(123);
  const int draws = 100000;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
  Eigen::VectorXd sum2 = Eigen::VectorXd::Zero(3);
  const int idx[3] = {0, 4, 19};  // modes 1, 5, 20
  Eigen::MatrixXd proj(3, 60);
  for (int j = 0; j < 3; ++j)
    proj.row(j) = (f.ops.mass * f.spectrum.modes.col(idx[j])).transpose();
  for (int k = 0; k < draws; ++k) {
    const Eigen::VectorXd u = sample_prior(f.spectrum, rng);
    const Eigen::Vector3d coef = proj * u;
    sum += coef;
    sum2 += coef.cwiseAbs2();
  }
  for (int j = 0; j < 3; ++j) {
    const double var = (sum2[j] - sum[j] * sum[j] / draws) / (draws - 1);
    CHECK(var == doctest::Approx(f.spectrum.c[idx[j]]).epsilon(0.05));
  }
}

TEST_SUITE_END();
