#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "ivi/forward.hpp"
#include "ivi/posterior.hpp"
#include "ivi/prior.hpp"
#include "ivi/rng.hpp"

namespace ivi {

// Engineered gradient-noise covariance C_GN = C0*Q in the prior basis.
struct GradientNoiseSpec {
  double S = 1.0;
  Eigen::VectorXd q;  // eigenvalues of Q for modes <= M (q_i > 0)
};

// Diagonal preconditioner in the prior basis.
struct PreconditionerSpec {
  Eigen::VectorXd t;    // t_i > 0
  Eigen::VectorXd tau;  // tau_i = t_i * a~_i
  double tau_max = 0.0;
};

PreconditionerSpec identity_preconditioner(const ModeParams& mp);
PreconditionerSpec hessian_inverse_preconditioner(const ModeParams& mp);  // t_i = 1/a~_i

struct LearningRateReport {
  double eta_dagger = 0.0;
  double S_used = 0.0;
  double omega_bound = 0.0;  // 2/a~_max or 2/tau_max
  int fixed_point_iterations = 0;
  bool converged = false;
};

// g_i = a~_i (u_i - ubar_i), the quadratic-model gradient in the prior basis.
Eigen::VectorXd full_gradient(const Eigen::VectorXd& u, const ModeParams& mp,
                              const Eigen::VectorXd& u_bar);

// G~_S(u) = G(u) - (1/sqrt(S)) xi, xi_i = sqrt(c_i q_i) zeta_i.
Eigen::VectorXd stochastic_gradient(const Eigen::VectorXd& u,
                                    const ModeParams& mp,
                                    const Eigen::VectorXd& u_bar,
                                    const GradientNoiseSpec& spec, Rng& rng);

// s_i = eta t_i c_i q_i / (S^2 (2 a~_i - eta t_i a~_i^2)); throws
// StabilityError naming the first mode with eta t_i a~_i >= 2.
Eigen::VectorXd stationary_variance(double eta, double S, const ModeParams& mp,
                                    const GradientNoiseSpec& noise,
                                    const PreconditionerSpec* precond = nullptr);

// Closed forms of Theorems 2.5 / 2.8. Throws StabilityError when the optimum
// violates eta < omega_bound (advising a smaller S).
LearningRateReport optimal_eta(const ModeParams& mp,
                               const GradientNoiseSpec& noise, double S,
                               const PreconditionerSpec* precond = nullptr);

double optimal_S(const ModeParams& mp, const GradientNoiseSpec& noise,
                 double eta, const PreconditionerSpec* precond = nullptr);

// Upper bound on S keeping the optimal eta inside the stability region;
// +infinity when all modes coincide.
double s_upper_bound(const ModeParams& mp, const GradientNoiseSpec& noise,
                     const PreconditionerSpec* precond = nullptr);

// Random-projection noise model: phi_i = (a~_i/p)(||z||^2 + z_i^2),
// q_i = S^2 phi_i / c_i, floored at q_floor (plus a 1e-12*max(q) guard).
Eigen::VectorXd choose_Q(double p, const ModeParams& mp,
                         const Eigen::VectorXd& z, double S, double q_floor);

// Estimated posterior nu: mean ubar on modes <= M with zero tail; variances
// s_i on modes <= M and the prior eigenvalues beyond.
struct VariationalPosterior {
  Eigen::VectorXd mean_coeffs;  // size = full spectrum
  Eigen::VectorXd s;            // size = full spectrum; s_i = c_i for i > M
  int M = 0;
};

VariationalPosterior estimated_posterior_from_formulas(
    const PriorSpectrum& spectrum, const ModeParams& mp, double eta, double S,
    const GradientNoiseSpec& noise, const Eigen::VectorXd& u_bar_coeffs,
    const PreconditionerSpec* precond = nullptr);

enum class Variant { csgd, pcsgd };

// How q_i are produced and re-scaled during a run.
//   p > 0       : fixed projection dimension.
//   p_auto      : p set at each refresh so eta+ lands at omega_bound/2.
//   q_refresh=0 : Q evaluated once at u_0; r > 0: refreshed every r outer steps.
struct ChainConfig {
  int K = 100;
  int J = 20;
  double tol = 0.0;        // 0 disables the early-stop test
  double S0 = 1.0;
  double p = 4.0;
  bool p_auto = false;
  int q_refresh = 0;
  double q_floor = 1e-12;
  bool average_samples = true;  // J-average per sample; false = thinned endpoint
  bool adapt = true;            // recompute (eta, S) each outer step
  double eta_fixed = 0.0;       // used when adapt is off; 0 = omega_bound/2
  int n_ite = 10;               // inner solves per preconditioner application
  std::uint64_t seed = 0;
};

struct ChainOutput {
  std::vector<Eigen::VectorXd> samples;  // mode-space coefficients, size M
  std::vector<double> relative_error_series;
  std::vector<double> eta_series;
  std::vector<double> S_series;
  Eigen::VectorXd q_final;
  double eta_final = 0.0;
  double S_final = 0.0;
  long long pde_solve_count = 0;
  std::uint64_t seed = 0;
  bool averaged_samples = true;
  int steps_run = 0;
  bool stopped_by_tol = false;
  VariationalPosterior formula_posterior;
  VariationalPosterior empirical_posterior;
};

// Everything a chain needs to run and report errors against the truth.
struct ChainProblem {
  const PriorSpectrum* spectrum = nullptr;
  const ModeParams* mode_params = nullptr;
  Eigen::VectorXd u_bar_coeffs;   // full spectrum length
  Eigen::VectorXd truth_nodal;    // for the Eq.-(3.4) error series
  const SparseMat* mass = nullptr;
  SolveCounter pde_counter;       // charged 2 (csgd) or 2+2*n_ite (pcsgd) per iteration
};

ChainOutput run_chain(const ChainProblem& problem, Variant variant,
                      const ChainConfig& config);

}  // namespace ivi
