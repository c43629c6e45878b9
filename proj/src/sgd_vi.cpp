#include "ivi/sgd_vi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ivi/errors.hpp"

namespace ivi {

namespace {

const Eigen::VectorXd& precond_t(const ModeParams& mp,
                                 const PreconditionerSpec* precond,
                                 Eigen::VectorXd& scratch) {
  if (precond) {
    if (precond->t.size() != mp.M)
      throw ValidationError("preconditioner length does not match M");
    return precond->t;
  }
  scratch = Eigen::VectorXd::Ones(mp.M);
  return scratch;
}

double omega_bound_for(const ModeParams& mp, const PreconditionerSpec* precond) {
  if (precond) return 2.0 / precond->tau_max;
  return 2.0 / mp.a_tilde.maxCoeff();
}

}  // namespace

PreconditionerSpec identity_preconditioner(const ModeParams& mp) {
  PreconditionerSpec p;
  p.t = Eigen::VectorXd::Ones(mp.M);
  p.tau = mp.a_tilde;
  p.tau_max = mp.a_tilde.maxCoeff();
  return p;
}

PreconditionerSpec hessian_inverse_preconditioner(const ModeParams& mp) {
  PreconditionerSpec p;
  p.t = mp.a_tilde.cwiseInverse();
  p.tau = Eigen::VectorXd::Ones(mp.M);
  p.tau_max = 1.0;
  return p;
}

Eigen::VectorXd full_gradient(const Eigen::VectorXd& u, const ModeParams& mp,
                              const Eigen::VectorXd& u_bar) {
  if (u.size() != mp.M || u_bar.size() < mp.M)
    throw ValidationError("full_gradient: dimension mismatch");
  return mp.a_tilde.cwiseProduct(u - u_bar.head(mp.M));
}

Eigen::VectorXd stochastic_gradient(const Eigen::VectorXd& u,
                                    const ModeParams& mp,
                                    const Eigen::VectorXd& u_bar,
                                    const GradientNoiseSpec& spec, Rng& rng) {
  if (spec.S <= 0) throw ValidationError("stochastic_gradient: S must be positive");
  if (spec.q.size() != mp.M)
    throw ValidationError("stochastic_gradient: q length mismatch");
  Eigen::VectorXd g = full_gradient(u, mp, u_bar);
  const double scale = 1.0 / std::sqrt(spec.S);
  for (int i = 0; i < mp.M; ++i)
    g[i] -= scale * std::sqrt(mp.c[i] * spec.q[i]) * rng.normal();
  return g;
}

Eigen::VectorXd stationary_variance(double eta, double S, const ModeParams& mp,
                                    const GradientNoiseSpec& noise,
                                    const PreconditionerSpec* precond) {
  Eigen::VectorXd scratch;
  const Eigen::VectorXd& t = precond_t(mp, precond, scratch);
  Eigen::VectorXd s(mp.M);
  for (int i = 0; i < mp.M; ++i) {
    const double rate = eta * t[i] * mp.a_tilde[i];
    if (rate >= 2.0)
      throw StabilityError("stationary_variance: eta*t*a~ >= 2 at mode " +
                               std::to_string(i + 1),
                           i);
    s[i] = eta * t[i] * mp.c[i] * noise.q[i] /
           (S * S * (2.0 * mp.a_tilde[i] - eta * t[i] * mp.a_tilde[i] * mp.a_tilde[i]));
  }
  return s;
}

LearningRateReport optimal_eta(const ModeParams& mp,
                               const GradientNoiseSpec& noise, double S,
                               const PreconditionerSpec* precond) {
  if (S <= 0) throw ValidationError("optimal_eta: S must be positive");
  Eigen::VectorXd scratch;
  const Eigen::VectorXd& t = precond_t(mp, precond, scratch);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < mp.M; ++i) {
    num += mp.a_tilde[i] / (t[i] * noise.q[i]);
    den += mp.a_tilde[i] * mp.a_tilde[i] / noise.q[i];
  }
  LearningRateReport report;
  report.S_used = S;
  report.omega_bound = omega_bound_for(mp, precond);
  report.eta_dagger = 2.0 * S * S * num / (mp.M_prime + S * S * den);
  report.fixed_point_iterations = 1;
  report.converged = report.eta_dagger < report.omega_bound;
  if (!report.converged)
    throw StabilityError(
        "optimal_eta: eta+ = " + std::to_string(report.eta_dagger) +
            " exceeds the stability bound " + std::to_string(report.omega_bound) +
            "; decrease S below s_upper_bound",
        -1);
  return report;
}

double optimal_S(const ModeParams& mp, const GradientNoiseSpec& noise,
                 double eta, const PreconditionerSpec* precond) {
  Eigen::VectorXd scratch;
  const Eigen::VectorXd& t = precond_t(mp, precond, scratch);
  double den = 0.0;
  for (int i = 0; i < mp.M; ++i) {
    den += (2.0 * mp.a_tilde[i] - eta * t[i] * mp.a_tilde[i] * mp.a_tilde[i]) /
           (t[i] * noise.q[i]);
  }
  if (den <= 0)
    throw StabilityError("optimal_S: nonpositive denominator (eta unstable)", -1);
  return std::sqrt(eta * mp.M_prime / den);
}

double s_upper_bound(const ModeParams& mp, const GradientNoiseSpec& noise,
                     const PreconditionerSpec* precond) {
  Eigen::VectorXd scratch;
  const Eigen::VectorXd& t = precond_t(mp, precond, scratch);
  double den = 0.0;
  if (precond) {
    const double tau_max = precond->tau_max;
    for (int i = 0; i < mp.M; ++i)
      den += tau_max * mp.a_tilde[i] / (t[i] * noise.q[i]) -
             mp.a_tilde[i] * mp.a_tilde[i] / noise.q[i];
  } else {
    const double at_max = mp.a_tilde.maxCoeff();
    for (int i = 0; i < mp.M; ++i)
      den += (at_max * mp.a_tilde[i] - mp.a_tilde[i] * mp.a_tilde[i]) / noise.q[i];
  }
  if (den < -1e-12 * mp.M_prime)
    throw NumericError("s_upper_bound: negative denominator");
  if (den <= 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(mp.M_prime / den);
}

Eigen::VectorXd choose_Q(double p, const ModeParams& mp,
                         const Eigen::VectorXd& z, double S, double q_floor) {
  if (p < 1) throw ValidationError("choose_Q: p must be at least 1");
  if (z.size() != mp.M) throw ValidationError("choose_Q: z length mismatch");
  const double zn = z.squaredNorm();
  if (zn == 0.0 && q_floor <= 0.0)
    throw ValidationError("choose_Q: degenerate noise (z = 0 with no floor)");
  Eigen::VectorXd q(mp.M);
  for (int i = 0; i < mp.M; ++i) {
    const double phi = mp.a_tilde[i] / p * (zn + z[i] * z[i]);
    q[i] = S * S * phi / mp.c[i];
  }
  const double floor = std::max(q_floor, 1e-12 * q.maxCoeff());
  return q.cwiseMax(floor);
}

VariationalPosterior estimated_posterior_from_formulas(
    const PriorSpectrum& spectrum, const ModeParams& mp, double eta, double S,
    const GradientNoiseSpec& noise, const Eigen::VectorXd& u_bar_coeffs,
    const PreconditionerSpec* precond) {
  VariationalPosterior nu;
  nu.M = mp.M;
  const int full = static_cast<int>(spectrum.c.size());
  nu.mean_coeffs = Eigen::VectorXd::Zero(full);
  nu.mean_coeffs.head(mp.M) = u_bar_coeffs.head(mp.M);
  nu.s = spectrum.c;  // tail stays the prior exactly
  nu.s.head(mp.M) = stationary_variance(eta, S, mp, noise, precond);
  return nu;
}

ChainOutput run_chain(const ChainProblem& problem, Variant variant,
                      const ChainConfig& config) {
  const ModeParams& mp = *problem.mode_params;
  const PriorSpectrum& spectrum = *problem.spectrum;
  const int m = mp.M;
  if (config.K < 1 || config.J < 1)
    throw ValidationError("run_chain: K and J must be positive");

  PreconditionerSpec precond_store;
  const PreconditionerSpec* precond = nullptr;
  if (variant == Variant::pcsgd) {
    precond_store = hessian_inverse_preconditioner(mp);
    precond = &precond_store;
  }
  Eigen::VectorXd scratch;
  const Eigen::VectorXd& t = precond_t(mp, precond, scratch);
  const double omega = omega_bound_for(mp, precond);
  const Eigen::VectorXd u_bar = problem.u_bar_coeffs.head(m);
  const long long solves_per_iter =
      variant == Variant::pcsgd ? 2 + 2 * config.n_ite : 2;

  Rng rng(config.seed);
  ChainOutput out;
  out.seed = config.seed;
  out.averaged_samples = config.average_samples;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
  double S = config.S0;
  Eigen::VectorXd q;
  double eta = 0.0;
  Eigen::VectorXd prev_sample;
  Eigen::MatrixXd sample_sum = Eigen::MatrixXd::Zero(m, 2);  // mean, mean of squares

  const double truth_mass2 =
      problem.truth_nodal.size()
          ? problem.truth_nodal.dot(*problem.mass * problem.truth_nodal)
          : 0.0;

  for (int k = 0; k < config.K; ++k) {
    if (q.size() == 0 || (config.q_refresh > 0 && k % config.q_refresh == 0)) {
      // Q carries the noise profile at unit scale; S stays a separate knob.
      const Eigen::VectorXd z = mp.a_tilde.cwiseSqrt().cwiseProduct(u - u_bar);
      if (config.p_auto) {
        // Scale p so the closed-form eta+ sits at the midpoint of the
        // stability interval; keeps every mode's Lyapunov condition strict.
        const Eigen::VectorXd q1 = choose_Q(1.0, mp, z, 1.0, config.q_floor);
        double a_sum = 0.0, b_sum = 0.0;
        for (int i = 0; i < m; ++i) {
          a_sum += S * S * mp.a_tilde[i] / (t[i] * q1[i]);
          b_sum += S * S * mp.a_tilde[i] * mp.a_tilde[i] / q1[i];
        }
        const double p = omega * mp.M_prime / (4.0 * a_sum - omega * b_sum);
        q = choose_Q(std::max(1.0, p), mp, z, 1.0, config.q_floor);
      } else {
        q = choose_Q(config.p, mp, z, 1.0, config.q_floor);
      }
    }
    GradientNoiseSpec noise{S, q};
    if (config.adapt) {
      const LearningRateReport report = optimal_eta(mp, noise, S, precond);
      eta = report.eta_dagger;
      S = optimal_S(mp, noise, eta, precond);
      noise.S = S;
    } else {
      eta = config.eta_fixed > 0 ? config.eta_fixed : 0.5 * omega;
    }
    out.eta_series.push_back(eta);
    out.S_series.push_back(S);

    // Per-mode iteration noise (eta/S) t_i sqrt(c_i q_i), matching the
    // discrete-time Lyapunov equation behind stationary_variance.
    Eigen::VectorXd noise_sd(m);
    for (int i = 0; i < m; ++i)
      noise_sd[i] = eta / S * t[i] * std::sqrt(mp.c[i] * q[i]);

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < config.J; ++j) {
      for (int i = 0; i < m; ++i) {
        const double g = mp.a_tilde[i] * (u[i] - u_bar[i]);
        u[i] -= eta * t[i] * g - noise_sd[i] * rng.normal();
      }
      acc += u;
    }
    problem.pde_counter->fetch_add(solves_per_iter * config.J);

    const Eigen::VectorXd sample = config.average_samples ? (acc / config.J).eval() : u;
    out.samples.push_back(sample);
    sample_sum.col(0) += sample;
    sample_sum.col(1) += sample.cwiseAbs2();

    if (truth_mass2 > 0) {
      const Eigen::VectorXd nodal = spectrum.modes.leftCols(m) * sample;
      const Eigen::VectorXd diff = nodal - problem.truth_nodal;
      out.relative_error_series.push_back(diff.dot(*problem.mass * diff) /
                                          truth_mass2);
    }
    out.steps_run = k + 1;
    if (config.tol > 0 && prev_sample.size()) {
      const double denom = prev_sample.norm();
      if (denom > 0 && (sample - prev_sample).norm() / denom <= config.tol) {
        out.stopped_by_tol = true;
        prev_sample = sample;
        break;
      }
    }
    prev_sample = sample;
  }

  out.q_final = q;
  out.eta_final = eta;
  out.S_final = S;
  out.pde_solve_count = solves_per_iter * static_cast<long long>(config.J) *
                        out.steps_run;

  GradientNoiseSpec final_noise{S, q};
  out.formula_posterior = estimated_posterior_from_formulas(
      spectrum, mp, eta, S, final_noise, problem.u_bar_coeffs, precond);

  // Empirical counterpart from the collected samples; tail = prior.
  out.empirical_posterior.M = m;
  out.empirical_posterior.mean_coeffs =
      Eigen::VectorXd::Zero(spectrum.c.size());
  out.empirical_posterior.s = spectrum.c;
  const double ks = static_cast<double>(out.steps_run);
  out.empirical_posterior.mean_coeffs.head(m) = sample_sum.col(0) / ks;
  if (out.steps_run > 1) {
    const Eigen::VectorXd mean = sample_sum.col(0) / ks;
    out.empirical_posterior.s.head(m) =
        (sample_sum.col(1) - ks * mean.cwiseAbs2()) / (ks - 1.0);
  }
  return out;
}

}  // namespace ivi
