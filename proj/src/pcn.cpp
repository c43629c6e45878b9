#include "ivi/pcn.hpp"

#include <cmath>

#include "ivi/errors.hpp"

namespace ivi {

PcnStep pcn_step(const Eigen::VectorXd& u, double phi_u, double beta,
                 const std::function<double(const Eigen::VectorXd&)>& potential,
                 const std::function<Eigen::VectorXd(Rng&)>& prior_sampler,
                 Rng& rng) {
  if (beta <= 0.0 || beta > 1.0)
    throw ValidationError("pcn_step: beta must lie in (0, 1]");
  const Eigen::VectorXd xi = prior_sampler(rng);
  const Eigen::VectorXd v = std::sqrt(1.0 - beta * beta) * u + beta * xi;
  const double phi_v = potential(v);
  PcnStep step;
  // log-uniform draw happens unconditionally so the stream does not depend
  // on the acceptance pattern.
  const double logu = std::log(rng.uniform());
  if (!std::isfinite(phi_v)) {
    step.state = u;
    step.phi = phi_u;
    step.accepted = false;
    return step;
  }
  if (logu < phi_u - phi_v) {
    step.state = v;
    step.phi = phi_v;
    step.accepted = true;
  } else {
    step.state = u;
    step.phi = phi_u;
    step.accepted = false;
  }
  return step;
}

namespace {

double run_acceptance_probe(const Eigen::MatrixXd& ht,
                            const Eigen::VectorXd& gamma_diag,
                            const Eigen::VectorXd& d,
                            const Eigen::VectorXd& sqrt_c, double beta,
                            long steps, std::uint64_t seed) {
  Rng rng(seed);
  const auto potential = [&](const Eigen::VectorXd& v) {
    const Eigen::VectorXd r = ht * v - d;
    return 0.5 * (r.array().square() / gamma_diag.array()).sum();
  };
  const auto sampler = [&](Rng& r) {
    Eigen::VectorXd xi(sqrt_c.size());
    for (int i = 0; i < xi.size(); ++i) xi[i] = sqrt_c[i] * r.normal();
    return xi;
  };
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sqrt_c.size());
  double phi = potential(u);
  long acc = 0;
  for (long i = 0; i < steps; ++i) {
    const PcnStep s = pcn_step(u, phi, beta, potential, sampler, rng);
    u = s.state;
    phi = s.phi;
    if (s.accepted) ++acc;
  }
  return static_cast<double>(acc) / steps;
}

}  // namespace

PcnResult run_pcn(const PriorSpectrum& spectrum, const Eigen::MatrixXd& H,
                  const Eigen::VectorXd& gamma_diag, const Eigen::VectorXd& d,
                  const PcnConfig& config, SolveCounter counter) {
  if (config.n_samples < 1)
    throw ValidationError("run_pcn: n_samples must be at least 1");
  const Eigen::MatrixXd ht = H * spectrum.modes;  // forward map, prior basis
  const Eigen::VectorXd sqrt_c = spectrum.c.cwiseSqrt();

  double beta = config.beta;
  if (config.auto_tune) {
    // Coarse bisection on the acceptance rate; pCN acceptance decreases in beta.
    double lo = 0.01, hi = 1.0;
    for (int it = 0; it < 12; ++it) {
      beta = 0.5 * (lo + hi);
      const double acc = run_acceptance_probe(ht, gamma_diag, d, sqrt_c, beta,
                                              2000, config.seed ^ 0x9E3779B9ULL);
      if (acc > config.target_acceptance)
        lo = beta;
      else
        hi = beta;
    }
  }

  const long burn =
      config.burn_in >= 0 ? config.burn_in : config.n_samples / 5;
  const long total = burn + config.n_samples * static_cast<long>(config.thin);

  const auto potential = [&](const Eigen::VectorXd& v) {
    const Eigen::VectorXd r = ht * v - d;
    return 0.5 * (r.array().square() / gamma_diag.array()).sum();
  };
  const auto sampler = [&](Rng& r) {
    Eigen::VectorXd xi(sqrt_c.size());
    for (int i = 0; i < xi.size(); ++i) xi[i] = sqrt_c[i] * r.normal();
    return xi;
  };

  Rng rng(config.seed);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(spectrum.c.size());
  double phi = potential(u);
  PcnResult result;
  result.beta_used = beta;
  result.samples.reserve(config.n_samples);
  result.phi_trace.reserve(total);
  result.accept_trace.reserve(total);
  long acc = 0;
  for (long i = 0; i < total; ++i) {
    const PcnStep s = pcn_step(u, phi, beta, potential, sampler, rng);
    u = s.state;
    phi = s.phi;
    if (s.accepted) ++acc;
    result.phi_trace.push_back(phi);
    result.accept_trace.push_back(s.accepted ? 1 : 0);
    if (i >= burn && (i - burn) % config.thin == config.thin - 1)
      result.samples.push_back(u);
  }
  result.acceptance_rate = static_cast<double>(acc) / total;
  result.pde_solve_count = total;  // one (virtual) solve per proposal
  if (counter) counter->fetch_add(total);
  return result;
}

}  // namespace ivi
