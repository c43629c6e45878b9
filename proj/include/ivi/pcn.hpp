#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "ivi/forward.hpp"
#include "ivi/prior.hpp"
#include "ivi/rng.hpp"

namespace ivi {

struct PcnConfig {
  double beta = 0.1;
  long n_samples = 50000;
  long burn_in = -1;  // negative: 20% of n_samples
  int thin = 1;
  std::uint64_t seed = 0;
  bool auto_tune = false;            // pre-run beta search
  double target_acceptance = 0.25;
};

// One Metropolis step: propose v = sqrt(1-beta^2) u + beta xi with xi from
// the prior; accept with min(1, exp(Phi(u) - Phi(v))). Non-finite Phi(v)
// rejects. Returns the new state and the accept flag.
struct PcnStep {
  Eigen::VectorXd state;
  double phi = 0.0;
  bool accepted = false;
};

PcnStep pcn_step(const Eigen::VectorXd& u, double phi_u, double beta,
                 const std::function<double(const Eigen::VectorXd&)>& potential,
                 const std::function<Eigen::VectorXd(Rng&)>& prior_sampler,
                 Rng& rng);

struct PcnResult {
  std::vector<Eigen::VectorXd> samples;  // prior-basis coefficients
  double acceptance_rate = 0.0;
  double beta_used = 0.0;
  std::vector<double> phi_trace;
  std::vector<char> accept_trace;
  long long pde_solve_count = 0;  // one per proposal
};

// Samples the posterior of the linear problem (H in the prior basis is
// derived internally from the nodal H).
PcnResult run_pcn(const PriorSpectrum& spectrum, const Eigen::MatrixXd& H,
                  const Eigen::VectorXd& gamma_diag, const Eigen::VectorXd& d,
                  const PcnConfig& config, SolveCounter counter = nullptr);

}  // namespace ivi
