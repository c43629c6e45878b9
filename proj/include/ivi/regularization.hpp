#pragma once

#include <vector>

namespace ivi {

// Finite nonincreasing positive step sequence; alpha_k = 1/sum(eta_i).
struct StepSchedule {
  std::vector<double> etas;
  double alpha_k() const;
};

StepSchedule make_schedule(std::vector<double> etas);  // validates

// g_{alpha_k}(t) = sum_j eta_j prod_{i>j} (1 - eta_i t), 0 < t < 1/eta_1.
double g_alpha(const StepSchedule& schedule, double t);
// r_{alpha_k}(t) = prod_i (1 - eta_i t) = 1 - t g_{alpha_k}(t).
double r_alpha(const StepSchedule& schedule, double t);

// Monotone-envelope statistics of a squared-error series.
struct DecayReport {
  double plateau = 0.0;          // mean of the last 20% of the series
  double decrease_fraction = 0;  // steps where the running min decreased
  int first_plateau_step = 0;    // first step with running min <= 1.05*plateau
};

DecayReport error_decay_monitor(const std::vector<double>& error_series);

}  // namespace ivi
