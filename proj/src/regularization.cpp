#include "ivi/regularization.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ivi/errors.hpp"

namespace ivi {

double StepSchedule::alpha_k() const {
  return 1.0 / std::accumulate(etas.begin(), etas.end(), 0.0);
}

StepSchedule make_schedule(std::vector<double> etas) {
  if (etas.empty()) throw ValidationError("schedule: empty step sequence");
  for (size_t i = 0; i < etas.size(); ++i) {
    if (etas[i] <= 0) throw ValidationError("schedule: steps must be positive");
    if (i > 0 && etas[i] > etas[i - 1])
      throw ValidationError("schedule: steps must be nonincreasing");
  }
  return StepSchedule{std::move(etas)};
}

namespace {
void check_domain(const StepSchedule& schedule, double t) {
  if (t <= 0 || t >= 1.0 / schedule.etas.front())
    throw ValidationError("g/r: t must lie in (0, 1/eta_1)");
}
}  // namespace

double g_alpha(const StepSchedule& schedule, double t) {
  check_domain(schedule, t);
  const auto& e = schedule.etas;
  const int k = static_cast<int>(e.size());
  double g = 0.0;
  for (int j = 0; j < k; ++j) {
    double prod = 1.0;
    for (int i = j + 1; i < k; ++i) prod *= 1.0 - e[i] * t;
    g += e[j] * prod;
  }
  return g;
}

double r_alpha(const StepSchedule& schedule, double t) {
  check_domain(schedule, t);
  double r = 1.0;
  for (const double eta : schedule.etas) r *= 1.0 - eta * t;
  return r;
}

DecayReport error_decay_monitor(const std::vector<double>& error_series) {
  DecayReport report;
  if (error_series.empty()) return report;
  const int n = static_cast<int>(error_series.size());
  const int tail = std::max(1, n / 5);
  report.plateau =
      std::accumulate(error_series.end() - tail, error_series.end(), 0.0) / tail;

  double running_min = error_series.front();
  int decreases = 0;
  report.first_plateau_step = n - 1;
  bool found = false;
  std::vector<double> mins(n);
  mins[0] = running_min;
  for (int i = 1; i < n; ++i) {
    if (error_series[i] < running_min) {
      running_min = error_series[i];
      ++decreases;
    }
    mins[i] = running_min;
  }
  for (int i = 0; i < n; ++i) {
    if (mins[i] <= 1.05 * report.plateau) {
      report.first_plateau_step = i;
      found = true;
      break;
    }
  }
  if (!found) report.first_plateau_step = n - 1;
  report.decrease_fraction =
      n > 1 ? static_cast<double>(decreases) / (n - 1) : 0.0;
  return report;
}

}  // namespace ivi
