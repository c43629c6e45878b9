#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ivi/pcn.hpp"
#include "ivi/sgd_vi.hpp"

namespace ivi {

enum class ProblemKind { elliptic1d, darcy2d };

struct SgdMethodSettings {
  int K = 100;
  int J = 20;
  double tol = 0.0;
  double S0 = 1.0;
  double p = 4.0;          // ignored when p_auto
  bool p_auto = false;
  int q_refresh = 0;
  double q_floor = 1e-12;
  bool average_samples = true;
  int N_ite = 10;          // pcSGD only
};

struct PcnMethodSettings {
  double beta = 0.1;
  bool auto_tune = false;
  long n_samples = 50000;
  long burn_in = -1;
  int thin = 1;
  int sample_stride = 50;  // stride for the samples.csv artifact
};

struct ExperimentConfig {
  ProblemKind problem = ProblemKind::elliptic1d;
  int mesh_n = 100;
  int fine_n = 10000;
  double noise_pct = 0.05;
  double alpha_pde = 0.05;
  double alpha_prior = 0.05;
  double C_M = 1e-3;
  std::vector<std::string> methods;  // subset of {csgd, pcsgd, pcn}
  SgdMethodSettings csgd;
  SgdMethodSettings pcsgd;
  PcnMethodSettings pcn;
  std::string darcy_f = "sine2x2";   // or "constant"
  double darcy_f_scale = 50.0;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool write_dense_covariances = true;  // auto-disabled above 400 nodes
};

// Paper-default configurations.
ExperimentConfig default_elliptic1d();
ExperimentConfig default_darcy2d();

// JSON round trip; load throws ValidationError naming the offending field.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);
// Hash of the problem-defining subset (mesh, noise, seed, ...), shared by
// runs that differ only in method settings.
std::uint64_t problem_hash(const ExperimentConfig& config);

struct MethodCost {
  std::string method;
  long long pde_solves = 0;
  long long iterations = 0;
  double wall_seconds = 0.0;
};

struct CostReport {
  std::vector<MethodCost> methods;
  long long setup_solves = 0;  // forward-matrix assembly + data generation
  long long total_solves = 0;  // equals the sum of all counters
};

struct MethodSummary {
  std::string method;
  double error_plateau = 0.0;            // Eq.-(3.4) series, last 20%
  double mean_vs_exact = 0.0;            // squared-ratio mass-norm error
  double cov_frobenius_vs_exact = 0.0;   // squared ratio
  std::map<int, double> cov_function_vs_exact;  // offsets 0, 10, 20
};

struct ExperimentResult {
  std::filesystem::path artifact_dir;
  int truncation_M = 0;
  bool truncation_warning = false;
  CostReport cost;
  std::vector<MethodSummary> summaries;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                bool dry_run = false);

// Merged cross-run tables; refuses directories with mismatched problem
// hashes. Returns the path of the consolidated CSV.
std::filesystem::path compare_report(
    const std::vector<std::filesystem::path>& artifact_dirs,
    const std::filesystem::path& out);

// Writes the prior spectrum CSV (+ plot) for a config; returns M.
int spectrum_report(const ExperimentConfig& config,
                    const std::filesystem::path& out_dir);

}  // namespace ivi
