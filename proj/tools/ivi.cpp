#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ivi/errors.hpp"
#include "ivi/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ivi::ValidationError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cmd(const std::string& config_path, std::uint64_t seed, bool has_seed,
            const std::string& out_dir, bool dry_run) {
  ivi::ExperimentConfig cfg = ivi::config_from_json(slurp(config_path));
  if (has_seed) cfg.seed = seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  const ivi::ExperimentResult result = ivi::run_experiment(cfg, dry_run);
  if (dry_run) {
    std::cout << "dry run: config valid\n";
    for (const auto& m : result.cost.methods)
      std::cout << "  " << m.method << ": " << m.pde_solves
                << " PDE solves forecast (" << m.iterations << " iterations)\n";
    return 0;
  }
  std::cout << "artifacts: " << result.artifact_dir.string() << "\n"
            << "truncation M = " << result.truncation_M
            << (result.truncation_warning ? " (no index qualified; kept all modes)"
                                          : "")
            << "\n";
  for (const auto& s : result.summaries)
    std::cout << "  " << s.method << ": plateau " << s.error_plateau
              << ", mean-vs-exact " << s.mean_vs_exact << "\n";
  for (const auto& m : result.cost.methods)
    std::cout << "  " << m.method << ": " << m.pde_solves << " PDE solves, "
              << m.wall_seconds << " s\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infinite-dimensional SGD variational inference toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool dry_run = false, parallel = false;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "experiment config (JSON)")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "override the output directory");
  run->add_flag("--dry-run", dry_run, "validate and forecast solve counts only");
  run->add_flag("--parallel", parallel,
                "accepted for compatibility; methods run sequentially");

  std::vector<std::string> compare_dirs;
  auto* cmp = app.add_subcommand("compare", "merge tables across artifact dirs");
  cmp->add_option("dirs", compare_dirs, "artifact directories")->expected(-1);
  std::string cmp_out = "compare_report.csv";
  cmp->add_option("--out", cmp_out, "output CSV path");

  std::string spec_config, spec_out = "spectrum_out";
  auto* spec = app.add_subcommand("spectrum", "prior spectrum report");
  spec->add_option("config", spec_config, "experiment config (JSON)")->required();
  spec->add_option("--out", spec_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_cmd(config_path, seed, seed_opt->count() > 0, out_dir, dry_run);
    if (cmp->parsed()) {
      std::vector<std::filesystem::path> dirs(compare_dirs.begin(),
                                              compare_dirs.end());
      const auto out = ivi::compare_report(dirs, cmp_out);
      std::cout << "wrote " << out.string() << "\n";
      return 0;
    }
    if (spec->parsed()) {
      const ivi::ExperimentConfig cfg = ivi::config_from_json(slurp(spec_config));
      const int m = ivi::spectrum_report(cfg, spec_out);
      std::cout << "truncation M = " << m << "\n";
      return 0;
    }
  } catch (const ivi::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
