#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ivi/errors.hpp"
#include "ivi/experiment.hpp"

using namespace ivi;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config(const std::string& out) {
  ExperimentConfig cfg = default_elliptic1d();
  cfg.mesh_n = 24;
  cfg.fine_n = 400;
  cfg.methods = {"csgd", "pcsgd"};
  cfg.csgd.K = 6;
  cfg.csgd.J = 4;
  cfg.pcsgd.K = 4;
  cfg.pcsgd.J = 4;
  cfg.output_dir = out;
  cfg.seed = 7;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("config JSON round trip preserves the settings") {
  const ExperimentConfig cfg = default_elliptic1d();
  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.mesh_n == cfg.mesh_n);
  CHECK(back.pcsgd.p_auto == cfg.pcsgd.p_auto);
  CHECK(back.pcn.thin == cfg.pcn.thin);
  CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("invalid configs name the offending field") {
  CHECK_THROWS_WITH_AS(config_from_json("{}"),
                       doctest::Contains("config.problem"), ValidationError);
  CHECK_THROWS_WITH_AS(
      config_from_json(R"({"problem":"elliptic1d","fine_n":50})"),
      doctest::Contains("fine_n"), ValidationError);
  CHECK_THROWS_WITH_AS(
      config_from_json(R"({"problem":"elliptic1d","csgd":{"K":0}})"),
      doctest::Contains("csgd.K"), ValidationError);
  CHECK_THROWS_WITH_AS(
      config_from_json(R"({"problem":"elliptic1d","methods":["bogus"]})"),
      doctest::Contains("methods"), ValidationError);
}

TEST_CASE("problem hash ignores method settings") {
  ExperimentConfig a = default_elliptic1d();
  ExperimentConfig b = a;
  b.csgd.K = 3;
  b.pcn.beta = 0.9;
  CHECK(problem_hash(a) == problem_hash(b));
  CHECK(config_hash(a) != config_hash(b));
  b.seed = 99;
  CHECK(problem_hash(a) != problem_hash(b));
}

TEST_CASE("dry run forecasts the paper's solve counts with zero solves") {
  ExperimentConfig cfg = default_elliptic1d();
  const ExperimentResult res = run_experiment(cfg, true);
  REQUIRE(res.cost.methods.size() == 3);
  CHECK(res.cost.methods[0].method == "csgd");
  CHECK(res.cost.methods[0].pde_solves == 4000);   // 2 M J = 2*100*20
  CHECK(res.cost.methods[1].method == "pcsgd");
  CHECK(res.cost.methods[1].pde_solves == 6600);   // (2+2*10)*15*20
  CHECK_FALSE(fs::exists(fs::path(cfg.output_dir) / "manifest.json"));
}

TEST_CASE("same config and seed produce byte-identical CSV artifacts") {
  const fs::path base = fs::temp_directory_path() / "ivi_test_runs";
  fs::remove_all(base);
  ExperimentConfig cfg = tiny_config((base / "a").string());
  run_experiment(cfg);
  cfg.output_dir = (base / "b").string();
  run_experiment(cfg);

  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().extension() != ".csv") continue;
    if (entry.path().filename() == "timing.csv") continue;  // wall times
    const fs::path rel = fs::relative(entry.path(), base / "a");
    CHECK(slurp(entry.path()) == slurp(base / "b" / rel));
    ++compared;
  }
  CHECK(compared > 5);
  fs::remove_all(base);
}

TEST_CASE("cost report matches the analytical accounting") {
  const fs::path base = fs::temp_directory_path() / "ivi_test_cost";
  fs::remove_all(base);
  ExperimentConfig cfg = tiny_config((base / "run").string());
  const ExperimentResult res = run_experiment(cfg);
  long long sum = res.cost.setup_solves;
  for (const auto& m : res.cost.methods) {
    sum += m.pde_solves;
    if (m.method == "csgd")
      CHECK(m.pde_solves == 2LL * cfg.csgd.K * cfg.csgd.J);
    if (m.method == "pcsgd")
      CHECK(m.pde_solves ==
            (2LL + 2 * cfg.pcsgd.N_ite) * cfg.pcsgd.K * cfg.pcsgd.J);
  }
  CHECK(res.cost.total_solves == sum);
  fs::remove_all(base);
}

TEST_CASE("compare: self-comparison zeros and hash refusal") {
  const fs::path base = fs::temp_directory_path() / "ivi_test_cmp";
  fs::remove_all(base);
  ExperimentConfig cfg = tiny_config((base / "a").string());
  run_experiment(cfg);
  cfg.output_dir = (base / "b").string();
  run_experiment(cfg);

  const fs::path out = compare_report({base / "a", base / "b"}, base / "cmp.csv");
  // self-comparison: the cross-run mean column is zero everywhere
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);  // header
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto pos = line.rfind(',');
    CHECK(std::stod(line.substr(pos + 1)) == doctest::Approx(0.0));
    ++rows;
  }
  CHECK(rows == 4);  // two methods per run

  // different seed -> different problem hash -> refusal
  cfg.seed = 1234;
  cfg.output_dir = (base / "c").string();
  run_experiment(cfg);
  CHECK_THROWS_AS(compare_report({base / "a", base / "c"}, base / "cmp2.csv"),
                  ValidationError);
  // empty/na directory -> refusal with diagnostic
  CHECK_THROWS_AS(compare_report({base / "a", base / "missing"}, base / "x.csv"),
                  ValidationError);
  fs::remove_all(base);
}

TEST_CASE("experiment artifacts exist") {
  const fs::path base = fs::temp_directory_path() / "ivi_test_art";
  fs::remove_all(base);
  ExperimentConfig cfg = tiny_config((base / "run").string());
  cfg.methods = {"csgd", "pcsgd", "pcn"};
  cfg.pcn.n_samples = 500;
  cfg.pcn.burn_in = 100;
  const ExperimentResult res = run_experiment(cfg);
  const fs::path dir = res.artifact_dir;
  for (const char* name :
       {"manifest.json", "config.json", "mesh.csv", "prior_spectrum.csv",
        "data.csv", "posterior_mean_exact.csv", "cost_report.csv",
        "timing.csv", "compare.csv"})
    CHECK_MESSAGE(fs::exists(dir / name), name);
  for (const char* name :
       {"chain.csv", "samples.csv", "variational_posterior.csv", "mean.csv",
        "covariance_table.csv", "credibility_band.csv", "error.svg"})
    CHECK_MESSAGE(fs::exists(dir / "csgd" / name), name);
  CHECK(fs::exists(dir / "pcn" / "trace.csv"));
  CHECK(fs::exists(dir / "pcn" / "samples.csv"));
  fs::remove_all(base);
}

TEST_SUITE_END();
