#include "ivi/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>

#include "ivi/csv.hpp"
#include "ivi/darcy.hpp"
#include "ivi/diagnostics.hpp"
#include "ivi/errors.hpp"
#include "ivi/posterior.hpp"
#include "ivi/regularization.hpp"
#include "ivi/svg.hpp"

namespace ivi {

using nlohmann::json;
namespace fs = std::filesystem;

ExperimentConfig default_elliptic1d() {
  ExperimentConfig cfg;
  cfg.problem = ProblemKind::elliptic1d;
  cfg.mesh_n = 100;
  cfg.fine_n = 10000;
  cfg.noise_pct = 0.05;
  cfg.alpha_pde = 0.05;
  cfg.alpha_prior = 0.05;
  cfg.C_M = 1e-3;
  cfg.methods = {"csgd", "pcsgd", "pcn"};
  cfg.csgd = SgdMethodSettings{100, 20, 0.0, 1.0, 4.0, false, 0, 1e-12, true, 10};
  cfg.pcsgd = SgdMethodSettings{15, 20, 0.0, 1.0, 4.0, true, 1, 1e-12, true, 10};
  cfg.pcn = PcnMethodSettings{0.25, false, 50000, -1, 2, 50};
  cfg.seed = 1;
  return cfg;
}

ExperimentConfig default_darcy2d() {
  ExperimentConfig cfg = default_elliptic1d();
  cfg.problem = ProblemKind::darcy2d;
  cfg.mesh_n = 40;
  cfg.fine_n = 500;
  cfg.methods = {"csgd", "pcsgd"};
  cfg.darcy_f = "sine2x2";
  cfg.darcy_f_scale = 50.0;
  cfg.write_dense_covariances = false;
  return cfg;
}

namespace {

json sgd_to_json(const SgdMethodSettings& s) {
  return json{{"K", s.K},
              {"J", s.J},
              {"tol", s.tol},
              {"S0", s.S0},
              {"p", s.p_auto ? json("auto") : json(s.p)},
              {"q_refresh", s.q_refresh},
              {"q_floor", s.q_floor},
              {"average_samples", s.average_samples},
              {"N_ite", s.N_ite}};
}

SgdMethodSettings sgd_from_json(const json& j, const SgdMethodSettings& base,
                                const std::string& path) {
  SgdMethodSettings s = base;
  try {
    if (j.contains("K")) s.K = j.at("K").get<int>();
    if (j.contains("J")) s.J = j.at("J").get<int>();
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
    if (j.contains("S0")) s.S0 = j.at("S0").get<double>();
    if (j.contains("p")) {
      if (j.at("p").is_string()) {
        if (j.at("p").get<std::string>() != "auto")
          throw ValidationError(path + ".p: expected a number or \"auto\"");
        s.p_auto = true;
      } else {
        s.p = j.at("p").get<double>();
        s.p_auto = false;
      }
    }
    if (j.contains("q_refresh")) s.q_refresh = j.at("q_refresh").get<int>();
    if (j.contains("q_floor")) s.q_floor = j.at("q_floor").get<double>();
    if (j.contains("average_samples"))
      s.average_samples = j.at("average_samples").get<bool>();
    if (j.contains("N_ite")) s.N_ite = j.at("N_ite").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (s.K < 1) throw ValidationError(path + ".K: must be positive");
  if (s.J < 1) throw ValidationError(path + ".J: must be positive");
  if (s.S0 <= 0) throw ValidationError(path + ".S0: must be positive");
  if (!s.p_auto && s.p < 1) throw ValidationError(path + ".p: must be >= 1");
  return s;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["problem"] = c.problem == ProblemKind::elliptic1d ? "elliptic1d" : "darcy2d";
  j["mesh_n"] = c.mesh_n;
  j["fine_n"] = c.fine_n;
  j["noise_pct"] = c.noise_pct;
  j["alpha_pde"] = c.alpha_pde;
  j["alpha_prior"] = c.alpha_prior;
  j["C_M"] = c.C_M;
  j["methods"] = c.methods;
  j["csgd"] = sgd_to_json(c.csgd);
  j["pcsgd"] = sgd_to_json(c.pcsgd);
  j["pcn"] = json{{"beta", c.pcn.beta},
                  {"auto_tune", c.pcn.auto_tune},
                  {"n_samples", c.pcn.n_samples},
                  {"burn_in", c.pcn.burn_in},
                  {"thin", c.pcn.thin},
                  {"sample_stride", c.pcn.sample_stride}};
  j["darcy_f"] = c.darcy_f;
  j["darcy_f_scale"] = c.darcy_f_scale;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["write_dense_covariances"] = c.write_dense_covariances;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.contains("problem"))
    throw ValidationError("config.problem: required field missing");
  const std::string prob = j.at("problem").get<std::string>();
  ExperimentConfig cfg;
  if (prob == "elliptic1d")
    cfg = default_elliptic1d();
  else if (prob == "darcy2d")
    cfg = default_darcy2d();
  else
    throw ValidationError("config.problem: expected elliptic1d or darcy2d");

  try {
    if (j.contains("mesh_n")) cfg.mesh_n = j.at("mesh_n").get<int>();
    if (j.contains("fine_n")) cfg.fine_n = j.at("fine_n").get<int>();
    if (j.contains("noise_pct")) cfg.noise_pct = j.at("noise_pct").get<double>();
    if (j.contains("alpha_pde")) cfg.alpha_pde = j.at("alpha_pde").get<double>();
    if (j.contains("alpha_prior"))
      cfg.alpha_prior = j.at("alpha_prior").get<double>();
    if (j.contains("C_M")) cfg.C_M = j.at("C_M").get<double>();
    if (j.contains("methods"))
      cfg.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("darcy_f")) cfg.darcy_f = j.at("darcy_f").get<std::string>();
    if (j.contains("darcy_f_scale"))
      cfg.darcy_f_scale = j.at("darcy_f_scale").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir"))
      cfg.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("write_dense_covariances"))
      cfg.write_dense_covariances = j.at("write_dense_covariances").get<bool>();
    if (j.contains("pcn")) {
      const json& p = j.at("pcn");
      if (p.contains("beta")) cfg.pcn.beta = p.at("beta").get<double>();
      if (p.contains("auto_tune")) cfg.pcn.auto_tune = p.at("auto_tune").get<bool>();
      if (p.contains("n_samples")) cfg.pcn.n_samples = p.at("n_samples").get<long>();
      if (p.contains("burn_in")) cfg.pcn.burn_in = p.at("burn_in").get<long>();
      if (p.contains("thin")) cfg.pcn.thin = p.at("thin").get<int>();
      if (p.contains("sample_stride"))
        cfg.pcn.sample_stride = p.at("sample_stride").get<int>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  if (j.contains("csgd")) cfg.csgd = sgd_from_json(j.at("csgd"), cfg.csgd, "config.csgd");
  if (j.contains("pcsgd"))
    cfg.pcsgd = sgd_from_json(j.at("pcsgd"), cfg.pcsgd, "config.pcsgd");

  if (cfg.mesh_n < 3) throw ValidationError("config.mesh_n: must be >= 3");
  if (cfg.fine_n <= cfg.mesh_n)
    throw ValidationError("config.fine_n: must exceed mesh_n (inverse crime)");
  if (cfg.noise_pct < 0) throw ValidationError("config.noise_pct: must be >= 0");
  if (cfg.alpha_pde <= 0) throw ValidationError("config.alpha_pde: must be > 0");
  if (cfg.alpha_prior <= 0) throw ValidationError("config.alpha_prior: must be > 0");
  if (cfg.C_M <= 0 || cfg.C_M > 1)
    throw ValidationError("config.C_M: must lie in (0, 1]");
  if (cfg.pcn.beta <= 0 || cfg.pcn.beta > 1)
    throw ValidationError("config.pcn.beta: must lie in (0, 1]");
  for (const auto& m : cfg.methods)
    if (m != "csgd" && m != "pcsgd" && m != "pcn")
      throw ValidationError("config.methods: unknown method " + m);
  if (cfg.problem == ProblemKind::darcy2d && cfg.darcy_f != "sine2x2" &&
      cfg.darcy_f != "constant")
    throw ValidationError("config.darcy_f: expected sine2x2 or constant");
  return cfg;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

json problem_subset(const ExperimentConfig& c) {
  json j;
  j["problem"] = c.problem == ProblemKind::elliptic1d ? "elliptic1d" : "darcy2d";
  j["mesh_n"] = c.mesh_n;
  j["fine_n"] = c.fine_n;
  j["noise_pct"] = c.noise_pct;
  j["alpha_pde"] = c.alpha_pde;
  j["alpha_prior"] = c.alpha_prior;
  j["C_M"] = c.C_M;
  j["darcy_f"] = c.darcy_f;
  j["darcy_f_scale"] = c.darcy_f_scale;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

std::uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a(config_to_json(c));
}

std::uint64_t problem_hash(const ExperimentConfig& c) {
  return fnv1a(problem_subset(c).dump());
}

namespace {

constexpr const char* kVersion = "0.1.0";

struct BuiltProblem {
  Mesh mesh;
  AssembledOperators ops;
  Eigen::MatrixXd H;
  Eigen::VectorXd gamma_diag;
  Eigen::VectorXd d;
  Eigen::VectorXd truth_nodal;
  std::vector<Point> obs_points;
  long long setup_solves = 0;
  SolveCounter counter;
};

BuiltProblem build_problem(const ExperimentConfig& cfg) {
  BuiltProblem bp;
  bp.counter = make_solve_counter();
  Rng data_rng(cfg.seed);
  if (cfg.problem == ProblemKind::elliptic1d) {
    bp.mesh = build_mesh(1, cfg.mesh_n);
    bp.ops = assemble_operators(bp.mesh);
    EllipticProblem pde(bp.mesh, cfg.alpha_pde);
    bp.obs_points = elliptic1d_observation_points();
    bp.H = forward_matrix(pde, bp.obs_points);
    const auto truth = [](double x) {
      return 10.0 * (std::cos(4.0 * M_PI * x) + 1.0);
    };
    const GeneratedData data =
        generate_data(truth, cfg.fine_n, pde, cfg.noise_pct, data_rng);
    bp.d = data.d;
    bp.gamma_diag =
        Eigen::VectorXd::Constant(bp.d.size(), data.tau_inv);
    bp.truth_nodal.resize(bp.mesh.node_count());
    for (int i = 0; i < bp.mesh.node_count(); ++i)
      bp.truth_nodal[i] = truth(bp.mesh.axis[i]);
    bp.setup_solves = pde.counter()->load();
    bp.counter->fetch_add(bp.setup_solves);
  } else {
    bp.mesh = build_mesh(2, cfg.mesh_n);
    bp.ops = assemble_operators(bp.mesh);
    bp.obs_points = darcy_observation_points();
    const auto truth = [](double x, double y) {
      return std::exp(-20 * (x - 0.3) * (x - 0.3) - 20 * (y - 0.4) * (y - 0.4)) +
             std::exp(-20 * (x - 0.7) * (x - 0.7) - 20 * (y - 0.6) * (y - 0.6));
    };
    const double scale = cfg.darcy_f_scale;
    const auto source = cfg.darcy_f == "constant"
                            ? std::function<double(double, double)>(
                                  [scale](double, double) { return scale; })
                            : std::function<double(double, double)>(
                                  [scale](double x, double y) {
                                    return scale * std::sin(2 * M_PI * x) *
                                           std::sin(2 * M_PI * y);
                                  });
    const int nn = bp.mesh.node_count();
    Eigen::VectorXd u_star = Eigen::VectorXd::Zero(nn), f(nn);
    for (int iy = 0; iy < bp.mesh.n; ++iy)
      for (int ix = 0; ix < bp.mesh.n; ++ix)
        f[bp.mesh.index(ix, iy)] = source(bp.mesh.axis[ix], bp.mesh.axis[iy]);
    const DarcyLinearization lin =
        linearize_darcy(bp.mesh, u_star, f, bp.obs_points);
    const DarcyData data =
        generate_darcy_data(truth, source, cfg.fine_n, bp.mesh, lin,
                            bp.obs_points, cfg.noise_pct, data_rng);
    bp.H = lin.H_lin;
    bp.d = data.d_lin;
    bp.gamma_diag = Eigen::VectorXd::Constant(bp.d.size(), data.tau_inv);
    bp.truth_nodal.resize(nn);
    for (int iy = 0; iy < bp.mesh.n; ++iy)
      for (int ix = 0; ix < bp.mesh.n; ++ix)
        bp.truth_nodal[bp.mesh.index(ix, iy)] =
            truth(bp.mesh.axis[ix], bp.mesh.axis[iy]);
    bp.setup_solves = lin.pde_solve_counter->load();
    bp.counter->fetch_add(bp.setup_solves);
  }
  return bp;
}

ChainConfig to_chain_config(const SgdMethodSettings& s, std::uint64_t seed) {
  ChainConfig cc;
  cc.K = s.K;
  cc.J = s.J;
  cc.tol = s.tol;
  cc.S0 = s.S0;
  cc.p = s.p;
  cc.p_auto = s.p_auto;
  cc.q_refresh = s.q_refresh;
  cc.q_floor = s.q_floor;
  cc.average_samples = s.average_samples;
  cc.n_ite = s.N_ite;
  cc.seed = seed;
  return cc;
}

void write_method_artifacts(const fs::path& dir, const ChainOutput& chain,
                            const PriorSpectrum& spectrum,
                            const BuiltProblem& bp,
                            const GaussianPosterior& oracle,
                            bool write_dense, MethodSummary& summary) {
  fs::create_directories(dir);
  {
    std::vector<std::vector<double>> rows;
    for (size_t k = 0; k < chain.eta_series.size(); ++k) {
      rows.push_back({static_cast<double>(k + 1),
                      k < chain.relative_error_series.size()
                          ? chain.relative_error_series[k]
                          : 0.0,
                      chain.eta_series[k], chain.S_series[k]});
    }
    csv::write_rows(dir / "chain.csv", {"step", "relative_error", "eta", "S"},
                    rows);
  }
  {
    const int m = chain.formula_posterior.M;
    Eigen::MatrixXd samples(chain.samples.size(), bp.mesh.node_count());
    for (size_t i = 0; i < chain.samples.size(); ++i)
      samples.row(i) = (spectrum.modes.leftCols(m) * chain.samples[i]).transpose();
    csv::write_matrix(dir / "samples.csv", samples);
  }
  {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < chain.formula_posterior.s.size(); ++i)
      rows.push_back({static_cast<double>(i + 1),
                      chain.formula_posterior.mean_coeffs[i],
                      chain.formula_posterior.s[i],
                      chain.empirical_posterior.mean_coeffs[i],
                      chain.empirical_posterior.s[i]});
    csv::write_rows(dir / "variational_posterior.csv",
                    {"mode", "mean_formula", "variance_formula",
                     "mean_empirical", "variance_empirical"},
                    rows);
  }

  const Eigen::VectorXd chain_mean_nodal =
      spectrum.modes * chain.empirical_posterior.mean_coeffs;
  const Eigen::VectorXd formula_mean_nodal =
      spectrum.modes * chain.formula_posterior.mean_coeffs;
  {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < chain_mean_nodal.size(); ++i)
      rows.push_back({static_cast<double>(i), chain_mean_nodal[i],
                      formula_mean_nodal[i], bp.truth_nodal[i]});
    csv::write_rows(dir / "mean.csv", {"node", "chain_mean", "formula_mean", "truth"},
                    rows);
  }

  const CovarianceField formula_field =
      covariance_matrix_repr(chain.formula_posterior, spectrum);
  if (write_dense)
    csv::write_matrix(dir / "cov_formula.csv", formula_field.c);

  const CovarianceField exact_field = covariance_matrix_repr(oracle);
  summary.cov_frobenius_vs_exact = frobenius_rel_error(formula_field, exact_field);
  summary.mean_vs_exact =
      relative_l2_error(chain_mean_nodal, oracle.mean, bp.ops.mass);
  const DecayReport decay = error_decay_monitor(chain.relative_error_series);
  summary.error_plateau = decay.plateau;
  {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"full_matrix", csv::format(summary.cov_frobenius_vs_exact)});
    for (const int k : {0, 10, 20}) {
      const Eigen::VectorXd fa = variance_covariance_function(formula_field, k);
      const Eigen::VectorXd fb = variance_covariance_function(exact_field, k);
      const double err = (fa - fb).squaredNorm() / fb.squaredNorm();
      summary.cov_function_vs_exact[k] = err;
      rows.push_back({"offset_" + std::to_string(k), csv::format(err)});
    }
    csv::write_table(dir / "covariance_table.csv", {"metric", "vs_exact"}, rows);
  }

  // 95% credibility band around the chain mean, variances from the formula
  // posterior field.
  const Eigen::VectorXd pointwise_var = formula_field.c.diagonal();
  const CredibilityBand band =
      credibility_band(chain_mean_nodal, pointwise_var.cwiseMax(0.0), 0.95);
  {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < chain_mean_nodal.size(); ++i)
      rows.push_back({static_cast<double>(i), chain_mean_nodal[i],
                      band.lower[i], band.upper[i]});
    csv::write_rows(dir / "credibility_band.csv",
                    {"node", "mean", "lower", "upper"}, rows);
  }

  // plots
  {
    std::vector<double> xs(chain.relative_error_series.size());
    for (size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i + 1);
    svg::line_plot(dir / "error.svg",
                   {{xs, chain.relative_error_series, "#1f77b4", "rel. error"}},
                   "relative error vs step", true);
  }
  if (bp.mesh.dimension == 1) {
    std::vector<double> xs(bp.mesh.axis.begin(), bp.mesh.axis.end());
    svg::Band sband;
    sband.x = xs;
    sband.lower.assign(band.lower.data(), band.lower.data() + band.lower.size());
    sband.upper.assign(band.upper.data(), band.upper.data() + band.upper.size());
    std::vector<double> mean_v(chain_mean_nodal.data(),
                               chain_mean_nodal.data() + chain_mean_nodal.size());
    std::vector<double> truth_v(bp.truth_nodal.data(),
                                bp.truth_nodal.data() + bp.truth_nodal.size());
    svg::line_plot(dir / "mean_band.svg",
                   {{xs, mean_v, "#000000", "estimated mean"},
                    {xs, truth_v, "#d62728", "truth"}},
                   "posterior mean and 95% band", false, &sband);
    svg::heatmap(dir / "cov_heatmap.svg", formula_field.c, "covariance field");
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, bool dry_run) {
  ExperimentResult result;
  fs::path out_root = cfg.output_dir;
  if (const char* env = std::getenv("IVI_OUTPUT_ROOT"); env && *env)
    out_root = fs::path(env) / cfg.output_dir;
  result.artifact_dir = out_root;

  if (dry_run) {
    // Config echo and solve-count forecast only.
    for (const auto& m : cfg.methods) {
      MethodCost mc;
      mc.method = m;
      if (m == "csgd") {
        mc.iterations = static_cast<long long>(cfg.csgd.K) * cfg.csgd.J;
        mc.pde_solves = 2 * mc.iterations;
      } else if (m == "pcsgd") {
        mc.iterations = static_cast<long long>(cfg.pcsgd.K) * cfg.pcsgd.J;
        mc.pde_solves = (2 + 2 * cfg.pcsgd.N_ite) * mc.iterations;
      } else {
        const long burn = cfg.pcn.burn_in >= 0 ? cfg.pcn.burn_in
                                               : cfg.pcn.n_samples / 5;
        mc.iterations = burn + cfg.pcn.n_samples * cfg.pcn.thin;
        mc.pde_solves = mc.iterations;
      }
      result.cost.methods.push_back(mc);
      result.cost.total_solves += mc.pde_solves;
    }
    return result;
  }

  fs::create_directories(out_root);
  {
    std::ofstream cfg_out(out_root / "config.json");
    cfg_out << config_to_json(cfg) << "\n";
  }

  BuiltProblem bp = build_problem(cfg);
  const PriorOperator prior = build_prior(bp.mesh, bp.ops, cfg.alpha_prior);
  const PriorSpectrum spectrum = prior_spectrum(prior, bp.ops, cfg.C_M);
  result.truncation_M = spectrum.M;
  result.truncation_warning = spectrum.truncation_warning;
  const ModeParams mp = hessian_mode_coefficients(bp.H, bp.gamma_diag, spectrum);
  const GaussianPosterior oracle =
      exact_posterior(spectrum, bp.H, bp.gamma_diag, bp.d);

  const bool write_dense =
      cfg.write_dense_covariances && bp.mesh.node_count() <= 400;

  // shared artifacts
  {
    Eigen::MatrixXd nodes(bp.mesh.node_count(), bp.mesh.dimension);
    for (int i = 0; i < bp.mesh.node_count(); ++i) {
      nodes(i, 0) = bp.mesh.axis[i % bp.mesh.n];
      if (bp.mesh.dimension == 2) {
        nodes(i, 0) = bp.mesh.axis[i % bp.mesh.n];
        nodes(i, 1) = bp.mesh.axis[i / bp.mesh.n];
      }
    }
    csv::write_matrix(out_root / "mesh.csv", nodes,
                      bp.mesh.dimension == 1 ? std::vector<std::string>{"x"}
                                             : std::vector<std::string>{"x", "y"});
  }
  {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < spectrum.c.size(); ++i)
      rows.push_back({static_cast<double>(i + 1), spectrum.c[i]});
    csv::write_rows(out_root / "prior_spectrum.csv", {"index", "eigenvalue"}, rows);
  }
  {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < bp.d.size(); ++i)
      rows.push_back({bp.obs_points[i].x, bp.obs_points[i].y, bp.d[i],
                      bp.gamma_diag[i]});
    csv::write_rows(out_root / "data.csv", {"x", "y", "d", "gamma"}, rows);
  }
  csv::write_vector(out_root / "posterior_mean_exact.csv", oracle.mean, "mean");
  if (write_dense)
    csv::write_matrix(out_root / "posterior_cov_exact.csv", oracle.covariance);

  ChainProblem chain_problem;
  chain_problem.spectrum = &spectrum;
  chain_problem.mode_params = &mp;
  chain_problem.u_bar_coeffs = oracle.mean_coeffs;
  chain_problem.truth_nodal = bp.truth_nodal;
  chain_problem.mass = &bp.ops.mass;
  chain_problem.pde_counter = bp.counter;

  result.cost.setup_solves = bp.setup_solves;
  std::map<std::string, Eigen::VectorXd> method_means;

  for (const auto& method : cfg.methods) {
    MethodCost cost;
    cost.method = method;
    const long long before = bp.counter->load();
    const auto t0 = std::chrono::steady_clock::now();
    MethodSummary summary;
    summary.method = method;

    if (method == "csgd" || method == "pcsgd") {
      const bool pc = method == "pcsgd";
      const SgdMethodSettings& s = pc ? cfg.pcsgd : cfg.csgd;
      const ChainConfig cc = to_chain_config(s, cfg.seed + (pc ? 2 : 1));
      const ChainOutput chain = run_chain(
          chain_problem, pc ? Variant::pcsgd : Variant::csgd, cc);
      write_method_artifacts(out_root / method, chain, spectrum, bp, oracle,
                             write_dense, summary);
      method_means[method] = spectrum.modes * chain.empirical_posterior.mean_coeffs;
      cost.iterations = static_cast<long long>(chain.steps_run) * cc.J;
    } else {
      PcnConfig pconf;
      pconf.beta = cfg.pcn.beta;
      pconf.auto_tune = cfg.pcn.auto_tune;
      pconf.n_samples = cfg.pcn.n_samples;
      pconf.burn_in = cfg.pcn.burn_in;
      pconf.thin = cfg.pcn.thin;
      pconf.seed = cfg.seed + 3;
      const PcnResult pcn =
          run_pcn(spectrum, bp.H, bp.gamma_diag, bp.d, pconf, bp.counter);
      const fs::path dir = out_root / "pcn";
      fs::create_directories(dir);
      {
        std::vector<std::vector<double>> rows;
        for (size_t i = 0; i < pcn.phi_trace.size(); ++i)
          rows.push_back({static_cast<double>(i), pcn.phi_trace[i],
                          static_cast<double>(pcn.accept_trace[i])});
        csv::write_rows(dir / "trace.csv", {"iteration", "phi", "accepted"}, rows);
      }
      // moments + a strided subset of nodal samples
      Eigen::VectorXd mean_c = Eigen::VectorXd::Zero(spectrum.c.size());
      for (const auto& s : pcn.samples) mean_c += s;
      mean_c /= static_cast<double>(pcn.samples.size());
      std::vector<Eigen::VectorXd> nodal;
      nodal.reserve(pcn.samples.size() / cfg.pcn.sample_stride + 1);
      for (size_t i = 0; i < pcn.samples.size();
           i += static_cast<size_t>(cfg.pcn.sample_stride))
        nodal.push_back(spectrum.modes * pcn.samples[i]);
      Eigen::MatrixXd sm(nodal.size(), bp.mesh.node_count());
      for (size_t i = 0; i < nodal.size(); ++i) sm.row(i) = nodal[i].transpose();
      csv::write_matrix(dir / "samples.csv", sm);

      const Eigen::VectorXd mean_nodal = spectrum.modes * mean_c;
      method_means[method] = mean_nodal;
      summary.mean_vs_exact =
          relative_l2_error(mean_nodal, oracle.mean, bp.ops.mass);
      // empirical covariance in coefficient space, then to the nodal field
      Eigen::MatrixXd cov_c =
          Eigen::MatrixXd::Zero(spectrum.c.size(), spectrum.c.size());
      for (const auto& s : pcn.samples) {
        const Eigen::VectorXd d0 = s - mean_c;
        cov_c.noalias() += d0 * d0.transpose();
      }
      cov_c /= static_cast<double>(pcn.samples.size()) - 1.0;
      const CovarianceField emp_field{
          spectrum.modes * cov_c * spectrum.modes.transpose(),
          CovProvenance::empirical};
      if (write_dense) csv::write_matrix(dir / "cov_empirical.csv", emp_field.c);
      const CovarianceField exact_field = covariance_matrix_repr(oracle);
      summary.cov_frobenius_vs_exact =
          frobenius_rel_error(emp_field, exact_field);
      std::vector<std::vector<std::string>> rows;
      rows.push_back({"full_matrix", csv::format(summary.cov_frobenius_vs_exact)});
      for (const int k : {0, 10, 20}) {
        const Eigen::VectorXd fa = variance_covariance_function(emp_field, k);
        const Eigen::VectorXd fb = variance_covariance_function(exact_field, k);
        const double err = (fa - fb).squaredNorm() / fb.squaredNorm();
        summary.cov_function_vs_exact[k] = err;
        rows.push_back({"offset_" + std::to_string(k), csv::format(err)});
      }
      csv::write_table(dir / "covariance_table.csv", {"metric", "vs_exact"}, rows);
      {
        std::vector<std::vector<double>> mrow;
        for (int i = 0; i < mean_nodal.size(); ++i)
          mrow.push_back({static_cast<double>(i), mean_nodal[i],
                          bp.truth_nodal[i]});
        csv::write_rows(dir / "mean.csv", {"node", "mean", "truth"}, mrow);
      }
      cost.iterations = pcn.pde_solve_count;
    }

    cost.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    cost.pde_solves = bp.counter->load() - before;
    result.cost.methods.push_back(cost);
    result.summaries.push_back(summary);
  }
  result.cost.total_solves = bp.counter->load();

  // cross-method comparison table
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : result.summaries) {
      rows.push_back({s.method, csv::format(s.error_plateau),
                      csv::format(s.mean_vs_exact),
                      csv::format(s.cov_frobenius_vs_exact)});
    }
    csv::write_table(out_root / "compare.csv",
                     {"method", "error_plateau", "mean_vs_exact",
                      "cov_frobenius_vs_exact"},
                     rows);
  }
  // deterministic cost columns; wall times go to timing.csv (excluded from
  // byte-identity checks)
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : result.cost.methods)
      rows.push_back({m.method, std::to_string(m.pde_solves),
                      std::to_string(m.iterations)});
    rows.push_back({"setup", std::to_string(result.cost.setup_solves), "0"});
    rows.push_back({"total", std::to_string(result.cost.total_solves), "0"});
    csv::write_table(out_root / "cost_report.csv",
                     {"method", "pde_solves", "iterations"}, rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : result.cost.methods) {
      const double per_step =
          m.iterations > 0 ? m.wall_seconds / static_cast<double>(m.iterations)
                           : 0.0;
      rows.push_back({m.method, csv::format(m.wall_seconds),
                      csv::format(per_step)});
    }
    csv::write_table(out_root / "timing.csv",
                     {"method", "wall_seconds", "seconds_per_iteration"}, rows);
  }
  {
    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["config_hash"] = config_hash(cfg);
    manifest["problem_hash"] = problem_hash(cfg);
    manifest["version"] = kVersion;
    manifest["truncation_M"] = spectrum.M;
    manifest["truncation_warning"] = spectrum.truncation_warning;
    std::ofstream out(out_root / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  return result;
}

std::filesystem::path compare_report(
    const std::vector<std::filesystem::path>& artifact_dirs,
    const std::filesystem::path& out) {
  if (artifact_dirs.size() < 2)
    throw ValidationError("compare: need at least two artifact directories");
  std::vector<json> manifests;
  for (const auto& dir : artifact_dirs) {
    const fs::path mf = dir / "manifest.json";
    if (!fs::exists(mf))
      throw ValidationError("compare: no manifest in " + dir.string());
    std::ifstream in(mf);
    json j;
    in >> j;
    manifests.push_back(j);
  }
  const auto h0 = manifests.front().at("problem_hash").get<std::uint64_t>();
  for (const auto& m : manifests)
    if (m.at("problem_hash").get<std::uint64_t>() != h0)
      throw ValidationError("compare: mismatched problem hashes, refusing");

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"dir", "method", "error_plateau",
                                     "mean_vs_exact", "cov_frobenius_vs_exact",
                                     "mean_vs_first_dir"};
  // cross-run mean differences use the exact-posterior-mean files
  std::vector<Eigen::MatrixXd> means;
  for (const auto& dir : artifact_dirs)
    means.push_back(csv::read_matrix(dir / "posterior_mean_exact.csv"));
  for (size_t di = 0; di < artifact_dirs.size(); ++di) {
    std::ifstream in(artifact_dirs[di] / "compare.csv");
    if (!in)
      throw ValidationError("compare: missing compare.csv in " +
                            artifact_dirs[di].string());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      const double cross =
          (means[di] - means[0]).squaredNorm() / means[0].squaredNorm();
      rows.push_back({artifact_dirs[di].string(), cells[0], cells[1], cells[2],
                      cells[3], csv::format(cross)});
    }
  }
  csv::write_table(out, header, rows);
  return out;
}

int spectrum_report(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const Mesh mesh = build_mesh(cfg.problem == ProblemKind::elliptic1d ? 1 : 2,
                               cfg.mesh_n);
  const AssembledOperators ops = assemble_operators(mesh);
  const PriorOperator prior = build_prior(mesh, ops, cfg.alpha_prior);
  const PriorSpectrum spectrum = prior_spectrum(prior, ops, cfg.C_M);
  fs::create_directories(out_dir);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < spectrum.c.size(); ++i)
    rows.push_back({static_cast<double>(i + 1), spectrum.c[i]});
  csv::write_rows(out_dir / "prior_spectrum.csv", {"index", "eigenvalue"}, rows);
  std::vector<double> xs(spectrum.c.size()), ys(spectrum.c.size());
  for (int i = 0; i < spectrum.c.size(); ++i) {
    xs[i] = i + 1;
    ys[i] = spectrum.c[i];
  }
  svg::line_plot(out_dir / "prior_spectrum.svg",
                 {{xs, ys, "#1f77b4", "eigenvalues"}},
                 "prior eigenvalues (log scale), M = " + std::to_string(spectrum.M),
                 true);
  return spectrum.M;
}

}  // namespace ivi
