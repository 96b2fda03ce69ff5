// Command-line front end: single campaigns, Monte-Carlo studies, adversary
// oracles and the objective catalogue.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rbo/errors.hpp"
#include "rbo/harness.hpp"
#include "rbo/testbed.hpp"

namespace {

void print_point(std::ostream& out, const std::vector<double>& x) {
  out << '(';
  for (std::size_t j = 0; j < x.size(); ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x[j]);
    out << (j ? ", " : "") << buf;
  }
  out << ')';
}

// Options shared by `run` and `adversary` that map onto config keys.
struct SettingFlags {
  std::vector<std::pair<std::string, std::string>> values;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { values.emplace_back(key, v); }, help);
  }
  void apply(rbo::StudyConfig& cfg) const {
    for (const auto& [k, v] : values) rbo::apply_setting(cfg, k, v);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust Bayesian optimization: REGO, EGO and competitors on synthetic benchmarks"};
  app.require_subcommand(1);

  auto* functions = app.add_subcommand("functions", "List available objectives and variants");

  SettingFlags adv_flags;
  auto* adversary = app.add_subcommand("adversary", "Grid-oracle robust minimizer for an objective and alpha");
  adv_flags.add(adversary, "--objective", "objective", "Objective name");
  adv_flags.add(adversary, "--variant", "variant", "Objective variant");
  adv_flags.add(adversary, "--dim", "dim", "Dimension (rosenbrock, external)");
  adv_flags.add(adversary, "--command", "command", "External evaluator command");
  adv_flags.add(adversary, "--table", "table", "External lookup-table CSV");
  adv_flags.add(adversary, "--alpha", "alpha", "Half-width(s), comma separated");
  adv_flags.add(adversary, "--step", "oracle_step", "Oracle grid spacing");

  SettingFlags run_flags;
  std::size_t rep = 0;
  auto* run = app.add_subcommand("run", "Run one campaign and print its records as CSV");
  run_flags.add(run, "--objective", "objective", "Objective name");
  run_flags.add(run, "--variant", "variant", "Objective variant");
  run_flags.add(run, "--dim", "dim", "Dimension (rosenbrock, external)");
  run_flags.add(run, "--command", "command", "External evaluator command");
  run_flags.add(run, "--table", "table", "External lookup-table CSV");
  run_flags.add(run, "--method", "method", "Acquisition method");
  run_flags.add(run, "--alpha", "alpha", "Benchmark half-width(s)");
  run_flags.add(run, "--alpha-max", "alpha_max", "Upper alpha for rand/sum modes");
  run_flags.add(run, "--nodes", "nodes", "Sum-mode integration nodes");
  run_flags.add(run, "--intermediate", "intermediate", "Interior cornering points per dimension");
  run_flags.add(run, "--theta", "theta", "GP lengthscale");
  run_flags.add(run, "--theta-adv", "theta_adv", "Adversarial GP lengthscale");
  run_flags.add(run, "--n0", "n0", "Initial LHS size");
  run_flags.add(run, "--budget", "budget", "Total evaluation budget N");
  run_flags.add(run, "--n-cand", "n_cand", "Candidates per acquisition");
  run_flags.add(run, "--seed", "seed", "Random seed");
  run_flags.add(run, "--timing", "timing", "wall|off");
  run->add_option("--rep", rep, "Replicate index");

  std::string config_path;
  std::string out_dir = "rego_out";
  SettingFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Monte-Carlo study from a key=value config file; writes CSVs");
  bench->add_option("--config", config_path, "Study config file")->required();
  bench->add_option("--out", out_dir, "Output directory");
  bench_flags.add(bench, "--seed", "seed", "Override seed");
  bench_flags.add(bench, "--reps", "reps", "Override replicate count");
  bench_flags.add(bench, "--threads", "threads", "Parallel replicates");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*functions) {
      for (const auto& line : rbo::describe_objectives()) std::cout << line << '\n';
      return 0;
    }
    if (*adversary) {
      rbo::StudyConfig cfg;
      adv_flags.apply(cfg);
      const rbo::ObjectiveSpec f = cfg.objective.build();
      const auto defaults = rbo::problem_defaults(cfg.objective.name, f.dim);
      const auto alpha = rbo::broadcast(cfg.alpha.empty() ? defaults.alpha : cfg.alpha, f.dim);
      const rbo::OracleResult o = rbo::robust_optimum(f, alpha, cfg.oracle_step);
      std::cout << "objective " << f.label() << "\nalpha ";
      print_point(std::cout, alpha);
      std::cout << "\nxr ";
      print_point(std::cout, o.xr);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", o.g_at_xr);
      std::cout << "\ng " << buf << "\nstep " << o.grid_step << '\n';
      return 0;
    }
    if (*run) {
      rbo::StudyConfig cfg;
      run_flags.apply(cfg);
      if (cfg.methods.empty()) cfg.methods = {rbo::Method::ego};
      const rbo::ObjectiveSpec f = cfg.objective.build();
      const rbo::CampaignConfig c = cfg.campaign(cfg.methods.front(), f.dim);
      c.validate(f.dim);
      const rbo::OracleResult o = rbo::robust_optimum(f, rbo::broadcast(c.alpha.alpha, f.dim), cfg.oracle_step);
      const rbo::CampaignResult res = rbo::run_campaign(c, f, o, rep);
      std::cout << rbo::records_header(f.dim) << '\n';
      rbo::write_records(std::cout, c.method, res.records);
      return 0;
    }
    if (*bench) {
      rbo::StudyConfig cfg = rbo::load_study_config(config_path);
      bench_flags.apply(cfg);
      const rbo::StudyResult res = rbo::run_mc(cfg);
      rbo::write_study(res, cfg, out_dir);
      std::size_t failed = 0;
      for (const auto& s : res.status) failed += s.ok ? 0 : 1;
      std::cerr << "wrote " << out_dir << " (" << res.status.size() << " campaigns, " << failed << " failed)\n";
      return failed == 0 ? 0 : 3;
    }
  } catch (const rbo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
