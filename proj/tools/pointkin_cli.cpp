// pointkin: command-line front end for the stochastic point kinetics library.
//
//   pointkin solve      --scenario table1 --method det
//   pointkin ensemble   --scenario table3 --method mc --samples 5000 --seed 42
//   pointkin reproduce  --table 1
//   pointkin plotdata   --scenario table3 --method mc
//   pointkin scenario   --scenario table2          (prints the YAML config)
//
// Output files go to --out, else $POINTKIN_OUT_DIR, else the working directory.
// Failures exit non-zero with a JSON error document on stderr.

#include "pointkin/error.hpp"
#include "pointkin/report.hpp"
#include "pointkin/scenario.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace pointkin;

namespace {

struct CommonOptions {
  std::string scenario = "table1";
  std::string method;
  std::optional<long> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::string out;
  std::string mode;
  std::string yield;
  bool zero_noise = false;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_samples) {
  cmd->add_option("--scenario", o.scenario, "Preset name or YAML scenario file")
      ->capture_default_str();
  cmd->add_option("--method", o.method, "det | em | pca | mc (default: scenario method)")
      ->check(CLI::IsMember({"det", "em", "pca", "mc"}));
  if (with_samples) cmd->add_option("--samples", o.samples, "Fixed number of sample paths");
  cmd->add_option("--seed", o.seed, "Master seed");
  cmd->add_option("--dt", o.dt, "Step size of the selected method");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--mode", o.mode, "Monte Carlo mode")->check(CLI::IsMember({"fixed", "exact"}));
  cmd->add_option("--yield", o.yield, "Monte Carlo fission yield model")
      ->check(CLI::IsMember({"fractional", "integer"}));
  cmd->add_flag("--zero-noise", o.zero_noise, "Diagnostic: drop the diffusion term");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

fs::path output_dir(const std::string& flag) {
  fs::path dir = ".";
  if (!flag.empty()) {
    dir = flag;
  } else if (const char* env = std::getenv("POINTKIN_OUT_DIR"); env && *env) {
    dir = env;
  }
  fs::create_directories(dir);
  return dir;
}

template <class Writer>
fs::path write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("io", "cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw Error("io", "failed writing '" + path.string() + "'");
  std::cout << path.string() << '\n';
  return path;
}

/// Scenario with the command-line overrides applied.
struct Prepared {
  ScenarioConfig scenario;
  RunMethod method;
};

Prepared prepare(const CommonOptions& o) {
  Prepared p{load_scenario(o.scenario), RunMethod::Deterministic};
  ScenarioConfig& s = p.scenario;
  p.method = o.method.empty() ? s.method : parse_run_method(o.method);
  if (o.seed) s.ensemble.seed = *o.seed;
  if (o.samples) {
    if (*o.samples < 1) throw ConfigError("--samples must be >= 1");
    s.ensemble.min_samples = *o.samples;
    s.ensemble.max_samples = *o.samples;
  }
  if (o.threads) s.ensemble.threads = *o.threads;
  if (!o.mode.empty()) s.mc.mode = o.mode == "fixed" ? McMode::FixedStep : McMode::ExactJump;
  if (!o.yield.empty()) {
    s.mc.yield = o.yield == "fractional" ? YieldModel::FractionalExpected
                                         : YieldModel::IntegerSampled;
  }
  if (o.dt) {
    switch (p.method) {
      case RunMethod::Deterministic: s.steps.det = *o.dt; break;
      case RunMethod::EulerMaruyama: s.steps.em = *o.dt; break;
      case RunMethod::StochasticPca: s.steps.pca = *o.dt; break;
      case RunMethod::EventMc: s.mc.dt = *o.dt; break;
    }
  }
  validate_scenario(s);
  return p;
}

std::string stem(const Prepared& p) {
  std::string name = p.scenario.name;
  for (char& ch : name) {
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
  }
  return name + "_" + to_string(p.method);
}

int run_solve(const CommonOptions& o) {
  const Prepared p = prepare(o);
  const ScenarioConfig& s = p.scenario;
  const StateVector x0 = s.initial_state();
  const fs::path dir = output_dir(o.out);
  const fs::path path = dir / ("trajectory_" + stem(p) + ".csv");

  if (p.method == RunMethod::EventMc) {
    McConfig mc;
    mc.mode = s.mc.mode;
    mc.yield = s.mc.yield;
    mc.dt = s.mc.dt;
    mc.record_times = record_times(s.grid(RunMethod::EventMc), 1);
    NoiseSource noise(derive_seed(s.ensemble.seed, 0));
    const McTrajectory traj = mc_trajectory(s.parameters, x0, s.horizon, mc, noise);
    write_file(path, [&](std::ostream& out) { write_trajectory_csv(out, traj); });
    return 0;
  }

  SolverOptions opts;
  opts.zero_noise = o.zero_noise;
  opts.psd_policy = s.psd_policy;
  opts.record_every = s.record_every(p.method);
  const TimeGrid grid = s.grid(p.method);
  Trajectory traj;
  if (p.method == RunMethod::Deterministic) {
    traj = deterministic_solve(s.parameters, x0, grid, opts);
  } else {
    NoiseSource noise(derive_seed(s.ensemble.seed, 0));
    traj = p.method == RunMethod::EulerMaruyama
               ? euler_maruyama_solve(s.parameters, x0, grid, noise, opts)
               : stochastic_pca_solve(s.parameters, x0, grid, noise, opts);
  }
  write_file(path, [&](std::ostream& out) { write_trajectory_csv(out, traj); });
  return 0;
}

EnsembleConfig ensemble_config(const Prepared& p, bool zero_noise) {
  EnsembleConfig cfg = p.scenario.ensemble_config(p.method);
  cfg.solver.zero_noise = zero_noise;
  return cfg;
}

int run_ensemble_cmd(const CommonOptions& o) {
  const Prepared p = prepare(o);
  if (p.method == RunMethod::Deterministic) {
    throw ConfigError("ensemble requires a stochastic method (em, pca or mc)");
  }
  const ScenarioConfig& s = p.scenario;
  const EnsembleSummary summary = run_ensemble(s.parameters, s.initial_state(), s.grid(p.method),
                                               ensemble_config(p, o.zero_noise));
  const fs::path dir = output_dir(o.out);
  write_file(dir / ("summary_" + stem(p) + ".csv"),
             [&](std::ostream& out) { write_summary_csv(out, summary); });
  write_file(dir / ("summary_" + stem(p) + ".json"),
             [&](std::ostream& out) { out << summary_json(summary, s.name); });
  return 0;
}

int run_plotdata(const CommonOptions& o) {
  const Prepared p = prepare(o);
  if (p.method == RunMethod::Deterministic) {
    throw ConfigError("plotdata requires a stochastic method (em, pca or mc)");
  }
  const ScenarioConfig& s = p.scenario;
  const StateVector x0 = s.initial_state();
  const TimeGrid grid = s.grid(p.method);
  const EnsembleConfig cfg = ensemble_config(p, o.zero_noise);
  const EnsembleSummary summary = run_ensemble(s.parameters, x0, grid, cfg);
  const PathRecord sample1 = simulate_path(s.parameters, x0, grid, cfg, 0);
  const PathRecord sample2 = simulate_path(s.parameters, x0, grid, cfg, 1);
  write_file(output_dir(o.out) / ("plotdata_" + stem(p) + ".csv"), [&](std::ostream& out) {
    write_plot_data_csv(out, summary, sample1, sample2);
  });
  return 0;
}

struct ReproduceArgs {
  int table = 1;
  long samples = 10000;
  std::uint64_t seed = 1;
  std::string out;
  std::vector<std::string> methods;
  unsigned threads = 0;
};

int run_reproduce(const ReproduceArgs& a) {
  ReproduceOptions opts;
  opts.samples = a.samples;
  opts.seed = a.seed;
  opts.threads = a.threads;
  if (!a.methods.empty()) {
    opts.methods.clear();
    for (const auto& m : a.methods) opts.methods.push_back(parse_run_method(m));
  }
  const ResultTable table = reproduce_table(a.table, opts);
  write_file(output_dir(a.out) / ("table" + std::to_string(a.table) + ".csv"),
             [&](std::ostream& out) { write_result_table_csv(out, table); });
  return 0;
}

void print_error(const std::string& kind, const std::string& message,
                 const nlohmann::ordered_json& extra = {}) {
  nlohmann::ordered_json doc;
  doc["error"]["kind"] = kind;
  doc["error"]["message"] = message;
  if (extra.is_object()) {
    for (const auto& [k, v] : extra.items()) doc["error"][k] = v;
  }
  std::cerr << doc.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic neutron point kinetics: deterministic, Euler-Maruyama, "
               "stochastic PCA and event Monte Carlo"};
  app.require_subcommand(1);

  CommonOptions solve_opts;
  auto* solve = app.add_subcommand("solve", "One deterministic or single-seed path -> trajectory CSV");
  add_common(solve, solve_opts, false);

  CommonOptions ens_opts;
  auto* ensemble = app.add_subcommand("ensemble", "Seeded ensemble -> summary CSV + JSON");
  add_common(ensemble, ens_opts, true);

  CommonOptions plot_opts;
  auto* plot = app.add_subcommand("plotdata", "Mean +/- sigma band and two sample paths of n");
  add_common(plot, plot_opts, true);

  ReproduceArgs rep;
  auto* reproduce = app.add_subcommand("reproduce", "Result table with all method columns");
  reproduce->add_option("--table", rep.table, "Table number")
      ->required()
      ->check(CLI::IsMember({1, 2, 3}));
  reproduce->add_option("--samples", rep.samples, "Paths per stochastic method")
      ->capture_default_str();
  reproduce->add_option("--seed", rep.seed, "Master seed")->capture_default_str();
  reproduce->add_option("--out", rep.out, "Output directory");
  reproduce->add_option("--methods", rep.methods, "Subset of det, em, pca, mc")
      ->delimiter(',')
      ->check(CLI::IsMember({"det", "em", "pca", "mc"}));
  reproduce->add_option("--threads", rep.threads, "Worker threads (0 = all cores)");

  std::string show_name = "table1";
  auto* show = app.add_subcommand("scenario", "Print a scenario as YAML");
  show->add_option("--scenario", show_name, "Preset name or YAML file")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(solve_opts);
    if (*ensemble) return run_ensemble_cmd(ens_opts);
    if (*plot) return run_plotdata(plot_opts);
    if (*reproduce) return run_reproduce(rep);
    if (*show) {
      std::cout << serialize_scenario(load_scenario(show_name));
      return 0;
    }
  } catch (const ConfigError& e) {
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();
    if (e.line() > 0) extra["line"] = e.line();
    print_error(e.kind(), e.what(), extra);
    return 1;
  } catch (const SimulationError& e) {
    print_error(e.kind(), e.what(), {{"step", e.step()}, {"time", e.time()}});
    return 1;
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 1;
}
