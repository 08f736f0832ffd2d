#include "pointkin/scenario.hpp"

#include "pointkin/error.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace pointkin {

std::string to_string(RunMethod method) {
  switch (method) {
    case RunMethod::Deterministic: return "det";
    case RunMethod::EulerMaruyama: return "em";
    case RunMethod::StochasticPca: return "pca";
    case RunMethod::EventMc: return "mc";
  }
  return "unknown";
}

RunMethod parse_run_method(std::string_view name) {
  if (name == "det") return RunMethod::Deterministic;
  if (name == "em") return RunMethod::EulerMaruyama;
  if (name == "pca") return RunMethod::StochasticPca;
  if (name == "mc") return RunMethod::EventMc;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected det, em, pca or mc)");
}

EnsembleMethod to_ensemble_method(RunMethod method) {
  switch (method) {
    case RunMethod::EulerMaruyama: return EnsembleMethod::EulerMaruyama;
    case RunMethod::StochasticPca: return EnsembleMethod::StochasticPca;
    case RunMethod::EventMc: return EnsembleMethod::EventMc;
    case RunMethod::Deterministic: break;
  }
  throw ConfigError("the deterministic method has no ensemble");
}

// ---------------------------------------------------------------------------
// ScenarioConfig

StateVector ScenarioConfig::initial_state() const {
  if (const auto* e = std::get_if<ExplicitInitial>(&initial)) {
    if (static_cast<int>(e->values.size()) != parameters.dim()) {
      throw ConfigError("initial state has " + std::to_string(e->values.size()) +
                        " components, expected m+1 = " + std::to_string(parameters.dim()));
    }
    DenseVector v(parameters.dim());
    for (int k = 0; k < parameters.dim(); ++k) v(k) = e->values[static_cast<std::size_t>(k)];
    return StateVector(std::move(v));
  }
  if (const auto* s = std::get_if<SourceFreeEquilibrium>(&initial)) {
    return equilibrium_state(parameters, 0.0, *s);
  }
  return equilibrium_state(parameters, 0.0, SourcedEquilibrium{});
}

double ScenarioConfig::step(RunMethod m) const {
  switch (m) {
    case RunMethod::Deterministic: return steps.det;
    case RunMethod::EulerMaruyama: return steps.em;
    case RunMethod::StochasticPca: return steps.pca;
    case RunMethod::EventMc: return record_dt;
  }
  return record_dt;
}

TimeGrid ScenarioConfig::grid(RunMethod m) const {
  try {
    return TimeGrid(0.0, horizon, step(m));
  } catch (const ValidationError& e) {
    throw ConfigError(to_string(m) + " grid: " + e.what());
  }
}

long ScenarioConfig::record_every(RunMethod m) const {
  const double h = step(m);
  const double ratio = record_dt / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os.precision(17);
    os << "record_dt " << record_dt << " is not an integer multiple of the " << to_string(m)
       << " step " << h;
    throw ConfigError(os.str());
  }
  return static_cast<long>(rounded);
}

EnsembleConfig ScenarioConfig::ensemble_config(RunMethod m) const {
  EnsembleConfig cfg;
  cfg.method = to_ensemble_method(m);
  cfg.master_seed = ensemble.seed;
  cfg.min_samples = ensemble.min_samples;
  cfg.max_samples = ensemble.max_samples;
  cfg.target_rel_halfwidth = ensemble.target_rel_halfwidth;
  cfg.batch_size = ensemble.batch_size;
  cfg.threads = ensemble.threads;
  cfg.solver.psd_policy = psd_policy;
  cfg.solver.record_every = record_every(m);
  cfg.mc.mode = mc.mode;
  cfg.mc.yield = mc.yield;
  cfg.mc.dt = mc.dt;
  return cfg;
}

void validate_scenario(const ScenarioConfig& c) {
  if (!std::isfinite(c.horizon) || !(c.horizon > 0.0)) {
    throw ConfigError("horizon must be finite and > 0");
  }
  if (!std::isfinite(c.record_dt) || !(c.record_dt > 0.0)) {
    throw ConfigError("record_dt must be finite and > 0");
  }
  c.grid(RunMethod::EventMc);
  for (auto m : {RunMethod::Deterministic, RunMethod::EulerMaruyama, RunMethod::StochasticPca}) {
    if (!(c.step(m) > 0.0)) throw ConfigError(to_string(m) + " step must be > 0");
    c.record_every(m);
  }
  if (!(c.mc.dt >= 0.0)) throw ConfigError("mc.dt must be >= 0 (0 = automatic)");
  const auto& e = c.ensemble;
  if (e.min_samples < 1 || e.min_samples > e.max_samples) {
    throw ConfigError("ensemble requires 1 <= min_samples <= max_samples");
  }
  if (!(e.target_rel_halfwidth > 0.0)) {
    throw ConfigError("ensemble.target_rel_halfwidth must be > 0");
  }
  if (e.batch_size < 1) throw ConfigError("ensemble.batch_size must be >= 1");
  const StateVector x0 = c.initial_state();
  if (x0.dim() != c.parameters.dim()) throw ConfigError("initial state dimension mismatch");
}

// ---------------------------------------------------------------------------
// Presets

namespace {

const std::vector<double> kSixGroupLambda{0.0127, 0.0317, 0.115, 0.311, 1.4, 3.87};
const std::vector<double> kSixGroupBeta{0.000266, 0.001491, 0.001316,
                                        0.002849, 0.000896, 0.000182};

ScenarioConfig six_group(std::string name, double rho, double horizon) {
  ScenarioConfig c{
      .name = std::move(name),
      .notes = {},
      .parameters = KineticsParameters(kSixGroupLambda, kSixGroupBeta, 2.5, 0.00002,
                                       ReactivityFunction::constant(rho),
                                       SourceFunction::constant(0.0)),
      .initial = SourceFreeEquilibrium{100.0},
      .horizon = horizon,
  };
  c.psd_policy = PsdPolicy::Project;
  c.steps.em = 1e-5;
  c.ensemble.min_samples = 2000;
  c.ensemble.max_samples = 2000;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"table1", "table2", "table3", "linear-rho"}; }

ScenarioConfig preset(std::string_view name) {
  if (name == "table1") {
    ScenarioConfig c{
        .name = "table1",
        .notes = "One precursor group, step reactivity rho=-1/3, source q=200. beta_1 is 0.05: "
                 "with the often-quoted 0.005 the stated initial state (400, 300) is not an "
                 "equilibrium (the drift equilibrium would be (400, 30)).",
        .parameters = KineticsParameters({0.1}, {0.05}, 2.5, 2.0 / 3.0,
                                         ReactivityFunction::constant(-1.0 / 3.0),
                                         SourceFunction::constant(200.0)),
        .initial = SourcedEquilibrium{},
        .horizon = 2.0,
        .record_dt = 0.1,
    };
    c.steps = {.det = 0.01, .em = 1e-3, .pca = 1e-3};
    c.ensemble.min_samples = 10000;
    c.ensemble.max_samples = 100000;
    return c;
  }
  if (name == "table2") {
    ScenarioConfig c = six_group("table2", 0.003, 0.1);
    c.notes = "Six precursor groups, prompt step rho=0.003, source-free equilibrium with n(0)=100.";
    c.record_dt = 0.005;
    c.steps.det = 1e-3;
    c.steps.pca = 1e-3;
    // About 5e5 events per path to t=0.1; exact jumps avoid ten fixed steps per event.
    c.mc.mode = McMode::ExactJump;
    return c;
  }
  if (name == "table3") {
    ScenarioConfig c = six_group("table3", 0.007, 0.001);
    c.notes = "Six precursor groups, prompt step rho=0.007, source-free equilibrium with n(0)=100.";
    c.record_dt = 5e-5;
    c.steps.det = 1e-5;
    // The horizon is a single 1e-3 step; PCA uses the EM step instead.
    c.steps.pca = 1e-5;
    return c;
  }
  if (name == "linear-rho") {
    ScenarioConfig c{
        .name = "linear-rho",
        .notes = "One precursor group with reactivity ramp rho(t)=0.25 t from a source-free "
                 "equilibrium with n(0)=100. The population grows without bound, so the "
                 "event Monte Carlo is only practical for short horizons.",
        .parameters =
            KineticsParameters({0.1}, {0.005}, 2.5, 0.00001, ReactivityFunction::linear(0.25),
                               SourceFunction::constant(0.0)),
        .initial = SourceFreeEquilibrium{100.0},
        .horizon = 0.1,
        .record_dt = 0.005,
    };
    c.psd_policy = PsdPolicy::Project;
    c.steps = {.det = 1e-4, .em = 1e-6, .pca = 1e-4};
    c.mc.mode = McMode::ExactJump;
    c.ensemble.min_samples = 1000;
    c.ensemble.max_samples = 1000;
    return c;
  }
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected table1, table2, table3 or linear-rho)");
}

// ---------------------------------------------------------------------------
// YAML

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : -1; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  const int line = line_of(node);
  throw ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + message : message, line);
}

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail(node, section + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) fail(kv.first, "unknown key '" + key + "' in " + section);
  }
}

YAML::Node require(const YAML::Node& parent, const std::string& key, const std::string& section) {
  YAML::Node child = parent[key];
  if (!child) fail(parent, "missing key '" + key + "' in " + section);
  return child;
}

template <class T>
T as(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "field '" + field + "' has the wrong type");
  }
}

template <class T>
T get_or(const YAML::Node& parent, const std::string& key, T fallback) {
  const YAML::Node child = parent[key];
  return child ? as<T>(child, key) : fallback;
}

std::vector<double> as_list(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence()) fail(node, "field '" + field + "' must be a list");
  return as<std::vector<double>>(node, field);
}

PiecewiseConstant parse_piecewise(const YAML::Node& node) {
  return {as_list(require(node, "breakpoints", "piecewise function"), "breakpoints"),
          as_list(require(node, "values", "piecewise function"), "values")};
}

ReactivityFunction parse_reactivity(const YAML::Node& node) {
  check_keys(node, "reactivity", {"type", "value", "slope", "breakpoints", "values"});
  const auto type = as<std::string>(require(node, "type", "reactivity"), "type");
  try {
    if (type == "constant") {
      return ReactivityFunction::constant(as<double>(require(node, "value", "reactivity"), "value"));
    }
    if (type == "linear") {
      return ReactivityFunction::linear(as<double>(require(node, "slope", "reactivity"), "slope"));
    }
    if (type == "piecewise") {
      auto f = parse_piecewise(node);
      return ReactivityFunction::piecewise(std::move(f.breakpoints), std::move(f.values));
    }
  } catch (const ValidationError& e) {
    fail(node, e.what());
  }
  fail(node, "unknown reactivity type '" + type + "' (expected constant, linear or piecewise)");
}

SourceFunction parse_source(const YAML::Node& node) {
  check_keys(node, "source", {"type", "value", "breakpoints", "values"});
  const auto type = as<std::string>(require(node, "type", "source"), "type");
  try {
    if (type == "constant") {
      return SourceFunction::constant(as<double>(require(node, "value", "source"), "value"));
    }
    if (type == "piecewise") {
      auto f = parse_piecewise(node);
      return SourceFunction::piecewise(std::move(f.breakpoints), std::move(f.values));
    }
  } catch (const ValidationError& e) {
    fail(node, e.what());
  }
  fail(node, "unknown source type '" + type + "' (expected constant or piecewise)");
}

KineticsParameters parse_parameters(const YAML::Node& node) {
  check_keys(node, "parameters",
             {"lambda", "beta", "nu", "alpha", "gen_time", "reactivity", "source"});
  auto lambda = as_list(require(node, "lambda", "parameters"), "lambda");
  auto beta = as_list(require(node, "beta", "parameters"), "beta");
  const double nu = as<double>(require(node, "nu", "parameters"), "nu");
  const double l = as<double>(require(node, "gen_time", "parameters"), "gen_time");
  std::optional<double> alpha;
  if (node["alpha"]) alpha = as<double>(node["alpha"], "alpha");
  auto rho = parse_reactivity(require(node, "reactivity", "parameters"));
  auto q = parse_source(require(node, "source", "parameters"));
  try {
    return KineticsParameters(std::move(lambda), std::move(beta), nu, l, std::move(rho),
                              std::move(q), alpha);
  } catch (const ValidationError& e) {
    const int line = line_of(node);
    throw ValidationError("parameters (line " + std::to_string(line) + "): " + e.what());
  }
}

InitialCondition parse_initial(const YAML::Node& node) {
  check_keys(node, "initial", {"type", "n0", "values"});
  const auto type = as<std::string>(require(node, "type", "initial"), "type");
  if (type == "explicit") return ExplicitInitial{as_list(require(node, "values", "initial"), "values")};
  if (type == "sourced_equilibrium") return SourcedEquilibrium{};
  if (type == "source_free_equilibrium") {
    return SourceFreeEquilibrium{as<double>(require(node, "n0", "initial"), "n0")};
  }
  fail(node, "unknown initial type '" + type +
                 "' (expected explicit, sourced_equilibrium or source_free_equilibrium)");
}

PsdPolicy parse_psd_policy(const YAML::Node& node) {
  const auto v = as<std::string>(node, "psd_policy");
  if (v == "strict") return PsdPolicy::Strict;
  if (v == "project") return PsdPolicy::Project;
  fail(node, "psd_policy must be strict or project");
}

McSettings parse_mc(const YAML::Node& node) {
  check_keys(node, "mc", {"mode", "yield", "dt"});
  McSettings mc;
  if (node["mode"]) {
    const auto v = as<std::string>(node["mode"], "mode");
    if (v == "fixed") mc.mode = McMode::FixedStep;
    else if (v == "exact") mc.mode = McMode::ExactJump;
    else fail(node["mode"], "mc.mode must be fixed or exact");
  }
  if (node["yield"]) {
    const auto v = as<std::string>(node["yield"], "yield");
    if (v == "fractional") mc.yield = YieldModel::FractionalExpected;
    else if (v == "integer") mc.yield = YieldModel::IntegerSampled;
    else fail(node["yield"], "mc.yield must be fractional or integer");
  }
  mc.dt = get_or<double>(node, "dt", 0.0);
  return mc;
}

EnsembleSettings parse_ensemble(const YAML::Node& node) {
  check_keys(node, "ensemble",
             {"seed", "min_samples", "max_samples", "target_rel_halfwidth", "batch_size", "threads"});
  EnsembleSettings e;
  e.seed = get_or<std::uint64_t>(node, "seed", e.seed);
  e.min_samples = get_or<long>(node, "min_samples", e.min_samples);
  e.max_samples = get_or<long>(node, "max_samples", e.max_samples);
  e.target_rel_halfwidth = get_or<double>(node, "target_rel_halfwidth", e.target_rel_halfwidth);
  e.batch_size = get_or<long>(node, "batch_size", e.batch_size);
  e.threads = get_or<unsigned>(node, "threads", e.threads);
  return e;
}

void emit_piecewise(YAML::Emitter& out, const PiecewiseConstant& f) {
  out << YAML::Key << "type" << YAML::Value << "piecewise";
  out << YAML::Key << "breakpoints" << YAML::Value << YAML::Flow << f.breakpoints;
  out << YAML::Key << "values" << YAML::Value << YAML::Flow << f.values;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view yaml) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg, e.mark.line + 1);
  }
  check_keys(root, "scenario",
             {"name", "notes", "parameters", "initial", "horizon", "record_dt", "method", "steps",
              "psd_policy", "ensemble", "mc"});

  ScenarioConfig c{
      .name = get_or<std::string>(root, "name", "custom"),
      .notes = get_or<std::string>(root, "notes", ""),
      .parameters = parse_parameters(require(root, "parameters", "scenario")),
      .initial = parse_initial(require(root, "initial", "scenario")),
      .horizon = as<double>(require(root, "horizon", "scenario"), "horizon"),
      .record_dt = as<double>(require(root, "record_dt", "scenario"), "record_dt"),
  };
  if (root["method"]) {
    try {
      c.method = parse_run_method(as<std::string>(root["method"], "method"));
    } catch (const ConfigError& e) {
      fail(root["method"], e.what());
    }
  }
  if (const auto steps = root["steps"]) {
    check_keys(steps, "steps", {"det", "em", "pca"});
    c.steps.det = get_or<double>(steps, "det", c.steps.det);
    c.steps.em = get_or<double>(steps, "em", c.steps.em);
    c.steps.pca = get_or<double>(steps, "pca", c.steps.pca);
  }
  if (root["psd_policy"]) c.psd_policy = parse_psd_policy(root["psd_policy"]);
  if (root["ensemble"]) c.ensemble = parse_ensemble(root["ensemble"]);
  if (root["mc"]) c.mc = parse_mc(root["mc"]);
  validate_scenario(c);
  return c;
}

std::string serialize_scenario(const ScenarioConfig& c) {
  const auto& p = c.parameters;
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.name;
  if (!c.notes.empty()) out << YAML::Key << "notes" << YAML::Value << c.notes;

  out << YAML::Key << "parameters" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lambda" << YAML::Value << YAML::Flow
      << std::vector<double>(p.lambda().begin(), p.lambda().end());
  out << YAML::Key << "beta" << YAML::Value << YAML::Flow
      << std::vector<double>(p.beta().begin(), p.beta().end());
  out << YAML::Key << "nu" << YAML::Value << p.nu();
  if (p.alpha_overridden()) out << YAML::Key << "alpha" << YAML::Value << p.alpha();
  out << YAML::Key << "gen_time" << YAML::Value << p.gen_time();

  out << YAML::Key << "reactivity" << YAML::Value << YAML::BeginMap;
  const auto& rho = p.reactivity().form();
  if (const auto* k = std::get_if<ReactivityFunction::Constant>(&rho)) {
    out << YAML::Key << "type" << YAML::Value << "constant";
    out << YAML::Key << "value" << YAML::Value << k->value;
  } else if (const auto* l = std::get_if<ReactivityFunction::Linear>(&rho)) {
    out << YAML::Key << "type" << YAML::Value << "linear";
    out << YAML::Key << "slope" << YAML::Value << l->slope;
  } else {
    emit_piecewise(out, std::get<PiecewiseConstant>(rho));
  }
  out << YAML::EndMap;

  out << YAML::Key << "source" << YAML::Value << YAML::BeginMap;
  const auto& q = p.source().form();
  if (const auto* k = std::get_if<SourceFunction::Constant>(&q)) {
    out << YAML::Key << "type" << YAML::Value << "constant";
    out << YAML::Key << "value" << YAML::Value << k->value;
  } else {
    emit_piecewise(out, std::get<PiecewiseConstant>(q));
  }
  out << YAML::EndMap;
  out << YAML::EndMap;  // parameters

  out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
  if (const auto* e = std::get_if<ExplicitInitial>(&c.initial)) {
    out << YAML::Key << "type" << YAML::Value << "explicit";
    out << YAML::Key << "values" << YAML::Value << YAML::Flow << e->values;
  } else if (const auto* s = std::get_if<SourceFreeEquilibrium>(&c.initial)) {
    out << YAML::Key << "type" << YAML::Value << "source_free_equilibrium";
    out << YAML::Key << "n0" << YAML::Value << s->n0;
  } else {
    out << YAML::Key << "type" << YAML::Value << "sourced_equilibrium";
  }
  out << YAML::EndMap;

  out << YAML::Key << "horizon" << YAML::Value << c.horizon;
  out << YAML::Key << "record_dt" << YAML::Value << c.record_dt;
  out << YAML::Key << "method" << YAML::Value << to_string(c.method);

  out << YAML::Key << "steps" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "det" << YAML::Value << c.steps.det;
  out << YAML::Key << "em" << YAML::Value << c.steps.em;
  out << YAML::Key << "pca" << YAML::Value << c.steps.pca;
  out << YAML::EndMap;

  out << YAML::Key << "psd_policy" << YAML::Value
      << (c.psd_policy == PsdPolicy::Strict ? "strict" : "project");

  out << YAML::Key << "ensemble" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << c.ensemble.seed;
  out << YAML::Key << "min_samples" << YAML::Value << c.ensemble.min_samples;
  out << YAML::Key << "max_samples" << YAML::Value << c.ensemble.max_samples;
  out << YAML::Key << "target_rel_halfwidth" << YAML::Value << c.ensemble.target_rel_halfwidth;
  out << YAML::Key << "batch_size" << YAML::Value << c.ensemble.batch_size;
  out << YAML::Key << "threads" << YAML::Value << c.ensemble.threads;
  out << YAML::EndMap;

  out << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << to_string(c.mc.mode);
  out << YAML::Key << "yield" << YAML::Value << to_string(c.mc.yield);
  out << YAML::Key << "dt" << YAML::Value << c.mc.dt;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ScenarioConfig load_scenario(const std::string& path_or_preset) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path_or_preset, ec)) {
    std::ifstream in(path_or_preset);
    if (!in) throw ConfigError("cannot open scenario file '" + path_or_preset + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
  }
  for (const auto& name : preset_names()) {
    if (name == path_or_preset) return preset(name);
  }
  throw ConfigError("'" + path_or_preset + "' is neither a scenario file nor a preset " +
                    "(table1, table2, table3, linear-rho)");
}

}  // namespace pointkin
