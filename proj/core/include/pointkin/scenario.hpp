#pragma once

// Scenario configuration: parameters, initial condition, horizon, record grid
// and per-method settings, with built-in presets and a YAML representation.

#include "pointkin/ensemble.hpp"
#include "pointkin/event_sim.hpp"
#include "pointkin/kinetics.hpp"
#include "pointkin/solvers.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pointkin {

enum class RunMethod { Deterministic, EulerMaruyama, StochasticPca, EventMc };

std::string to_string(RunMethod method);
/// "det", "em", "pca" or "mc".
RunMethod parse_run_method(std::string_view name);
EnsembleMethod to_ensemble_method(RunMethod method);

struct ExplicitInitial {
  std::vector<double> values;
  bool operator==(const ExplicitInitial&) const = default;
};

using InitialCondition = std::variant<ExplicitInitial, SourcedEquilibrium, SourceFreeEquilibrium>;

struct StepSizes {
  double det = 1e-3;
  double em = 1e-3;
  double pca = 1e-3;
  bool operator==(const StepSizes&) const = default;
};

struct EnsembleSettings {
  std::uint64_t seed = 1;
  long min_samples = 1000;
  long max_samples = 10000;
  double target_rel_halfwidth = 5e-4;
  long batch_size = 1000;
  unsigned threads = 0;
  bool operator==(const EnsembleSettings&) const = default;
};

struct McSettings {
  McMode mode = McMode::FixedStep;
  YieldModel yield = YieldModel::FractionalExpected;
  double dt = 0.0;  // 0 = automatic
  bool operator==(const McSettings&) const = default;
};

struct ScenarioConfig {
  std::string name;
  std::string notes;
  KineticsParameters parameters;
  InitialCondition initial;
  double horizon = 0.0;
  /// Spacing of recorded output times; a multiple of every method step.
  double record_dt = 0.0;
  RunMethod method = RunMethod::StochasticPca;
  StepSizes steps;
  PsdPolicy psd_policy = PsdPolicy::Strict;
  EnsembleSettings ensemble;
  McSettings mc;

  bool operator==(const ScenarioConfig&) const = default;

  StateVector initial_state() const;
  double step(RunMethod method) const;
  /// Integration grid of a method; EventMc uses the record grid.
  TimeGrid grid(RunMethod method) const;
  /// Node stride that lands on the record grid. Throws ConfigError if
  /// record_dt is not an integer multiple of the method step.
  long record_every(RunMethod method) const;
  EnsembleConfig ensemble_config(RunMethod method) const;
};

/// Checks the horizon / record grid / step-size relations. Throws ConfigError.
void validate_scenario(const ScenarioConfig& config);

std::vector<std::string> preset_names();
/// Built-in scenarios: table1, table2, table3, linear-rho.
ScenarioConfig preset(std::string_view name);

/// A file path if one exists, otherwise a preset name.
ScenarioConfig load_scenario(const std::string& path_or_preset);

/// Throws ConfigError (with line) on malformed YAML and ValidationError on
/// parameter invariant violations.
ScenarioConfig parse_scenario(std::string_view yaml);
std::string serialize_scenario(const ScenarioConfig& config);

}  // namespace pointkin
