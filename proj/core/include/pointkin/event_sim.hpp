#pragma once

// Discrete-event Monte Carlo of the capture / fission / precursor decay /
// source birth process, either with a fixed step and at most one event per
// step (Bernoulli thinning), or with exact jumps from competing exponential
// clocks.

#include "pointkin/kinetics.hpp"
#include "pointkin/noise.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pointkin {

enum class McMode { FixedStep, ExactJump };

/// How a fission changes the populations.
enum class YieldModel {
  /// Apply the real-valued expected delta (-1 + (1-beta) nu, beta_i nu).
  FractionalExpected,
  /// Draw an integer yield in {floor(nu), ceil(nu)} with mean nu; each neutron
  /// is delayed with probability beta, into group i with probability beta_i / beta.
  IntegerSampled,
};

std::string to_string(McMode mode);
std::string to_string(YieldModel model);

struct McConfig {
  McMode mode = McMode::FixedStep;
  YieldModel yield = YieldModel::FractionalExpected;
  /// FixedStep step size; 0 selects 0.1 / R where R is the total rate at the
  /// initial state.
  double dt = 0.0;
  double t0 = 0.0;
  /// Output times in [t0, horizon], ascending. Empty means {t0, horizon}.
  std::vector<double> record_times;
};

struct McDiagnostics {
  long steps = 0;               // fixed steps or jumps taken
  long dt_halvings = 0;         // FixedStep only
  long negative_excursions = 0; // events that left a population below zero
};

struct McTrajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<long> event_counts;  // event_vectors() order
  std::uint64_t seed = 0;
  McDiagnostics diagnostics;
};

/// Index of the event whose cumulative-probability bucket contains `u`, or
/// nullopt for "no event" (u >= sum of probabilities).
std::optional<int> select_event(std::span<const double> probabilities, double u);

/// One fixed step of length dt. Throws StepTooLargeError when the event
/// probabilities sum above one and ValidationError on negative populations.
StateVector mc_step_fixed(const KineticsParameters& p, const StateVector& x, double t, double dt,
                          NoiseSource& noise,
                          YieldModel yield = YieldModel::FractionalExpected);

struct JumpResult {
  double waiting_time = 0.0;
  int event = 0;  // event_vectors() index
  StateVector state;
};

/// One exact jump with reactivity frozen at `t`. Returns nullopt when the
/// total rate is zero (absorbing state).
std::optional<JumpResult> mc_step_exact(const KineticsParameters& p, const StateVector& x,
                                        double t, NoiseSource& noise,
                                        YieldModel yield = YieldModel::FractionalExpected);

/// Simulates one path from cfg.t0 to `horizon`, recording at cfg.record_times.
/// In FixedStep mode the step is halved whenever the probabilities at the
/// current state would sum above one. IntegerSampled mode rounds x0 to the
/// nearest integers first.
McTrajectory mc_trajectory(const KineticsParameters& p, const StateVector& x0, double horizon,
                           const McConfig& cfg, NoiseSource& noise);

}  // namespace pointkin
