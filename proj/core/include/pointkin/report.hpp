#pragma once

// Output formats: trajectory / summary / result-table / plot-data CSV and
// the summary JSON document. Numbers use the shortest representation that
// round-trips, so reruns with the same seed are byte-identical.

#include "pointkin/ensemble.hpp"
#include "pointkin/event_sim.hpp"
#include "pointkin/scenario.hpp"
#include "pointkin/solvers.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace pointkin {

/// Shortest round-trip decimal form; NaN formats as an empty string.
std::string format_number(double v);

/// Columns: t, n, c1..cm.
void write_trajectory_csv(std::ostream& out, const std::vector<double>& times,
                          const std::vector<StateVector>& states);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(std::ostream& out, const McTrajectory& traj);

/// Columns: t, component, mean, std, ci_halfwidth, n_samples; components are
/// n, c1..cm and sum_c.
void write_summary_csv(std::ostream& out, const EnsembleSummary& summary);

std::string summary_json(const EnsembleSummary& summary, const std::string& scenario);

struct ResultRow {
  std::string quantity;  // "n", "c1", "sum_c"
  double t = 0.0;
  RunMethod method = RunMethod::Deterministic;
  double mean = 0.0;
  std::optional<double> std;  // absent for the deterministic model
  long samples = 0;           // 0 for the deterministic model
  std::optional<double> reference_mean;
  std::optional<double> reference_std;
};

struct ResultTable {
  int table = 0;
  std::vector<ResultRow> rows;

  /// Throws ValidationError if the pair is missing.
  const ResultRow& find(const std::string& quantity, RunMethod method) const;
};

struct ReproduceOptions {
  long samples = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::vector<RunMethod> methods{RunMethod::EventMc, RunMethod::StochasticPca,
                                 RunMethod::EulerMaruyama, RunMethod::Deterministic};
};

/// Published reference value for a (table, quantity, method) cell, if any.
std::optional<std::pair<double, std::optional<double>>> reference_value(int table,
                                                                        const std::string& quantity,
                                                                        RunMethod method);

/// Runs the scenario behind result table 1, 2 or 3 with every requested
/// method at a fixed sample count and collects E and sigma at the final time.
ResultTable reproduce_table(int table, const ReproduceOptions& options);

/// Columns: quantity, t, method, mean, std, reference_mean, reference_std, n_samples.
void write_result_table_csv(std::ostream& out, const ResultTable& table);

/// Columns: t, mean, std, lower, upper, sample1, sample2, reference. `reference`
/// is left empty for user-supplied measurements.
void write_plot_data_csv(std::ostream& out, const EnsembleSummary& summary,
                         const PathRecord& sample1, const PathRecord& sample2);

}  // namespace pointkin
