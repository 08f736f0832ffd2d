#include "pointkin/report.hpp"

#include "pointkin/error.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cmath>

namespace pointkin {

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<double>& times,
                          const std::vector<StateVector>& states) {
  const int m = states.empty() ? 0 : states.front().groups();
  out << "t,n";
  for (int i = 1; i <= m; ++i) out << ",c" << i;
  out << '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << format_number(times[k]);
    const auto& v = states[k].values();
    for (Eigen::Index j = 0; j < v.size(); ++j) out << ',' << format_number(v(j));
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  write_trajectory_csv(out, traj.times, traj.states);
}

void write_trajectory_csv(std::ostream& out, const McTrajectory& traj) {
  write_trajectory_csv(out, traj.times, traj.states);
}

void write_summary_csv(std::ostream& out, const EnsembleSummary& summary) {
  out << "t,component,mean,std,ci_halfwidth,n_samples\n";
  const int m = summary.groups;
  for (std::size_t ti = 0; ti < summary.times.size(); ++ti) {
    for (int q = 0; q <= m + 1; ++q) {
      const std::string name = q == 0       ? "n"
                               : q <= m     ? "c" + std::to_string(q)
                                            : "sum_c";
      const MomentEstimate& e = summary.stats[ti][static_cast<std::size_t>(q)];
      out << format_number(summary.times[ti]) << ',' << name << ',' << format_number(e.mean)
          << ',' << format_number(e.std) << ',' << format_number(e.ci_halfwidth) << ',' << e.n
          << '\n';
    }
  }
}

std::string summary_json(const EnsembleSummary& summary, const std::string& scenario) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["scenario"] = scenario;
  doc["method"] = to_string(summary.method);
  doc["master_seed"] = summary.master_seed;
  doc["samples"] = summary.samples;
  doc["failures"] = summary.failures;
  doc["converged"] = summary.converged;
  doc["groups"] = summary.groups;
  ordered_json times = ordered_json::array();
  for (std::size_t ti = 0; ti < summary.times.size(); ++ti) {
    ordered_json entry;
    entry["t"] = summary.times[ti];
    ordered_json comps = ordered_json::object();
    for (int q = 0; q <= summary.groups + 1; ++q) {
      const std::string name = q == 0               ? "n"
                               : q <= summary.groups ? "c" + std::to_string(q)
                                                     : "sum_c";
      const MomentEstimate& e = summary.stats[ti][static_cast<std::size_t>(q)];
      comps[name] = {{"mean", e.mean}, {"std", e.std}, {"ci_halfwidth", e.ci_halfwidth},
                     {"n_samples", e.n}};
    }
    entry["components"] = std::move(comps);
    times.push_back(std::move(entry));
  }
  doc["times"] = std::move(times);
  return doc.dump(2) + "\n";
}

const ResultRow& ResultTable::find(const std::string& quantity, RunMethod method) const {
  for (const auto& row : rows) {
    if (row.quantity == quantity && row.method == method) return row;
  }
  throw ValidationError("result table has no row for (" + quantity + ", " + to_string(method) +
                        ")");
}

std::optional<std::pair<double, std::optional<double>>> reference_value(int table,
                                                                        const std::string& quantity,
                                                                        RunMethod method) {
  struct Cell {
    int table;
    const char* quantity;
    RunMethod method;
    double mean;
    double std;  // NaN when not reported
  };
  constexpr double none = std::numeric_limits<double>::quiet_NaN();
  using M = RunMethod;
  static const std::array<Cell, 24> cells{{
      {1, "n", M::EventMc, 400.032, 27.311},
      {1, "n", M::StochasticPca, 395.32, 29.411},
      {1, "n", M::EulerMaruyama, 412.23, 34.391},
      {1, "n", M::Deterministic, 412.13, none},
      {1, "c1", M::EventMc, 300.01, 7.807},
      {1, "c1", M::StochasticPca, 300.67, 8.3564},
      {1, "c1", M::EulerMaruyama, 315.96, 8.2656},
      {1, "c1", M::Deterministic, 315.93, none},
      {2, "n", M::EventMc, 183.04, 168.79},
      {2, "n", M::StochasticPca, 186.31, 164.16},
      {2, "n", M::EulerMaruyama, 208.6, 255.95},
      {2, "n", M::Deterministic, 200.005, none},
      {2, "sum_c", M::EventMc, 4.478e5, 1495.72},
      {2, "sum_c", M::StochasticPca, 4.491e5, 1917.2},
      {2, "sum_c", M::EulerMaruyama, 4.498e5, 1233.38},
      {2, "sum_c", M::Deterministic, 4.497e5, none},
      {3, "n", M::EventMc, 135.66, 93.376},
      {3, "n", M::StochasticPca, 134.55, 91.242},
      {3, "n", M::EulerMaruyama, 139.568, 92.042},
      {3, "n", M::Deterministic, 139.61, none},
      {3, "sum_c", M::EventMc, 4.464e5, 16.226},
      {3, "sum_c", M::StochasticPca, 4.694e5, 19.444},
      {3, "sum_c", M::EulerMaruyama, 4.463e5, 6.071},
      {3, "sum_c", M::Deterministic, 4.463e5, none},
  }};
  for (const auto& c : cells) {
    if (c.table == table && quantity == c.quantity && c.method == method) {
      return std::pair{c.mean, std::isnan(c.std) ? std::nullopt : std::optional<double>(c.std)};
    }
  }
  return std::nullopt;
}

ResultTable reproduce_table(int table, const ReproduceOptions& options) {
  if (table < 1 || table > 3) throw ValidationError("table must be 1, 2 or 3");
  if (options.samples < 1) throw ValidationError("samples must be >= 1");
  const ScenarioConfig scenario = preset("table" + std::to_string(table));
  const StateVector x0 = scenario.initial_state();
  const std::vector<std::string> quantities =
      table == 1 ? std::vector<std::string>{"n", "c1"} : std::vector<std::string>{"n", "sum_c"};

  ResultTable result;
  result.table = table;
  for (RunMethod method : options.methods) {
    std::vector<ResultRow> rows;
    if (method == RunMethod::Deterministic) {
      const Trajectory traj =
          deterministic_solve(scenario.parameters, x0, scenario.grid(method));
      const StateVector& last = traj.states.back();
      for (const auto& q : quantities) {
        const Quantity sel = Quantity::parse(q);
        const double v = sel.kind == Quantity::Kind::Neutron     ? last.n()
                         : sel.kind == Quantity::Kind::Precursor ? last.c(sel.group)
                                                                 : last.precursor_sum();
        rows.push_back({q, traj.times.back(), method, v, std::nullopt, 0, {}, {}});
      }
    } else {
      EnsembleConfig cfg = scenario.ensemble_config(method);
      cfg.master_seed = options.seed;
      cfg.min_samples = options.samples;
      cfg.max_samples = options.samples;
      cfg.threads = options.threads;
      // Only the final time is reported.
      const TimeGrid grid = scenario.grid(method);
      cfg.solver.record_every = grid.steps();
      const EnsembleSummary summary = run_ensemble(scenario.parameters, x0, grid, cfg);
      for (const auto& q : quantities) {
        const MomentEstimate& e = summary.final(Quantity::parse(q));
        rows.push_back({q, summary.times.back(), method, e.mean, e.std, e.n, {}, {}});
      }
    }
    for (auto& row : rows) {
      if (const auto ref = reference_value(table, row.quantity, row.method)) {
        row.reference_mean = ref->first;
        row.reference_std = ref->second;
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

void write_result_table_csv(std::ostream& out, const ResultTable& table) {
  out << "quantity,t,method,mean,std,reference_mean,reference_std,n_samples\n";
  for (const auto& r : table.rows) {
    out << r.quantity << ',' << format_number(r.t) << ',' << to_string(r.method) << ','
        << format_number(r.mean) << ',' << opt(r.std) << ',' << opt(r.reference_mean) << ','
        << opt(r.reference_std) << ',' << r.samples << '\n';
  }
}

void write_plot_data_csv(std::ostream& out, const EnsembleSummary& summary,
                         const PathRecord& sample1, const PathRecord& sample2) {
  out << "t,mean,std,lower,upper,sample1,sample2,reference\n";
  for (std::size_t ti = 0; ti < summary.times.size(); ++ti) {
    const MomentEstimate& e = summary.stats[ti][0];
    auto sample = [&](const PathRecord& rec) {
      return ti < rec.states.size() ? format_number(rec.states[ti](0)) : std::string();
    };
    out << format_number(summary.times[ti]) << ',' << format_number(e.mean) << ','
        << format_number(e.std) << ',' << format_number(e.mean - e.std) << ','
        << format_number(e.mean + e.std) << ',' << sample(sample1) << ',' << sample(sample2)
        << ",\n";
  }
}

}  // namespace pointkin
