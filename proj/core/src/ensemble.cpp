#include "pointkin/ensemble.hpp"

#include "pointkin/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace pointkin {

std::string to_string(EnsembleMethod method) {
  switch (method) {
    case EnsembleMethod::EulerMaruyama: return "em";
    case EnsembleMethod::StochasticPca: return "pca";
    case EnsembleMethod::EventMc: return "mc";
  }
  return "unknown";
}

double RunningStats::stddev() const { return std::sqrt(variance()); }

Quantity Quantity::parse(std::string_view selector) {
  if (selector == "n") return neutron();
  if (selector == "sum_c") return precursor_sum();
  if (selector.size() >= 2 && selector.front() == 'c') {
    int group = 0;
    const auto* first = selector.data() + 1;
    const auto* last = selector.data() + selector.size();
    const auto [ptr, ec] = std::from_chars(first, last, group);
    if (ec == std::errc{} && ptr == last && group >= 1) return precursor(group - 1);
  }
  throw ValidationError("unknown quantity selector '" + std::string(selector) +
                        "' (expected n, c1..cm or sum_c)");
}

std::string to_string(const Quantity& q) {
  switch (q.kind) {
    case Quantity::Kind::Neutron: return "n";
    case Quantity::Kind::Precursor: return "c" + std::to_string(q.group + 1);
    case Quantity::Kind::PrecursorSum: return "sum_c";
  }
  return "unknown";
}

std::size_t EnsembleSummary::quantity_index(const Quantity& q) const {
  switch (q.kind) {
    case Quantity::Kind::Neutron: return 0;
    case Quantity::Kind::Precursor:
      if (q.group < 0 || q.group >= groups) {
        throw ValidationError("precursor group c" + std::to_string(q.group + 1) +
                              " out of range (m = " + std::to_string(groups) + ")");
      }
      return static_cast<std::size_t>(q.group) + 1;
    case Quantity::Kind::PrecursorSum: return static_cast<std::size_t>(groups) + 1;
  }
  throw ValidationError("unknown quantity");
}

const MomentEstimate& EnsembleSummary::at(std::size_t time_index, const Quantity& q) const {
  return stats.at(time_index).at(quantity_index(q));
}

std::vector<double> record_times(const TimeGrid& grid, long record_every) {
  if (record_every < 1) throw ValidationError("record_every must be >= 1");
  std::vector<double> out;
  for (long i = 0; i <= grid.steps(); i += record_every) out.push_back(grid.node(i));
  if (grid.steps() % record_every != 0) out.push_back(grid.t_end());
  return out;
}

namespace {

PathRecord to_record(std::vector<double> times, const std::vector<StateVector>& states) {
  PathRecord rec;
  rec.times = std::move(times);
  rec.states.reserve(states.size());
  for (const auto& s : states) rec.states.push_back(s.values());
  return rec;
}

void validate(const EnsembleConfig& cfg) {
  if (cfg.min_samples < 1) throw ValidationError("min_samples must be >= 1");
  if (cfg.min_samples > cfg.max_samples) {
    throw ValidationError("min_samples must not exceed max_samples");
  }
  if (!(cfg.target_rel_halfwidth > 0.0)) {
    throw ValidationError("target relative half-width must be > 0");
  }
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (!(cfg.z > 0.0)) throw ValidationError("confidence multiplier z must be > 0");
}

struct PathOutcome {
  std::optional<PathRecord> record;
  std::string failure;
  std::exception_ptr fatal;  // non-library exception, rethrown after the batch
};

}  // namespace

PathRecord simulate_path(const KineticsParameters& p, const StateVector& x0, const TimeGrid& grid,
                         const EnsembleConfig& cfg, std::uint64_t index) {
  NoiseSource noise(derive_seed(cfg.master_seed, index));
  switch (cfg.method) {
    case EnsembleMethod::EulerMaruyama: {
      auto traj = euler_maruyama_solve(p, x0, grid, noise, cfg.solver);
      return to_record(std::move(traj.times), traj.states);
    }
    case EnsembleMethod::StochasticPca: {
      auto traj = stochastic_pca_solve(p, x0, grid, noise, cfg.solver);
      return to_record(std::move(traj.times), traj.states);
    }
    case EnsembleMethod::EventMc: {
      McConfig mc = cfg.mc;
      mc.t0 = grid.t0();
      mc.record_times = record_times(grid, cfg.solver.record_every);
      auto traj = mc_trajectory(p, x0, grid.t_end(), mc, noise);
      return to_record(std::move(traj.times), traj.states);
    }
  }
  throw ValidationError("unknown ensemble method");
}

EnsembleSummary run_ensemble(const KineticsParameters& p, const StateVector& x0,
                             const TimeGrid& grid, const EnsembleConfig& cfg) {
  validate(cfg);
  const std::vector<double> times = record_times(grid, cfg.solver.record_every);
  const int m = p.groups();
  const std::size_t n_quantities = static_cast<std::size_t>(m) + 2;
  std::vector<RunningStats> acc(times.size() * n_quantities);

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned threads = cfg.threads == 0 ? hw : cfg.threads;

  long completed = 0;
  long failures = 0;
  std::uint64_t next_index = 0;
  bool converged = false;
  std::string last_failure;

  auto check_converged = [&] {
    const std::size_t base = (times.size() - 1) * n_quantities;
    for (std::size_t q = 0; q + 1 < n_quantities; ++q) {
      const RunningStats& s = acc[base + q];
      const double half = cfg.z * s.stddev() / std::sqrt(static_cast<double>(s.count()));
      if (half == 0.0) continue;
      if (s.mean() == 0.0 || half / std::abs(s.mean()) > cfg.target_rel_halfwidth) return false;
    }
    return true;
  };

  while (completed < cfg.max_samples) {
    const long want = completed < cfg.min_samples
                          ? cfg.min_samples - completed
                          : std::min(cfg.batch_size, cfg.max_samples - completed);
    std::vector<PathOutcome> outcomes(static_cast<std::size_t>(want));
    auto work = [&](unsigned worker, unsigned stride) {
      for (auto j = static_cast<std::size_t>(worker); j < outcomes.size(); j += stride) {
        try {
          outcomes[j].record = simulate_path(p, x0, grid, cfg, next_index + j);
        } catch (const Error& e) {
          outcomes[j].record.reset();
          outcomes[j].failure = e.what();
        } catch (...) {
          outcomes[j].fatal = std::current_exception();
        }
      }
    };
    const unsigned workers =
        static_cast<unsigned>(std::min<long>(static_cast<long>(threads), want));
    if (workers <= 1) {
      work(0, 1);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    }
    next_index += static_cast<std::uint64_t>(want);

    for (auto& outcome : outcomes) {
      if (outcome.fatal) std::rethrow_exception(outcome.fatal);
      if (!outcome.record) {
        ++failures;
        last_failure = outcome.failure;
        continue;
      }
      ++completed;
      const auto& states = outcome.record->states;
      for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const DenseVector& x = states[ti];
        RunningStats* row = &acc[ti * n_quantities];
        for (int k = 0; k <= m; ++k) row[k].add(x(k));
        row[m + 1].add(x.tail(m).sum());
      }
    }

    const auto attempted = static_cast<double>(next_index);
    if (static_cast<double>(failures) > cfg.max_failure_fraction * attempted) {
      std::ostringstream os;
      os << to_string(cfg.method) << " ensemble: " << failures << " of " << next_index
         << " paths failed (limit " << cfg.max_failure_fraction * 100.0 << "%)";
      if (!last_failure.empty()) os << "; last failure: " << last_failure;
      throw Error("ensemble", os.str());
    }
    if (completed >= cfg.min_samples && check_converged()) {
      converged = true;
      break;
    }
  }

  EnsembleSummary summary;
  summary.method = cfg.method;
  summary.master_seed = cfg.master_seed;
  summary.groups = m;
  summary.times = times;
  summary.samples = completed;
  summary.failures = failures;
  summary.converged = converged;
  summary.stats.resize(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    auto& row = summary.stats[ti];
    row.resize(n_quantities);
    for (std::size_t q = 0; q < n_quantities; ++q) {
      const RunningStats& s = acc[ti * n_quantities + q];
      MomentEstimate& e = row[q];
      e.n = s.count();
      e.mean = s.mean();
      e.std = s.stddev();
      e.ci_halfwidth = e.n > 0 ? cfg.z * e.std / std::sqrt(static_cast<double>(e.n)) : 0.0;
    }
  }
  return summary;
}

std::vector<SummaryRow> summarize_component(const EnsembleSummary& summary,
                                            const Quantity& selector) {
  const std::size_t q = summary.quantity_index(selector);
  std::vector<SummaryRow> rows;
  rows.reserve(summary.times.size());
  for (std::size_t ti = 0; ti < summary.times.size(); ++ti) {
    rows.push_back({summary.times[ti], summary.stats[ti][q]});
  }
  return rows;
}

}  // namespace pointkin
