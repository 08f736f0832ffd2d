#pragma once

// Seeded ensembles of stochastic sample paths with streaming moment
// accumulation and a relative confidence-interval stopping rule.

#include "pointkin/event_sim.hpp"
#include "pointkin/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pointkin {

enum class EnsembleMethod { EulerMaruyama, StochasticPca, EventMc };

std::string to_string(EnsembleMethod method);

/// Welford's single-pass mean / variance accumulator.
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  long count() const { return count_; }
  double mean() const { return mean_; }
  /// Unbiased (divisor N-1); 0 when N < 2.
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double stddev() const;

 private:
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// A summarized quantity: n, one precursor group, or the precursor sum.
struct Quantity {
  enum class Kind { Neutron, Precursor, PrecursorSum };
  Kind kind = Kind::Neutron;
  int group = -1;  // 0-based, Precursor only

  static Quantity neutron() { return {Kind::Neutron, -1}; }
  static Quantity precursor(int group) { return {Kind::Precursor, group}; }
  static Quantity precursor_sum() { return {Kind::PrecursorSum, -1}; }

  /// "n", "c1".."cm" (1-based) or "sum_c". Throws ValidationError otherwise.
  static Quantity parse(std::string_view selector);

  bool operator==(const Quantity&) const = default;
};

std::string to_string(const Quantity& q);

struct EnsembleConfig {
  EnsembleMethod method = EnsembleMethod::StochasticPca;
  std::uint64_t master_seed = 1;
  long min_samples = 100;
  long max_samples = 10000;
  /// Target for 1.96 sigma / (sqrt(N) |E|) at the final record time.
  double target_rel_halfwidth = 5e-4;
  double z = 1.96;
  /// The stopping rule is evaluated after each batch.
  long batch_size = 1000;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
  /// More failed paths than this fraction of attempts aborts the run.
  double max_failure_fraction = 0.01;
  /// EulerMaruyama / StochasticPca options. record_every selects the record grid.
  SolverOptions solver;
  /// EventMc options; record_times is derived from the grid and ignored here.
  McConfig mc;
};

struct MomentEstimate {
  double mean = 0.0;
  double std = 0.0;           // per-path spread (divisor N-1), 0 when N = 1
  double ci_halfwidth = 0.0;  // z * std / sqrt(N)
  long n = 0;

  bool std_defined() const { return n > 1; }
};

struct EnsembleSummary {
  EnsembleMethod method = EnsembleMethod::StochasticPca;
  std::uint64_t master_seed = 0;
  int groups = 0;
  std::vector<double> times;
  /// stats[time][quantity] with quantity index 0 = n, 1..m = c_i, m+1 = sum c_i.
  std::vector<std::vector<MomentEstimate>> stats;
  long samples = 0;
  long failures = 0;
  bool converged = false;  // false when max_samples stopped the run

  std::size_t quantity_index(const Quantity& q) const;
  const MomentEstimate& at(std::size_t time_index, const Quantity& q) const;
  const MomentEstimate& final(const Quantity& q) const { return at(times.size() - 1, q); }
};

/// Record times of a grid at a node stride (the final node always included).
std::vector<double> record_times(const TimeGrid& grid, long record_every);

/// Values of one path at the record times: [time][component] with
/// components n, c_1..c_m.
struct PathRecord {
  std::vector<double> times;
  std::vector<DenseVector> states;
};

/// Simulates path `index` of an ensemble with the seed run_ensemble would use.
PathRecord simulate_path(const KineticsParameters& p, const StateVector& x0, const TimeGrid& grid,
                         const EnsembleConfig& cfg, std::uint64_t index);

/// Runs paths 0, 1, 2, ... (seed derive_seed(master_seed, index)) in parallel
/// batches and accumulates them in index order, so the summary does not depend
/// on the thread count. Failed paths are discarded and counted.
EnsembleSummary run_ensemble(const KineticsParameters& p, const StateVector& x0,
                             const TimeGrid& grid, const EnsembleConfig& cfg);

struct SummaryRow {
  double t = 0.0;
  MomentEstimate estimate;
};

/// One row per record time for the selected quantity.
std::vector<SummaryRow> summarize_component(const EnsembleSummary& summary,
                                            const Quantity& selector);

}  // namespace pointkin
