#include "pointkin/event_sim.hpp"

#include "pointkin/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace pointkin {

std::string to_string(McMode mode) {
  return mode == McMode::FixedStep ? "fixed" : "exact";
}

std::string to_string(YieldModel model) {
  return model == YieldModel::FractionalExpected ? "fractional" : "integer";
}

std::optional<int> select_event(std::span<const double> probabilities, double u) {
  double cumulative = 0.0;
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    cumulative += probabilities[k];
    if (u < cumulative) return static_cast<int>(k);
  }
  return std::nullopt;
}

namespace {

using RateBuffer = std::array<double, kMaxDim + 2>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

/// Precomputed event deltas and the delayed-group distribution.
class EventApplier {
 public:
  EventApplier(const KineticsParameters& p, YieldModel yield)
      : m_(p.groups()), yield_(yield), nu_(p.nu()), beta_(p.beta_total()) {
    fission_ = DenseVector::Zero(p.dim());
    fission_(0) = -1.0 + (1.0 - p.beta_total()) * p.nu();
    for (int i = 0; i < m_; ++i) fission_(i + 1) = p.beta()[i] * p.nu();
    group_cdf_.resize(static_cast<std::size_t>(m_));
    double acc = 0.0;
    for (int i = 0; i < m_; ++i) {
      acc += beta_ > 0.0 ? p.beta()[i] / beta_ : 0.0;
      group_cdf_[static_cast<std::size_t>(i)] = acc;
    }
  }

  int event_count() const { return m_ + 3; }

  void apply(int k, DenseVector& x, NoiseSource& noise) const {
    if (k == 0) {
      x(0) -= 1.0;
    } else if (k == 1) {
      if (yield_ == YieldModel::FractionalExpected) {
        x += fission_;
      } else {
        apply_integer_fission(x, noise);
      }
    } else if (k < 2 + m_) {
      x(0) += 1.0;
      x(k - 1) -= 1.0;
    } else {
      x(0) += 1.0;
    }
  }

 private:
  void apply_integer_fission(DenseVector& x, NoiseSource& noise) const {
    const double base = std::floor(nu_);
    const int total = static_cast<int>(base) + (noise.uniform() < nu_ - base ? 1 : 0);
    int prompt = 0;
    for (int k = 0; k < total; ++k) {
      if (noise.uniform() < beta_) {
        const double u = noise.uniform();
        auto it = std::upper_bound(group_cdf_.begin(), group_cdf_.end(), u);
        const auto g = std::min<std::ptrdiff_t>(it - group_cdf_.begin(), m_ - 1);
        x(g + 1) += 1.0;
      } else {
        ++prompt;
      }
    }
    x(0) += static_cast<double>(prompt) - 1.0;
  }

  int m_;
  YieldModel yield_;
  double nu_;
  double beta_;
  DenseVector fission_;
  std::vector<double> group_cdf_;
};

bool has_negative(const DenseVector& x) { return (x.array() < 0.0).any(); }

void require_state(const KineticsParameters& p, const StateVector& x) {
  if (x.dim() != p.dim()) {
    throw ValidationError("state dimension " + std::to_string(x.dim()) +
                          " does not match parameters (m+1 = " + std::to_string(p.dim()) + ")");
  }
  if (has_negative(x.values())) {
    throw ValidationError("Monte Carlo steps require nonnegative populations");
  }
}

double total_rate(std::span<const double> rates) {
  double r = 0.0;
  for (double v : rates) r += v;
  return r;
}

/// Returns the applied event index or -1. Throws StepTooLargeError.
int fixed_step_inplace(const KineticsParameters& p, const EventApplier& events, DenseVector& x,
                       double t, double dt, NoiseSource& noise, long step_index) {
  RateBuffer buf{};
  const std::span<double> rates(buf.data(), static_cast<std::size_t>(events.event_count()));
  fill_event_rates(p, p.reactivity()(t), p.source()(t), x, rates);
  const double r = total_rate(rates);
  if (r * dt > 1.0) {
    throw StepTooLargeError("event probabilities sum to " + fmt(r * dt) + " > 1 at t=" + fmt(t) +
                                "; dt must be <= " + fmt(1.0 / r),
                            step_index, t, 1.0 / r);
  }
  for (double& v : rates) v *= dt;
  const auto k = select_event(rates, noise.uniform());
  if (!k) return -1;
  events.apply(*k, x, noise);
  return *k;
}

/// Returns (waiting time, event) or nullopt for an absorbing state.
std::optional<std::pair<double, int>> exact_jump_inplace(const KineticsParameters& p,
                                                         const EventApplier& events,
                                                         DenseVector& x, double t,
                                                         NoiseSource& noise) {
  RateBuffer buf{};
  const std::span<double> rates(buf.data(), static_cast<std::size_t>(events.event_count()));
  fill_event_rates(p, p.reactivity()(t), p.source()(t), x, rates);
  const double r = total_rate(rates);
  if (!(r > 0.0)) return std::nullopt;
  const double tau = noise.exponential(r);
  for (double& v : rates) v /= r;
  // Rounding can leave the cumulative sum a hair below 1; fall back to the last nonzero rate.
  auto k = select_event(rates, noise.uniform());
  if (!k) {
    int last = events.event_count() - 1;
    while (last > 0 && rates[static_cast<std::size_t>(last)] == 0.0) --last;
    k = last;
  }
  events.apply(*k, x, noise);
  return std::pair{tau, *k};
}

std::vector<double> normalized_record_times(const McConfig& cfg, double horizon) {
  std::vector<double> times = cfg.record_times;
  if (times.empty()) {
    times.push_back(cfg.t0);
    if (horizon > cfg.t0) times.push_back(horizon);
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= cfg.t0) || !(times[k] <= horizon)) {
      throw ValidationError("record time " + fmt(times[k]) + " outside [" + fmt(cfg.t0) + ", " +
                            fmt(horizon) + "]");
    }
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw ValidationError("record times must be strictly increasing");
    }
  }
  return times;
}

}  // namespace

StateVector mc_step_fixed(const KineticsParameters& p, const StateVector& x, double t, double dt,
                          NoiseSource& noise, YieldModel yield) {
  require_state(p, x);
  if (!(dt > 0.0)) throw ValidationError("Monte Carlo step dt must be > 0");
  const EventApplier events(p, yield);
  DenseVector v = x.values();
  fixed_step_inplace(p, events, v, t, dt, noise, 0);
  return StateVector(std::move(v));
}

std::optional<JumpResult> mc_step_exact(const KineticsParameters& p, const StateVector& x,
                                        double t, NoiseSource& noise, YieldModel yield) {
  require_state(p, x);
  const EventApplier events(p, yield);
  DenseVector v = x.values();
  const auto jump = exact_jump_inplace(p, events, v, t, noise);
  if (!jump) return std::nullopt;
  return JumpResult{jump->first, jump->second, StateVector(std::move(v))};
}

McTrajectory mc_trajectory(const KineticsParameters& p, const StateVector& x0, double horizon,
                           const McConfig& cfg, NoiseSource& noise) {
  require_state(p, x0);
  if (!std::isfinite(horizon) || horizon < cfg.t0) {
    throw ValidationError("Monte Carlo horizon must be finite and >= t0");
  }
  if (cfg.mode == McMode::FixedStep && (cfg.dt < 0.0 || !std::isfinite(cfg.dt))) {
    throw ValidationError("Monte Carlo dt must be > 0 (or 0 for automatic selection)");
  }
  const std::vector<double> records = normalized_record_times(cfg, horizon);
  const EventApplier events(p, cfg.yield);

  McTrajectory out;
  out.seed = noise.seed();
  out.event_counts.assign(static_cast<std::size_t>(events.event_count()), 0);
  out.times.reserve(records.size());
  out.states.reserve(records.size());

  DenseVector x = x0.values();
  if (cfg.yield == YieldModel::IntegerSampled) x = x.array().round().matrix();

  double t = cfg.t0;
  std::size_t r = 0;
  auto record_up_to = [&](double now) {
    while (r < records.size() && records[r] <= now) {
      out.times.push_back(records[r]);
      out.states.emplace_back(x);
      ++r;
    }
  };
  auto note_event = [&](int k) {
    ++out.event_counts[static_cast<std::size_t>(k)];
    if (has_negative(x)) ++out.diagnostics.negative_excursions;
  };
  record_up_to(t);

  if (cfg.mode == McMode::ExactJump) {
    while (t < horizon) {
      std::optional<std::pair<double, int>> jump;
      const DenseVector before = x;
      try {
        jump = exact_jump_inplace(p, events, x, t, noise);
      } catch (const DomainError& e) {
        throw SimulationError(std::string("exact jump at t=") + fmt(t) + ": " + e.what(),
                              out.diagnostics.steps, t);
      }
      if (!jump) break;  // absorbing: the state stays put until the horizon
      const double t_next = t + jump->first;
      // Records strictly before the jump see the pre-jump state.
      while (r < records.size() && records[r] < t_next) {
        out.times.push_back(records[r]);
        out.states.emplace_back(before);
        ++r;
      }
      if (t_next > horizon) break;
      ++out.diagnostics.steps;
      note_event(jump->second);
      t = t_next;
    }
    record_up_to(horizon);
    return out;
  }

  double dt = cfg.dt;
  if (dt == 0.0) {
    RateBuffer buf{};
    const std::span<double> rates(buf.data(), static_cast<std::size_t>(events.event_count()));
    fill_event_rates(p, p.reactivity()(t), p.source()(t), x, rates);
    const double r0 = total_rate(rates);
    dt = r0 > 0.0 ? 0.1 / r0 : std::max(horizon - cfg.t0, 1.0) * 1e-3;
  }

  while (t < horizon) {
    const double target = r < records.size() ? records[r] : horizon;
    const bool lands = target - t <= dt;
    const double h = lands ? target - t : dt;
    int k = -1;
    try {
      k = fixed_step_inplace(p, events, x, t, h, noise, out.diagnostics.steps);
    } catch (const StepTooLargeError&) {
      dt *= 0.5;
      ++out.diagnostics.dt_halvings;
      continue;
    } catch (const DomainError& e) {
      throw SimulationError(std::string("fixed step at t=") + fmt(t) + ": " + e.what(),
                            out.diagnostics.steps, t);
    }
    ++out.diagnostics.steps;
    if (k >= 0) note_event(k);
    t = lands ? target : t + h;
    record_up_to(t);
  }
  return out;
}

}  // namespace pointkin
