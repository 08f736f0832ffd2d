#include "pointkin/solvers.hpp"

#include "pointkin/error.hpp"

#include <cmath>
#include <sstream>

namespace pointkin {

TimeGrid::TimeGrid(double t0, double t_end, double dt) : t0_(t0), t_end_(t_end), dt_(dt) {
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !std::isfinite(dt)) {
    throw ValidationError("time grid bounds and step must be finite");
  }
  if (!(dt > 0.0)) throw ValidationError("time step dt must be > 0");
  if (t_end < t0) throw ValidationError("time grid end precedes its start");
  const double ratio = (t_end - t0) / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os.precision(17);
    os << "horizon " << (t_end - t0) << " is not an integer multiple of dt=" << dt;
    throw ValidationError(os.str());
  }
  steps_ = static_cast<long>(rounded);
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(static_cast<std::size_t>(steps_) + 1);
  for (long i = 0; i <= steps_; ++i) out[static_cast<std::size_t>(i)] = node(i);
  return out;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::Deterministic: return "det";
    case Method::EulerMaruyama: return "em";
    case Method::StochasticPca: return "pca";
  }
  return "unknown";
}

namespace {

void check_inputs(const KineticsParameters& p, const StateVector& x0, const SolverOptions& opts) {
  if (x0.dim() != p.dim()) {
    throw ValidationError("initial state dimension " + std::to_string(x0.dim()) +
                          " does not match parameters (m+1 = " + std::to_string(p.dim()) + ")");
  }
  if (opts.record_every < 1) throw ValidationError("record_every must be >= 1");
}

/// Drives the per-step update and records the requested nodes.
template <class Step>
Trajectory integrate(Method method, const KineticsParameters& p, const StateVector& x0,
                     const TimeGrid& grid, const SolverOptions& opts, Step&& step) {
  check_inputs(p, x0, opts);
  Trajectory traj;
  traj.method = method;
  const long steps = grid.steps();
  const auto expected = static_cast<std::size_t>(steps / opts.record_every + 2);
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  if (opts.record_step_reactivity) {
    traj.diagnostics.step_reactivity.reserve(static_cast<std::size_t>(steps));
  }

  DenseVector x = x0.values();
  traj.times.push_back(grid.node(0));
  traj.states.emplace_back(x);
  for (long i = 0; i < steps; ++i) {
    const double t = grid.node(i);
    const double t_next = grid.node(i + 1);
    try {
      step(i, t, t_next, x, traj.diagnostics);
    } catch (const SimulationError&) {
      throw;
    } catch (const Error& e) {
      std::ostringstream os;
      os.precision(17);
      os << to_string(method) << " step " << i << " at t=" << t << ": " << e.what();
      throw SimulationError(os.str(), i, t);
    }
    if (x(0) < 0.0) ++traj.diagnostics.negative_n_steps;
    if (!x.allFinite()) {
      std::ostringstream os;
      os.precision(17);
      os << to_string(method) << " step " << i << " at t=" << t << " produced a non-finite state";
      throw SimulationError(os.str(), i, t);
    }
    if ((i + 1) % opts.record_every == 0 || i + 1 == steps) {
      traj.times.push_back(t_next);
      traj.states.emplace_back(x);
    }
  }
  return traj;
}

/// e^{M dt} and its source integral for the last (rho, q) seen.
class PropagatorCache {
 public:
  explicit PropagatorCache(const KineticsParameters& p) : p_(p) {}

  void update(double rho, double q, double dt, bool with_source) {
    if (valid_ && rho == rho_ && q == q_ && dt == dt_) return;
    const int d = p_.dim();
    DenseMatrix drift;
    fill_drift(p_, rho, drift);
    if (with_source) {
      DenseMatrix aug = DenseMatrix::Zero(d + 1, d + 1);
      aug.topLeftCorner(d, d) = drift * dt;
      aug(0, d) = q * dt;
      const DenseMatrix e = matrix_exponential(aug);
      phi_ = e.topLeftCorner(d, d);
      psi_ = e.col(d).head(d);
    } else {
      phi_ = matrix_exponential(DenseMatrix(drift * dt));
      psi_ = DenseVector::Zero(d);
    }
    rho_ = rho;
    q_ = q;
    dt_ = dt;
    valid_ = true;
  }

  const DenseMatrix& phi() const { return phi_; }
  const DenseVector& psi() const { return psi_; }

 private:
  const KineticsParameters& p_;
  bool valid_ = false;
  double rho_ = 0.0;
  double q_ = 0.0;
  double dt_ = 0.0;
  DenseMatrix phi_;
  DenseVector psi_;
};

/// Adds B(x, t)^{1/2} sqrt(dt) xi to `x` (no-op with zero_noise).
class DiffusionKick {
 public:
  DiffusionKick(const KineticsParameters& p, NoiseSource& noise, const SolverOptions& opts)
      : p_(p), noise_(noise), opts_(opts), xi_(p.dim()) {}

  void apply(double rho, double q, double dt, const DenseVector& at, DenseVector& x,
             SolverDiagnostics& diag) {
    if (opts_.zero_noise) return;
    fill_diffusion(p_, rho, q, at, b_);
    const PsdSqrt root = psd_sqrt(b_, opts_.psd_policy);
    diag.clipped_eigenvalues += root.clipped;
    noise_.fill_normal(xi_);
    x.noalias() += std::sqrt(dt) * (root.root * xi_);
  }

 private:
  const KineticsParameters& p_;
  NoiseSource& noise_;
  const SolverOptions& opts_;
  DenseVector xi_;
  DenseMatrix b_;
};

}  // namespace

Trajectory deterministic_solve(const KineticsParameters& p, const StateVector& x0,
                               const TimeGrid& grid, const SolverOptions& options) {
  PropagatorCache cache(p);
  return integrate(Method::Deterministic, p, x0, grid, options,
                   [&](long, double t, double t_next, DenseVector& x, SolverDiagnostics& diag) {
                     const double mid = 0.5 * (t + t_next);
                     const double rho = p.reactivity()(mid);
                     const double q = p.source()(mid);
                     if (options.record_step_reactivity) diag.step_reactivity.push_back(rho);
                     cache.update(rho, q, t_next - t, q != 0.0);
                     x = cache.phi() * x + cache.psi();
                   });
}

Trajectory euler_maruyama_solve(const KineticsParameters& p, const StateVector& x0,
                                const TimeGrid& grid, NoiseSource& noise,
                                const SolverOptions& options) {
  DiffusionKick kick(p, noise, options);
  DenseMatrix drift;
  bool have_drift = false;
  double drift_rho = 0.0;
  DenseVector start(p.dim());
  Trajectory traj = integrate(
      Method::EulerMaruyama, p, x0, grid, options,
      [&](long, double t, double t_next, DenseVector& x, SolverDiagnostics& diag) {
        const double dt = t_next - t;
        const double rho = p.reactivity()(t);
        const double q = p.source()(t);
        if (options.record_step_reactivity) diag.step_reactivity.push_back(rho);
        if (!have_drift || rho != drift_rho) {
          fill_drift(p, rho, drift);
          drift_rho = rho;
          have_drift = true;
        }
        start = x;
        x.noalias() += dt * (drift * start);
        x(0) += dt * q;
        kick.apply(rho, q, dt, start, x, diag);
      });
  traj.seed = noise.seed();
  return traj;
}

Trajectory stochastic_pca_solve(const KineticsParameters& p, const StateVector& x0,
                                const TimeGrid& grid, NoiseSource& noise,
                                const SolverOptions& options) {
  PropagatorCache cache(p);
  DiffusionKick kick(p, noise, options);
  DenseVector start(p.dim());
  Trajectory traj = integrate(
      Method::StochasticPca, p, x0, grid, options,
      [&](long, double t, double t_next, DenseVector& x, SolverDiagnostics& diag) {
        const double dt = t_next - t;
        const double mid = 0.5 * (t + t_next);
        const double rho_mid = p.reactivity()(mid);
        const double q_mid = p.source()(mid);
        if (options.record_step_reactivity) diag.step_reactivity.push_back(rho_mid);
        cache.update(rho_mid, 0.0, dt, false);
        start = x;
        x(0) += q_mid * dt;
        // Diffusion is evaluated at the step's start state and time.
        kick.apply(p.reactivity()(t), p.source()(t), dt, start, x, diag);
        x = cache.phi() * x;
      });
  traj.seed = noise.seed();
  return traj;
}

}  // namespace pointkin
