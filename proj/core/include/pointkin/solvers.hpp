#pragma once

// Continuous-state solvers for the point kinetics Ito system
//   dx = (A(t) x + q(t) e0) dt + B(x, t)^{1/2} dW
// on a uniform time grid: the deterministic exponential integrator (B = 0),
// Euler-Maruyama, and the stochastic piecewise-constant approximation (PCA).

#include "pointkin/kinetics.hpp"
#include "pointkin/noise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pointkin {

/// Uniform grid t0 < t0 + dt < ... < t_end. The horizon must be an integer
/// number of steps (to 1e-9); the last node is exactly t_end.
class TimeGrid {
 public:
  TimeGrid(double t0, double t_end, double dt);

  double t0() const { return t0_; }
  double t_end() const { return t_end_; }
  double dt() const { return dt_; }
  long steps() const { return steps_; }

  /// Node i in [0, steps()].
  double node(long i) const { return i == steps_ ? t_end_ : t0_ + static_cast<double>(i) * dt_; }
  std::vector<double> nodes() const;

 private:
  double t0_;
  double t_end_;
  double dt_;
  long steps_;
};

enum class Method { Deterministic, EulerMaruyama, StochasticPca };

std::string to_string(Method method);

struct SolverOptions {
  /// Diagnostic: treat the diffusion matrix as identically zero.
  bool zero_noise = false;
  PsdPolicy psd_policy = PsdPolicy::Strict;
  /// Record node i when i % record_every == 0; the final node is always recorded.
  long record_every = 1;
  /// Keep the reactivity value used by each step in the diagnostics.
  bool record_step_reactivity = false;
};

struct SolverDiagnostics {
  long negative_n_steps = 0;      // steps that ended with n < 0
  long clipped_eigenvalues = 0;   // summed over all diffusion square roots
  std::vector<double> step_reactivity;
};

struct Trajectory {
  Method method = Method::Deterministic;
  std::optional<std::uint64_t> seed;
  std::vector<double> times;
  std::vector<StateVector> states;
  SolverDiagnostics diagnostics;
};

/// Exponential integrator with midpoint-frozen reactivity and source:
///   x_{i+1} = e^{M dt} x_i + (integral_0^dt e^{M s} ds) F,  M = A(rho_mid), F = q_mid e0.
/// Exact for constant coefficients up to the exponential kernel.
Trajectory deterministic_solve(const KineticsParameters& p, const StateVector& x0,
                               const TimeGrid& grid, const SolverOptions& options = {});

/// x_{i+1} = x_i + (A(t_i) x_i + q(t_i) e0) dt + B(x_i, t_i)^{1/2} sqrt(dt) xi_i
///
/// A diffusion square-root failure is rethrown as SimulationError carrying the
/// step index.
Trajectory euler_maruyama_solve(const KineticsParameters& p, const StateVector& x0,
                                const TimeGrid& grid, NoiseSource& noise,
                                const SolverOptions& options = {});

/// Euler step on the transformed variable e^{-M_i t} x with M_i = A(rho_mid):
///   x_{i+1} = e^{M_i dt} (x_i + q_mid e0 dt + B(x_i, t_i)^{1/2} sqrt(dt) xi_i)
Trajectory stochastic_pca_solve(const KineticsParameters& p, const StateVector& x0,
                                const TimeGrid& grid, NoiseSource& noise,
                                const SolverOptions& options = {});

}  // namespace pointkin
