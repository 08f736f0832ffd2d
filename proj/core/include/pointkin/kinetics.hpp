#pragma once

// Problem definition for the stochastic point kinetics system: parameters,
// time-dependent reactivity and source, the state vector (n, c_1..c_m), and
// the constructors for the drift matrix, the diffusion (increment covariance)
// matrix, the event table and the event rates.

#include "pointkin/numerics.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pointkin {

/// Step function: value[k] on [breakpoints[k], breakpoints[k+1]), the last
/// value held beyond the last breakpoint. Undefined before breakpoints[0].
struct PiecewiseConstant {
  std::vector<double> breakpoints;
  std::vector<double> values;

  bool operator==(const PiecewiseConstant&) const = default;
};

class ReactivityFunction {
 public:
  struct Constant {
    double value = 0.0;
    bool operator==(const Constant&) const = default;
  };
  /// rho(t) = slope * t
  struct Linear {
    double slope = 0.0;
    bool operator==(const Linear&) const = default;
  };
  using Form = std::variant<Constant, Linear, PiecewiseConstant>;

  static ReactivityFunction constant(double rho0);
  static ReactivityFunction linear(double slope);
  static ReactivityFunction piecewise(std::vector<double> breakpoints, std::vector<double> values);

  /// Throws DomainError for a piecewise function evaluated before its first breakpoint.
  double operator()(double t) const;

  bool is_constant() const { return std::holds_alternative<Constant>(form_); }
  const Form& form() const { return form_; }

  bool operator==(const ReactivityFunction&) const = default;

 private:
  explicit ReactivityFunction(Form form) : form_(std::move(form)) {}
  Form form_;
};

class SourceFunction {
 public:
  struct Constant {
    double value = 0.0;
    bool operator==(const Constant&) const = default;
  };
  using Form = std::variant<Constant, PiecewiseConstant>;

  static SourceFunction constant(double q0);
  static SourceFunction piecewise(std::vector<double> breakpoints, std::vector<double> values);

  double operator()(double t) const;

  bool is_constant() const { return std::holds_alternative<Constant>(form_); }
  const Form& form() const { return form_; }

  bool operator==(const SourceFunction&) const = default;

 private:
  explicit SourceFunction(Form form) : form_(std::move(form)) {}
  Form form_;
};

/// Physics constants of an m-group point reactor. Immutable; every
/// constructor argument is validated.
class KineticsParameters {
 public:
  /// `alpha` defaults to 1/nu; passing a value marks it as overridden.
  KineticsParameters(std::vector<double> lambda, std::vector<double> beta, double nu,
                     double gen_time, ReactivityFunction reactivity, SourceFunction source,
                     std::optional<double> alpha = std::nullopt);

  int groups() const { return static_cast<int>(lambda_.size()); }
  int dim() const { return groups() + 1; }

  std::span<const double> lambda() const { return lambda_; }
  std::span<const double> beta() const { return beta_; }
  double beta_total() const { return beta_total_; }
  double nu() const { return nu_; }
  double alpha() const { return alpha_; }
  bool alpha_overridden() const { return alpha_overridden_; }
  double gen_time() const { return gen_time_; }
  const ReactivityFunction& reactivity() const { return reactivity_; }
  const SourceFunction& source() const { return source_; }

  KineticsParameters with_reactivity(ReactivityFunction rho) const;
  KineticsParameters with_source(SourceFunction q) const;

  bool operator==(const KineticsParameters&) const = default;

 private:
  std::vector<double> lambda_;
  std::vector<double> beta_;
  double beta_total_ = 0.0;
  double nu_ = 0.0;
  double alpha_ = 0.0;
  bool alpha_overridden_ = false;
  double gen_time_ = 0.0;
  ReactivityFunction reactivity_;
  SourceFunction source_;
};

/// (n, c_1, ..., c_m). The dimension is fixed at construction. Components may
/// be negative: SDE sample paths can undershoot zero.
class StateVector {
 public:
  explicit StateVector(DenseVector values);
  StateVector(double n, std::span<const double> c);
  StateVector(double n, std::initializer_list<double> c)
      : StateVector(n, std::span<const double>(c.begin(), c.size())) {}

  double n() const { return values_(0); }
  /// Precursor concentration of group `i` (0-based).
  double c(int i) const { return values_(i + 1); }
  double precursor_sum() const { return values_.tail(values_.size() - 1).sum(); }
  int groups() const { return static_cast<int>(values_.size()) - 1; }
  int dim() const { return static_cast<int>(values_.size()); }
  const DenseVector& values() const { return values_; }

  bool operator==(const StateVector& other) const { return values_ == other.values_; }

 private:
  DenseVector values_;
};

struct DriftMatrix {
  DenseMatrix values;
  double time = 0.0;
  double reactivity = 0.0;
};

struct DiffusionMatrix {
  DenseMatrix values;
  double zeta = 0.0;
  double gamma = 0.0;
};

enum class EventKind { Capture, Fission, Transformation, SourceBirth };

std::string to_string(EventKind kind);

struct EventVector {
  EventKind kind = EventKind::Capture;
  int group = -1;  // 0-based precursor group for Transformation, else -1
  DenseVector delta;
};

// Kernels taking already-evaluated rho/q. Used directly by the solvers' inner
// loops; the operations below evaluate the time functions and validate.

/// Fills the drift matrix for reactivity `rho` into `out`.
void fill_drift(const KineticsParameters& p, double rho, DenseMatrix& out);

/// gamma = (-1 - rho + 2 beta + (1 - beta)^2 nu) / l
double diffusion_gamma(const KineticsParameters& p, double rho);

/// Fills the diffusion matrix at state `x` into `out`; returns zeta.
double fill_diffusion(const KineticsParameters& p, double rho, double q, const DenseVector& x,
                      DenseMatrix& out);

/// Event rates in event_vectors() order. Negative populations contribute a
/// zero rate. Throws DomainError when the capture coefficient
/// (-rho + 1 - alpha)/l is negative.
void fill_event_rates(const KineticsParameters& p, double rho, double q, const DenseVector& x,
                      std::span<double> out);

DriftMatrix build_drift_matrix(const KineticsParameters& p, double t);

/// Throws ValidationError on a dimension mismatch.
DiffusionMatrix build_diffusion_matrix(const KineticsParameters& p, const StateVector& x,
                                       double t);

/// Capture, Fission, Transformation(0..m-1), SourceBirth (m + 3 entries).
std::vector<EventVector> event_vectors(const KineticsParameters& p);

/// Rates (1/s) in event_vectors() order. Throws ValidationError for negative
/// populations.
std::vector<double> event_rates(const KineticsParameters& p, const StateVector& x, double t);

/// Source-free equilibrium with a given neutron density: c_i = beta_i n0 / (lambda_i l).
struct SourceFreeEquilibrium {
  double n0 = 0.0;
  bool operator==(const SourceFreeEquilibrium&) const = default;
};
/// Stationary point of the drift with the source: A x + q e_0 = 0.
struct SourcedEquilibrium {
  bool operator==(const SourcedEquilibrium&) const = default;
};
using EquilibriumMode = std::variant<SourcedEquilibrium, SourceFreeEquilibrium>;

/// Throws NumericsError when the sourced system has no finite equilibrium
/// (for example rho = 0 with q > 0).
StateVector equilibrium_state(const KineticsParameters& p, double t, const EquilibriumMode& mode);

}  // namespace pointkin
