#include "pointkin/kinetics.hpp"

#include "pointkin/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pointkin {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void validate_piecewise(const PiecewiseConstant& f, const char* what) {
  if (f.breakpoints.empty()) {
    throw ValidationError(std::string(what) + ": piecewise function needs at least one breakpoint");
  }
  if (f.breakpoints.size() != f.values.size()) {
    throw ValidationError(std::string(what) + ": breakpoints and values differ in length");
  }
  for (std::size_t k = 0; k < f.breakpoints.size(); ++k) {
    if (!std::isfinite(f.breakpoints[k]) || !std::isfinite(f.values[k])) {
      throw ValidationError(std::string(what) + ": non-finite breakpoint or value");
    }
    if (k > 0 && !(f.breakpoints[k] > f.breakpoints[k - 1])) {
      throw ValidationError(std::string(what) + ": breakpoints must be strictly increasing");
    }
  }
}

double evaluate_piecewise(const PiecewiseConstant& f, double t, const char* what) {
  if (t < f.breakpoints.front()) {
    throw DomainError(std::string(what) + " undefined at t=" + fmt(t) +
                      " (first breakpoint " + fmt(f.breakpoints.front()) + ")");
  }
  // Last breakpoint <= t.
  const auto it = std::upper_bound(f.breakpoints.begin(), f.breakpoints.end(), t);
  return f.values[static_cast<std::size_t>(it - f.breakpoints.begin()) - 1];
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// ReactivityFunction / SourceFunction

ReactivityFunction ReactivityFunction::constant(double rho0) {
  require_finite(rho0, "reactivity");
  return ReactivityFunction(Constant{rho0});
}

ReactivityFunction ReactivityFunction::linear(double slope) {
  require_finite(slope, "reactivity slope");
  return ReactivityFunction(Linear{slope});
}

ReactivityFunction ReactivityFunction::piecewise(std::vector<double> breakpoints,
                                                 std::vector<double> values) {
  PiecewiseConstant f{std::move(breakpoints), std::move(values)};
  validate_piecewise(f, "reactivity");
  return ReactivityFunction(std::move(f));
}

double ReactivityFunction::operator()(double t) const {
  if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
  if (const auto* l = std::get_if<Linear>(&form_)) return l->slope * t;
  return evaluate_piecewise(std::get<PiecewiseConstant>(form_), t, "reactivity");
}

SourceFunction SourceFunction::constant(double q0) {
  require_finite(q0, "source");
  if (q0 < 0.0) throw ValidationError("source q must be >= 0 (got " + fmt(q0) + ")");
  return SourceFunction(Constant{q0});
}

SourceFunction SourceFunction::piecewise(std::vector<double> breakpoints,
                                         std::vector<double> values) {
  PiecewiseConstant f{std::move(breakpoints), std::move(values)};
  validate_piecewise(f, "source");
  for (double v : f.values) {
    if (v < 0.0) throw ValidationError("source values must be >= 0 (got " + fmt(v) + ")");
  }
  return SourceFunction(std::move(f));
}

double SourceFunction::operator()(double t) const {
  if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
  return evaluate_piecewise(std::get<PiecewiseConstant>(form_), t, "source");
}

// ---------------------------------------------------------------------------
// KineticsParameters

KineticsParameters::KineticsParameters(std::vector<double> lambda, std::vector<double> beta,
                                       double nu, double gen_time, ReactivityFunction reactivity,
                                       SourceFunction source, std::optional<double> alpha)
    : lambda_(std::move(lambda)),
      beta_(std::move(beta)),
      nu_(nu),
      gen_time_(gen_time),
      reactivity_(std::move(reactivity)),
      source_(std::move(source)) {
  if (lambda_.empty()) throw ValidationError("at least one precursor group is required (m >= 1)");
  if (lambda_.size() != beta_.size()) {
    throw ValidationError("lambda and beta must have the same length (got " +
                          std::to_string(lambda_.size()) + " and " +
                          std::to_string(beta_.size()) + ")");
  }
  // One slot is reserved for the augmented source column of the deterministic stepper.
  if (static_cast<int>(lambda_.size()) + 2 > kMaxDim) {
    throw ValidationError("at most " + std::to_string(kMaxDim - 2) + " precursor groups supported");
  }
  for (std::size_t i = 0; i < lambda_.size(); ++i) {
    if (!std::isfinite(lambda_[i]) || !(lambda_[i] > 0.0)) {
      throw ValidationError("lambda[" + std::to_string(i) + "] = " + fmt(lambda_[i]) +
                            " violates lambda positivity (decay constants must be > 0)");
    }
    if (!std::isfinite(beta_[i]) || beta_[i] < 0.0) {
      throw ValidationError("beta[" + std::to_string(i) + "] = " + fmt(beta_[i]) +
                            " violates beta nonnegativity (delayed fractions must be >= 0)");
    }
  }
  if (!std::isfinite(nu_) || !(nu_ > 0.0)) {
    throw ValidationError("nu = " + fmt(nu_) + " violates nu positivity (must be > 0)");
  }
  if (!std::isfinite(gen_time_) || !(gen_time_ > 0.0)) {
    throw ValidationError("gen_time = " + fmt(gen_time_) +
                          " violates generation time positivity (must be > 0)");
  }
  beta_total_ = std::accumulate(beta_.begin(), beta_.end(), 0.0);
  if (alpha) {
    if (!std::isfinite(*alpha) || !(*alpha > 0.0)) {
      throw ValidationError("alpha = " + fmt(*alpha) + " must be finite and > 0");
    }
    alpha_ = *alpha;
    alpha_overridden_ = true;
  } else {
    alpha_ = 1.0 / nu_;
  }
}

KineticsParameters KineticsParameters::with_reactivity(ReactivityFunction rho) const {
  KineticsParameters copy = *this;
  copy.reactivity_ = std::move(rho);
  return copy;
}

KineticsParameters KineticsParameters::with_source(SourceFunction q) const {
  KineticsParameters copy = *this;
  copy.source_ = std::move(q);
  return copy;
}

// ---------------------------------------------------------------------------
// StateVector

StateVector::StateVector(DenseVector values) : values_(std::move(values)) {
  if (values_.size() < 2 || values_.size() > kMaxDim) {
    throw ValidationError("state dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  }
  if (!values_.allFinite()) throw ValidationError("state has non-finite components");
}

StateVector::StateVector(double n, std::span<const double> c)
    : StateVector([&] {
        DenseVector v(static_cast<Eigen::Index>(c.size()) + 1);
        v(0) = n;
        for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i) + 1) = c[i];
        return v;
      }()) {}

// ---------------------------------------------------------------------------
// Matrices and events

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Capture: return "capture";
    case EventKind::Fission: return "fission";
    case EventKind::Transformation: return "transformation";
    case EventKind::SourceBirth: return "source_birth";
  }
  return "unknown";
}

void fill_drift(const KineticsParameters& p, double rho, DenseMatrix& out) {
  const int d = p.dim();
  const double l = p.gen_time();
  out.setZero(d, d);
  out(0, 0) = (rho - p.beta_total()) / l;
  for (int i = 1; i < d; ++i) {
    out(0, i) = p.lambda()[i - 1];
    out(i, 0) = p.beta()[i - 1] / l;
    out(i, i) = -p.lambda()[i - 1];
  }
}

double diffusion_gamma(const KineticsParameters& p, double rho) {
  const double b = p.beta_total();
  return (-1.0 - rho + 2.0 * b + (1.0 - b) * (1.0 - b) * p.nu()) / p.gen_time();
}

double fill_diffusion(const KineticsParameters& p, double rho, double q, const DenseVector& x,
                      DenseMatrix& out) {
  const int d = p.dim();
  const double l = p.gen_time();
  const double nu = p.nu();
  const double n = x(0);
  const double fission_yield = -1.0 + (1.0 - p.beta_total()) * nu;
  const auto lambda = p.lambda();
  const auto beta = p.beta();

  out.resize(d, d);
  double decay_sum = 0.0;
  for (int i = 1; i < d; ++i) {
    const double decay = lambda[i - 1] * x(i);
    decay_sum += decay;
    const double a = beta[i - 1] / l * fission_yield * n - decay;
    out(0, i) = a;
    out(i, 0) = a;
    out(i, i) = beta[i - 1] * beta[i - 1] * nu / l * n + decay;
    for (int j = i + 1; j < d; ++j) {
      const double b = beta[i - 1] * beta[j - 1] * nu / l * n;
      out(i, j) = b;
      out(j, i) = b;
    }
  }
  const double zeta = diffusion_gamma(p, rho) * n + decay_sum + q;
  out(0, 0) = zeta;
  return zeta;
}

void fill_event_rates(const KineticsParameters& p, double rho, double q, const DenseVector& x,
                      std::span<double> out) {
  const double l = p.gen_time();
  const double capture_coeff = (-rho + 1.0 - p.alpha()) / l;
  if (capture_coeff < 0.0) {
    throw DomainError("capture rate coefficient (-rho + 1 - alpha)/l is negative at rho=" +
                      fmt(rho));
  }
  const double n = std::max(x(0), 0.0);
  out[0] = capture_coeff * n;
  out[1] = n / (p.nu() * l);
  const int m = p.groups();
  for (int i = 0; i < m; ++i) out[2 + i] = p.lambda()[i] * std::max(x(i + 1), 0.0);
  out[2 + m] = q;
}

DriftMatrix build_drift_matrix(const KineticsParameters& p, double t) {
  DriftMatrix out;
  out.time = t;
  out.reactivity = p.reactivity()(t);
  fill_drift(p, out.reactivity, out.values);
  return out;
}

DiffusionMatrix build_diffusion_matrix(const KineticsParameters& p, const StateVector& x,
                                       double t) {
  if (x.dim() != p.dim()) {
    throw ValidationError("state dimension " + std::to_string(x.dim()) +
                          " does not match parameters (m+1 = " + std::to_string(p.dim()) + ")");
  }
  const double rho = p.reactivity()(t);
  DiffusionMatrix out;
  out.gamma = diffusion_gamma(p, rho);
  out.zeta = fill_diffusion(p, rho, p.source()(t), x.values(), out.values);
  return out;
}

std::vector<EventVector> event_vectors(const KineticsParameters& p) {
  const int d = p.dim();
  const int m = p.groups();
  std::vector<EventVector> events;
  events.reserve(static_cast<std::size_t>(m) + 3);

  EventVector capture{EventKind::Capture, -1, DenseVector::Zero(d)};
  capture.delta(0) = -1.0;
  events.push_back(std::move(capture));

  EventVector fission{EventKind::Fission, -1, DenseVector::Zero(d)};
  fission.delta(0) = -1.0 + (1.0 - p.beta_total()) * p.nu();
  for (int i = 0; i < m; ++i) fission.delta(i + 1) = p.beta()[i] * p.nu();
  events.push_back(std::move(fission));

  for (int i = 0; i < m; ++i) {
    EventVector transform{EventKind::Transformation, i, DenseVector::Zero(d)};
    transform.delta(0) = 1.0;
    transform.delta(i + 1) = -1.0;
    events.push_back(std::move(transform));
  }

  EventVector source{EventKind::SourceBirth, -1, DenseVector::Zero(d)};
  source.delta(0) = 1.0;
  events.push_back(std::move(source));
  return events;
}

std::vector<double> event_rates(const KineticsParameters& p, const StateVector& x, double t) {
  if (x.dim() != p.dim()) {
    throw ValidationError("state dimension " + std::to_string(x.dim()) +
                          " does not match parameters (m+1 = " + std::to_string(p.dim()) + ")");
  }
  for (int k = 0; k < x.dim(); ++k) {
    if (x.values()(k) < 0.0) {
      throw ValidationError("event rates require nonnegative populations (component " +
                            std::to_string(k) + " = " + fmt(x.values()(k)) + ")");
    }
  }
  std::vector<double> rates(static_cast<std::size_t>(p.groups()) + 3);
  fill_event_rates(p, p.reactivity()(t), p.source()(t), x.values(), rates);
  return rates;
}

StateVector equilibrium_state(const KineticsParameters& p, double t, const EquilibriumMode& mode) {
  const int d = p.dim();
  if (const auto* free = std::get_if<SourceFreeEquilibrium>(&mode)) {
    DenseVector x(d);
    x(0) = free->n0;
    for (int i = 1; i < d; ++i) {
      x(i) = p.beta()[i - 1] * free->n0 / (p.lambda()[i - 1] * p.gen_time());
    }
    return StateVector(std::move(x));
  }
  DenseMatrix a;
  fill_drift(p, p.reactivity()(t), a);
  DenseVector rhs = DenseVector::Zero(d);
  rhs(0) = -p.source()(t);
  try {
    return StateVector(solve_linear(a, rhs));
  } catch (const NumericsError& e) {
    throw NumericsError(std::string("no finite equilibrium: ") + e.what());
  }
}

}  // namespace pointkin
