// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented
// below it. Exit status is nonzero when any criterion fails.

#include "pointkin/ensemble.hpp"
#include "pointkin/error.hpp"
#include "pointkin/event_sim.hpp"
#include "pointkin/kinetics.hpp"
#include "pointkin/numerics.hpp"
#include "pointkin/report.hpp"
#include "pointkin/scenario.hpp"
#include "pointkin/solvers.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace pk = pointkin;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel(double got, double ref) { return std::abs(got - ref) / std::abs(ref); }

struct Report {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& text) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "MISS ") + text);
  }
  void note(const std::string& text) { lines.push_back("     " + text); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

/// Checks |got - ref| / ref <= tol and records a detail line.
void within(Report& r, const std::string& what, double got, double ref, double tol) {
  const double d = rel(got, ref);
  r.check(d <= tol, fmt("%-28s %14.6g  ref %12.6g  rel %.3g%%  (tol %.3g%%)", what.c_str(), got,
                        ref, 100.0 * d, 100.0 * tol));
}

pk::EnsembleSummary ensemble(const pk::ScenarioConfig& c, pk::RunMethod m, long samples,
                             std::uint64_t seed = 1) {
  auto cfg = c.ensemble_config(m);
  cfg.min_samples = cfg.max_samples = samples;
  cfg.master_seed = seed;
  const auto grid = c.grid(m);
  return pk::run_ensemble(c.parameters, c.initial_state(), grid, cfg);
}

// ---------------------------------------------------------------------------

Report deterministic_table1() {
  Report r;
  const auto start = Clock::now();
  const auto c = pk::preset("table1");
  const auto traj = pk::deterministic_solve(c.parameters, c.initial_state(),
                                            c.grid(pk::RunMethod::Deterministic));
  const double t = seconds_since(start);
  within(r, "n(2)", traj.states.back().n(), 412.13, 1e-3);
  within(r, "c1(2)", traj.states.back().c(0), 315.93, 1e-3);
  r.check(t < 1.0, fmt("runtime %.3f s (< 1 s)", t));
  r.note("x(0) = (400, 300) is a stationary point of the drift with beta_1 = 0.05,");
  r.note("so the exact solution is constant; see the decisions ledger.");
  return r;
}

Report deterministic_table23() {
  Report r;
  const auto start = Clock::now();
  for (const char* name : {"table2", "table3"}) {
    const auto c = pk::preset(name);
    const auto traj = pk::deterministic_solve(c.parameters, c.initial_state(),
                                              c.grid(pk::RunMethod::Deterministic));
    const auto& x = traj.states.back();
    const bool two = std::string(name) == "table2";
    within(r, std::string(name) + " n", x.n(), two ? 200.005 : 139.61, 5e-3);
    within(r, std::string(name) + " sum c", x.precursor_sum(), two ? 4.497e5 : 4.463e5, 5e-3);
  }
  const double t = seconds_since(start);
  r.check(t < 5.0, fmt("runtime %.3f s (< 5 s)", t));
  return r;
}

Report stochastic_table1() {
  Report r;
  const auto start = Clock::now();
  const auto c = pk::preset("table1");
  struct Ref {
    pk::RunMethod method;
    double n, c1, sigma_n;
  };
  for (const Ref& ref : {Ref{pk::RunMethod::EventMc, 400.03, 300.01, 27.31},
                         Ref{pk::RunMethod::StochasticPca, 395.32, 300.67, 29.41},
                         Ref{pk::RunMethod::EulerMaruyama, 412.23, 315.96, 34.39}}) {
    const auto s = ensemble(c, ref.method, 10000);
    const std::string m = pk::to_string(ref.method);
    const auto& n = s.final(pk::Quantity::neutron());
    const auto& c1 = s.final(pk::Quantity::precursor(0));
    within(r, m + " E(n(2))", n.mean, ref.n, 0.05);
    within(r, m + " E(c1(2))", c1.mean, ref.c1, 0.05);
    within(r, m + " sigma(n(2))", n.std, ref.sigma_n, 0.25);
    r.note(fmt("%s: N=%ld  E(n) +/- %.3g (95%%)  sigma(c1)=%.4g", m.c_str(), s.samples,
               n.ci_halfwidth, c1.std));
  }
  const double t = seconds_since(start);
  r.check(t < 120.0, fmt("runtime %.1f s (< 120 s)", t));
  return r;
}

Report stochastic_table23() {
  Report r;
  const auto start = Clock::now();
  const auto c3 = pk::preset("table3");
  for (const auto& [method, ref] :
       {std::pair{pk::RunMethod::EventMc, 135.66}, std::pair{pk::RunMethod::StochasticPca, 134.55},
        std::pair{pk::RunMethod::EulerMaruyama, 139.57}}) {
    const auto s = ensemble(c3, method, 2000);
    const auto& n = s.final(pk::Quantity::neutron());
    within(r, "table3 " + pk::to_string(method) + " E(n)", n.mean, ref, 0.10);
    r.note(fmt("N=%ld  +/- %.3g (95%%)  sigma(n)=%.4g  sigma(sum c)=%.4g", s.samples,
               n.ci_halfwidth, n.std, s.final(pk::Quantity::precursor_sum()).std));
  }
  const auto c2 = pk::preset("table2");
  for (const auto& [method, ref] : {std::pair{pk::RunMethod::StochasticPca, 186.31},
                                    std::pair{pk::RunMethod::EulerMaruyama, 208.6}}) {
    const auto s = ensemble(c2, method, 2000);
    const auto& n = s.final(pk::Quantity::neutron());
    within(r, "table2 " + pk::to_string(method) + " E(n)", n.mean, ref, 0.15);
    r.note(fmt("N=%ld  +/- %.3g (95%%)  sigma(n)=%.4g  failures=%ld", s.samples, n.ci_halfwidth,
               n.std, s.failures));
  }
  const double t = seconds_since(start);
  r.check(t < 600.0, fmt("runtime %.1f s (< 600 s)", t));
  return r;
}

bool monotone_after(const std::vector<double>& times, const std::vector<double>& values,
                    double t_min) {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i - 1] >= t_min && !(values[i] > values[i - 1])) return false;
  }
  return true;
}

Report linear_reactivity() {
  Report r;
  const auto c = pk::preset("linear-rho");
  const double transient = 0.01;
  pk::SolverOptions opt;
  opt.record_every = c.record_every(pk::RunMethod::Deterministic);
  const auto det = pk::deterministic_solve(c.parameters, c.initial_state(),
                                           c.grid(pk::RunMethod::Deterministic), opt);
  std::vector<double> n_det;
  for (const auto& x : det.states) n_det.push_back(x.n());
  r.check(monotone_after(det.times, n_det, transient),
          fmt("deterministic n increasing on [%.3g, 0.1]: n %.4g -> %.4g", transient,
              n_det.front(), n_det.back()));

  const auto pca = ensemble(c, pk::RunMethod::StochasticPca, 1000);
  std::vector<double> n_pca;
  for (const auto& row : pk::summarize_component(pca, pk::Quantity::neutron()))
    n_pca.push_back(row.estimate.mean);
  r.check(monotone_after(pca.times, n_pca, transient),
          fmt("PCA mean n increasing on [%.3g, 0.1]: n %.4g -> %.4g", transient, n_pca.front(),
              n_pca.back()));

  const auto em = ensemble(c, pk::RunMethod::EulerMaruyama, 1000);
  const auto& a = pca.final(pk::Quantity::neutron());
  const auto& b = em.final(pk::Quantity::neutron());
  const double se = std::sqrt(a.std * a.std / a.n + b.std * b.std / b.n);
  const double z = std::abs(a.mean - b.mean) / se;
  r.check(z <= 3.0, fmt("PCA %.5g vs EM %.5g at t=0.1: %.2f combined SE (<= 3)", a.mean, b.mean, z));
  r.note(fmt("deterministic n(0.1) = %.5g; PCA N=%ld, EM N=%ld", n_det.back(), a.n, b.n));
  return r;
}

Report property_suite() {
  Report r;
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  // Drift/covariance identities and column sums on random states.
  double worst_mean = 0.0;
  double worst_cov = 0.0;
  double worst_col = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 6);
    std::vector<double> lambda(m), beta(m), c(m);
    for (int i = 0; i < m; ++i) {
      lambda[i] = 0.01 + 4.0 * u(rng);
      beta[i] = 1e-4 + 0.01 * u(rng);
      c[i] = 1e4 * u(rng);
    }
    const double rho = -0.5 + 0.8 * u(rng);
    const pk::KineticsParameters p(lambda, beta, 2.0 + u(rng), std::pow(10.0, -5.0 + 5.0 * u(rng)),
                                   pk::ReactivityFunction::constant(rho),
                                   pk::SourceFunction::constant(500.0 * u(rng)));
    const pk::StateVector x(1e3 * u(rng), c);
    const auto ev = pk::event_vectors(p);
    const auto rates = pk::event_rates(p, x, 0.0);
    pk::DenseVector mean = pk::DenseVector::Zero(p.dim());
    pk::DenseMatrix cov = pk::DenseMatrix::Zero(p.dim(), p.dim());
    double total = 0.0;
    for (std::size_t k = 0; k < ev.size(); ++k) {
      mean += rates[k] * ev[k].delta;
      cov += rates[k] * ev[k].delta * ev[k].delta.transpose();
      total += rates[k];
    }
    const pk::DenseMatrix a = pk::build_drift_matrix(p, 0.0).values;
    pk::DenseVector drift = a * x.values();
    drift(0) += p.source()(0.0);
    const auto b = pk::build_diffusion_matrix(p, x, 0.0).values;
    worst_mean = std::max(worst_mean, (mean - drift).cwiseAbs().maxCoeff() / total);
    worst_cov = std::max(worst_cov, pk::max_abs(cov - b) / pk::max_abs(b));
    const double l = p.gen_time();
    worst_col = std::max(worst_col, std::abs(a.col(0).sum() - rho / l) / (std::abs(rho) + p.beta_total()) * l);
    for (int j = 1; j < p.dim(); ++j) worst_col = std::max(worst_col, std::abs(a.col(j).sum()));
  }
  r.check(worst_mean <= 1e-10, fmt("sum r_k d_k = A x + q e0 on 100 random states (worst %.2g)", worst_mean));
  r.check(worst_cov <= 1e-10, fmt("sum r_k d_k d_k^T = B on 100 random states (worst %.2g)", worst_cov));
  r.check(worst_col <= 1e-12, fmt("drift column sums (rho/l, 0, ...) (worst %.2g)", worst_col));

  // One-step MC moments at 1e6 samples.
  {
    const pk::KineticsParameters p({0.1}, {0.05}, 2.5, 2.0 / 3.0,
                                   pk::ReactivityFunction::constant(-1.0 / 3.0),
                                   pk::SourceFunction::constant(200.0));
    const pk::StateVector x(500.0, {200.0});
    const double dt = 1e-4;
    pk::NoiseSource noise(99);
    std::vector<pk::RunningStats> first(2), second(4);
    for (int s = 0; s < 1'000'000; ++s) {
      const pk::DenseVector d = pk::mc_step_fixed(p, x, 0.0, dt, noise).values() - x.values();
      for (int i = 0; i < 2; ++i) {
        first[static_cast<std::size_t>(i)].add(d(i));
        for (int j = 0; j < 2; ++j) second[static_cast<std::size_t>(2 * i + j)].add(d(i) * d(j));
      }
    }
    pk::DenseVector drift = pk::build_drift_matrix(p, 0.0).values * x.values();
    drift(0) += 200.0;
    const auto b = pk::build_diffusion_matrix(p, x, 0.0).values;
    double worst_mean_se = 0.0;
    double worst_cov_se = 0.0;
    for (int i = 0; i < 2; ++i) {
      const auto& f = first[static_cast<std::size_t>(i)];
      worst_mean_se = std::max(worst_mean_se, std::abs(f.mean() - drift(i) * dt) /
                                                  (f.stddev() / std::sqrt(1e6)));
      for (int j = 0; j < 2; ++j) {
        const auto& s = second[static_cast<std::size_t>(2 * i + j)];
        const double expected = b(i, j) * dt + drift(i) * drift(j) * dt * dt;
        worst_cov_se = std::max(worst_cov_se, std::abs(s.mean() - expected) / (s.stddev() / std::sqrt(1e6)));
      }
    }
    r.check(worst_mean_se <= 4.0, fmt("MC one-step mean at 1e6 samples (worst %.2f SE)", worst_mean_se));
    r.check(worst_cov_se <= 4.0, fmt("MC one-step covariance at 1e6 samples (worst %.2f SE)", worst_cov_se));
  }

  // Zero-noise reductions on every preset.
  {
    double worst_em = 0.0;
    double worst_pca = 0.0;
    for (const auto& name : pk::preset_names()) {
      const auto c = pk::preset(name);
      const auto& p = c.parameters;
      pk::SolverOptions opt;
      opt.zero_noise = true;
      pk::NoiseSource noise(1);
      const pk::TimeGrid ge(0.0, 50 * c.steps.em, c.steps.em);
      const auto em = pk::euler_maruyama_solve(p, c.initial_state(), ge, noise, opt);
      pk::DenseVector x = c.initial_state().values();
      for (long i = 0; i < ge.steps(); ++i) {
        pk::DenseVector f = pk::build_drift_matrix(p, ge.node(i)).values * x;
        f(0) += p.source()(ge.node(i));
        x = (x + f * ge.dt()).eval();
        const auto& got = em.states[static_cast<std::size_t>(i + 1)].values();
        worst_em = std::max(worst_em, (got - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
      }
      const pk::TimeGrid gp(0.0, 20 * c.steps.pca, c.steps.pca);
      const auto pca = pk::stochastic_pca_solve(p, c.initial_state(), gp, noise, opt);
      x = c.initial_state().values();
      for (long i = 0; i < gp.steps(); ++i) {
        const double tm = 0.5 * (gp.node(i) + gp.node(i + 1));
        pk::DenseVector y = x;
        y(0) += p.source()(tm) * gp.dt();
        x = pk::testing::series_exponential(pk::build_drift_matrix(p, tm).values * gp.dt()) * y;
        const auto& got = pca.states[static_cast<std::size_t>(i + 1)].values();
        worst_pca = std::max(worst_pca, (got - x).cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff());
      }
    }
    r.check(worst_em <= 1e-12, fmt("zero-noise EM = explicit Euler, all presets (worst %.2g)", worst_em));
    r.check(worst_pca <= 1e-11, fmt("zero-noise PCA = exponential Euler, all presets (worst %.2g)", worst_pca));

    const auto c = pk::preset("table2");
    pk::SolverOptions opt;
    opt.zero_noise = true;
    pk::NoiseSource noise(1);
    const auto grid = c.grid(pk::RunMethod::StochasticPca);
    const auto pca = pk::stochastic_pca_solve(c.parameters, c.initial_state(), grid, noise, opt);
    const auto det = pk::deterministic_solve(c.parameters, c.initial_state(), grid);
    const double d = rel(pca.states.back().n(), det.states.back().n());
    r.check(d <= 1e-11, fmt("zero-noise PCA = deterministic (q = 0, constant rho): rel %.2g", d));
  }

  // Matrix exponential oracles.
  {
    bool ok = pk::matrix_exponential(pk::DenseMatrix::Zero(4, 4)) == pk::DenseMatrix::Identity(4, 4);
    const auto e = pk::matrix_exponential(pk::dense_matrix({{1.0, 0.0}, {0.0, -1.0}}));
    ok = ok && rel(e(0, 0), std::exp(1.0)) < 1e-15 && rel(e(1, 1), std::exp(-1.0)) < 1e-15;
    const auto nil = pk::matrix_exponential(pk::dense_matrix({{0.0, 1.0}, {0.0, 0.0}}));
    ok = ok && pk::max_abs(nil - pk::dense_matrix({{1.0, 1.0}, {0.0, 1.0}})) < 1e-15;
    r.check(ok, "exp: zero, diagonal, nilpotent");
    double worst_inv = 0.0;
    double worst_semi = 0.0;
    double worst_series = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int d = 1 + trial % 8;
      pk::DenseMatrix m(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = (2.0 * u(rng) - 1.0) * 5.0 / d;
      const auto em = pk::matrix_exponential(m);
      const auto emi = pk::matrix_exponential(-m);
      const double cond = pk::max_abs(em) * pk::max_abs(emi);
      worst_inv = std::max(worst_inv, pk::max_abs(em * emi - pk::DenseMatrix::Identity(d, d)) / cond);
      const double s = 2.0 * u(rng);
      const double t = 2.0 * u(rng);
      const auto lhs = pk::matrix_exponential((s + t) * m);
      const auto rhs = pk::matrix_exponential(s * m) * pk::matrix_exponential(t * m);
      worst_semi = std::max(worst_semi, pk::max_abs(lhs - rhs) / pk::max_abs(lhs));
      if (trial < 40) {
        // Scale to infinity norm 50 and compare entry by entry.
        double norm = 0.0;
        for (int i = 0; i < d; ++i) norm = std::max(norm, m.row(i).cwiseAbs().sum());
        const pk::DenseMatrix big = m * (50.0 / norm);
        const auto ref = pk::testing::series_exponential(big);
        const auto got = pk::matrix_exponential(big);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            worst_series = std::max(worst_series, std::abs(got(i, j) - ref(i, j)) / std::abs(ref(i, j)));
      }
    }
    r.check(worst_inv <= 1e-9, fmt("exp(M) exp(-M) = I, d <= 8 (worst %.2g, cond-scaled)", worst_inv));
    r.check(worst_semi <= 1e-9, fmt("exp((s+t)M) = exp(sM) exp(tM) (worst %.2g)", worst_semi));
    r.check(worst_series <= 1e-12,
            fmt("exp vs 50-digit series, d <= 8, |M| = 50 (worst %.2g componentwise)", worst_series));
  }

  // psd_sqrt reconstruction on the one-group diffusion matrix.
  {
    const pk::KineticsParameters p({0.1}, {0.05}, 2.5, 2.0 / 3.0,
                                   pk::ReactivityFunction::constant(-1.0 / 3.0),
                                   pk::SourceFunction::constant(200.0));
    const auto b = pk::build_diffusion_matrix(p, pk::StateVector(400.0, {300.0}), 0.0).values;
    const auto s = pk::psd_sqrt(b);
    const double d = pk::max_abs(s.root * s.root - b) / pk::max_abs(b);
    r.check(d <= 1e-9 && s.root == s.root.transpose(),
            fmt("psd_sqrt(B) squared reproduces B at (400, 300): rel %.2g", d));
  }

  // Conservation with rho = 0, q = 0 over unit time.
  {
    const pk::KineticsParameters p({0.0127, 0.0317, 0.115, 0.311, 1.4, 3.87},
                                   {0.000266, 0.001491, 0.001316, 0.002849, 0.000896, 0.000182},
                                   2.5, 2e-5, pk::ReactivityFunction::constant(0.0),
                                   pk::SourceFunction::constant(0.0));
    const auto x0 = pk::equilibrium_state(p, 0.0, pk::SourceFreeEquilibrium{100.0});
    pk::DenseVector perturbed = x0.values();
    perturbed(0) *= 3.0;
    const auto traj = pk::deterministic_solve(p, pk::StateVector(perturbed), pk::TimeGrid(0.0, 1.0, 0.01));
    const double total0 = perturbed.sum();
    double worst = 0.0;
    for (const auto& x : traj.states) worst = std::max(worst, rel(x.n() + x.precursor_sum(), total0));
    r.check(worst <= 1e-10, fmt("n + sum c conserved, rho = 0, q = 0, t in [0, 1] (worst %.2g)", worst));
  }

  const double t = seconds_since(start);
  r.check(t < 60.0, fmt("runtime %.1f s (< 60 s)", t));
  return r;
}

std::string summary_bytes(const pk::EnsembleSummary& s) {
  std::ostringstream out;
  pk::write_summary_csv(out, s);
  out << pk::summary_json(s, "check");
  return out.str();
}

Report reproducibility() {
  Report r;
  const unsigned hw = std::max(2u, std::thread::hardware_concurrency());
  auto run = [](const pk::ScenarioConfig& c, pk::RunMethod m, long samples, std::uint64_t seed,
                unsigned threads) {
    auto cfg = c.ensemble_config(m);
    cfg.min_samples = cfg.max_samples = samples;
    cfg.master_seed = seed;
    cfg.threads = threads;
    cfg.batch_size = 64;
    return summary_bytes(pk::run_ensemble(c.parameters, c.initial_state(), c.grid(m), cfg));
  };
  const auto c1 = pk::preset("table1");
  for (auto m : {pk::RunMethod::EulerMaruyama, pk::RunMethod::StochasticPca, pk::RunMethod::EventMc}) {
    r.check(run(c1, m, 300, 7, 1) == run(c1, m, 300, 7, hw),
            "table1 " + pk::to_string(m) + " ensemble: summary CSV + JSON identical (1 vs " +
                std::to_string(hw) + " threads)");
  }
  const auto c3 = pk::preset("table3");
  r.check(run(c3, pk::RunMethod::EventMc, 5000, 42, 1) == run(c3, pk::RunMethod::EventMc, 5000, 42, hw),
          "table3 mc ensemble, 5000 paths, seed 42: identical");

  // Single stochastic paths, as written by `solve`.
  for (auto m : {pk::RunMethod::EulerMaruyama, pk::RunMethod::StochasticPca}) {
    auto once = [&] {
      pk::NoiseSource noise(11);
      pk::SolverOptions opt;
      opt.record_every = c1.record_every(m);
      const auto traj = m == pk::RunMethod::EulerMaruyama
                            ? pk::euler_maruyama_solve(c1.parameters, c1.initial_state(), c1.grid(m), noise, opt)
                            : pk::stochastic_pca_solve(c1.parameters, c1.initial_state(), c1.grid(m), noise, opt);
      std::ostringstream out;
      pk::write_trajectory_csv(out, traj);
      return out.str();
    };
    r.check(once() == once(), "table1 " + pk::to_string(m) + " single path: trajectory CSV identical");
  }
  {
    auto once = [&] {
      pk::NoiseSource noise(11);
      pk::McConfig mc;
      mc.record_times = pk::record_times(c1.grid(pk::RunMethod::EventMc), 1);
      const auto traj = pk::mc_trajectory(c1.parameters, c1.initial_state(), c1.horizon, mc, noise);
      std::ostringstream out;
      pk::write_trajectory_csv(out, traj);
      return out.str();
    };
    r.check(once() == once(), "table1 mc single path: trajectory CSV identical");
  }
  {
    pk::ReproduceOptions opt;
    opt.samples = 200;
    opt.seed = 5;
    auto once = [&](unsigned threads) {
      opt.threads = threads;
      std::ostringstream out;
      pk::write_result_table_csv(out, pk::reproduce_table(3, opt));
      return out.str();
    };
    r.check(once(1) == once(hw), "reproduce table 3, 200 paths: result CSV identical");
  }
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<Report()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Deterministic Table-1 reproduction (0.1%, < 1 s)", deterministic_table1},
      {2, "Deterministic Table-2/3 reproduction (0.5%, < 5 s)", deterministic_table23},
      {3, "Stochastic means Table 1 (1e4 paths; E 5%, sigma 25%, < 2 min)", stochastic_table1},
      {4, "Stochastic means Table 3 (10%) and Table 2 PCA/EM (15%), 2e3 paths", stochastic_table23},
      {5, "Linear reactivity: monotone means, PCA vs EM within 3 SE", linear_reactivity},
      {6, "Property suite (< 1 min)", property_suite},
      {7, "Reproducibility: byte-identical reruns", reproducibility},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Report r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.check(false, std::string("exception: ") + e.what());
    }
    std::printf("[%s] criterion %d: %s  (%.1f s)\n", r.pass ? "PASS" : "FAIL", c.id, c.title,
                seconds_since(start));
    for (const auto& line : r.lines) std::printf("        %s\n", line.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
