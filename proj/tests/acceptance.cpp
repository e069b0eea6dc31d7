// Acceptance criteria for the hydrostatic Oldroyd-B solvers. One line per
// criterion; the exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "hydrob/harness.hpp"

using namespace hydrob;

namespace {

int failures = 0;

void report(int id, const char* what, bool ok, const std::string& detail) {
  std::printf("%s %2d %-34s %s\n", ok ? "PASS" : "FAIL", id, what, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void closure_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> b(-1.0, 1.0), rad(0.0, 2.0),
      ang(0.0, 2 * std::numbers::pi);
  const double thetas[] = {0.1, 0.5, 0.9};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    MaterialParams p(thetas[i % 3], b(rng));
    const double r = rad(rng), a = ang(rng);
    const ShearPair s{r * std::cos(a), r * std::sin(a)};
    const auto x = closure_stress(s, p).as_array();
    const auto y = algebraic_oracle(s, p).as_array();
    for (int c = 0; c < 6; ++c) worst = std::max(worst, std::abs(x[c] - y[c]));
  }
  const double secs = seconds_since(t0);
  report(1, "closure/oracle equivalence", worst <= 1e-10 && secs < 1.0,
         fmt("max|diff| = %.3e (tol 1e-10), %.3f s (limit 1 s)", worst, secs));
}

void linear_decay() {
  RunConfig c;
  c.stepping.t_final = 1.0;
  const Grid g = c.make_grid();
  const double amp = 1e-4;
  const auto u0 = to_spectral(sample(g, [&](double, double, double y) { return amp * std::sin(y); }));
  const auto run = run_limit(c, u0);
  const auto& t = g.tables();
  double ratio = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m)
    if (t.ky[m] == 1.0 && t.xi_abs[m] == 0.0)
      ratio = std::abs(run.final_state->u.at(0, m)) / std::abs(u0.at(0, m));
  const double rel = std::abs(ratio / std::exp(-1.0) - 1.0);
  report(5, "linearized decay", run.status == RunStatus::Completed && rel <= 0.01,
         fmt("A(1)/A(0) = %.6f vs e^-1 = %.6f, rel %.2e (tol 1e-2)", ratio, std::exp(-1.0), rel));
}

void relaxation() {
  RunConfig c;
  const Grid g = c.make_grid();
  double worst = 0.0;
  for (double eps : {0.1, 0.01})
    for (int steps : {10, 100, 1000})
      worst = std::max(worst, relaxation_decay_error(g, eps, 1.0, steps, c.material(), c.params.seed));
  report(7, "stress relaxation exactness", worst <= 1e-8,
         fmt("max rel err = %.3e over eps {0.1,0.01}, 10..1000 steps (tol 1e-8)", worst));
}

void lemmas() {
  RunConfig c;
  const auto s = lemma_suite(c);
  const bool ok = s.magnitude.samples == 100 && s.magnitude.violations == 0 &&
                  s.product_drift <= 0.2 && s.composition_small_error <= 0.1;
  report(8, "lemma suites", ok,
         fmt("magnitude %d/%d violations (tol 0); product max %.4f@N vs %.4f@2N, drift %.3f "
             "(tol 0.2); composition ratio/sigma - 1 = %.2e (tol 0.1)",
             s.magnitude.violations, s.magnitude.samples, s.product_coarse.max_ratio,
             s.product_fine.max_ratio, s.product_drift, s.composition_small_error));
}

void poincare() {
  RunConfig c;
  const auto& m = c.monitors;
  const auto rep = poincare_suite(c.make_grid(), 200, 0.25, m.s1, m.s2, m.radius_a, c.params.seed);
  report(4, "Poincare property", rep.violations == 0 && rep.samples == 200,
         fmt("%d/200 negative margins, min margin %.3e (tol 0)", rep.violations, rep.max_ratio));
}

void self_conv() {
  RunConfig c;
  const auto lim = self_convergence(c, c.stepping.dt_list, Solver::Limit);
  const auto eps = self_convergence(c, c.stepping.dt_list, Solver::Eps);
  auto ok = [](const SelfConvergence& s) {
    return s.complete && !s.degenerate && s.order >= 0.7 && s.order <= 1.3;
  };
  report(9, "temporal self-convergence", ok(lim) && ok(eps),
         fmt("order limit %.3f, eps %.3f (band [0.7, 1.3])", lim.order, eps.order));
}

}  // namespace

int main() {
  closure_oracle();

  RunConfig c;  // defaults are the criterion-2 configuration
  c.stepping.workers = static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 4u));
  const auto t0 = std::chrono::steady_clock::now();
  const auto study = convergence_study(c, c.params.eps_list);
  const double secs = seconds_since(t0);

  std::string errs;
  for (const auto& p : study.points) errs += fmt(" %.3e", p.error);
  report(2, "hydrostatic convergence rate",
         study.complete && !study.degenerate && study.errors_decreasing &&
             study.fit.slope >= 0.8 && study.fit.slope <= 1.2,
         fmt("slope %.3f (band [0.8, 1.2]), errors%s, decreasing %s, velocity slope %.3f, "
             "stress slope %.3f, %.0f s",
             study.fit.slope, errs.c_str(), study.errors_decreasing ? "yes" : "no",
             study.velocity_fit.slope, study.stress_fit.slope, secs));

  report(3, "energy inequality monitor",
         study.limit_status == RunStatus::Completed && study.limit_energy_ratio <= 100.0,
         fmt("max ratio %.4f (bound 100)", study.limit_energy_ratio));

  poincare();
  linear_decay();

  double eps_div = 0.0;
  for (const auto& p : study.points) eps_div = std::max(eps_div, p.max_divergence);
  report(6, "incompressibility",
         study.complete && eps_div <= 1e-10 && study.limit_max_divergence <= 1e-12,
         fmt("eps max %.3e (tol 1e-10), limit max %.3e (tol 1e-12)", eps_div,
             study.limit_max_divergence));

  relaxation();
  lemmas();
  self_conv();

  bool zeta_monotone = true;
  for (const auto& p : study.points) zeta_monotone = zeta_monotone && p.zeta_monotone;
  const double half_a = 0.5 * c.monitors.radius_a;
  report(10, "monotone diagnostics",
         study.limit_eta_monotone && zeta_monotone && study.limit_min_psi_radius >= half_a,
         fmt("eta nondecreasing %s, zeta nondecreasing %s, min Psi radius %.5f (>= %.3f)",
             study.limit_eta_monotone ? "yes" : "no", zeta_monotone ? "yes" : "no",
             study.limit_min_psi_radius, half_a));

  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
