#include "hydrob/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hydrob {

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Completed: return "completed";
    case RunStatus::MonitorViolation: return "monitor_violation";
    case RunStatus::NumericalBlowup: return "numerical_blowup";
  }
  return "unknown";
}

int step_count(double t_final, double dt) {
  return static_cast<int>(std::llround(t_final / dt));
}

namespace {

// div_x of a d_h-component horizontal field, spectrally.
SpectralField horizontal_divergence(const SpectralField& u) {
  auto div = derivative(u.slice(0, 1), Axis::X1, 1);
  if (u.grid().horizontal_dims() == 2) div += derivative(u.slice(1, 1), Axis::X2, 1);
  return div;
}

// -(u . grad_x + v d_y) u, products formed in physical space and dealiased.
SpectralField advection(const SpectralField& u, const SpectralField& v) {
  const Grid& grid = u.grid();
  const int dh = grid.horizontal_dims();
  const auto up = to_physical(u);
  const auto vp = to_physical(v);
  const auto ux1 = to_physical(derivative(u, Axis::X1, 1));
  const auto uy = to_physical(derivative(u, Axis::Y, 1));
  std::optional<PhysicalField> ux2;
  if (dh == 2) ux2 = to_physical(derivative(u, Axis::X2, 1));

  PhysicalField out(grid, dh);
  const std::size_t n = grid.size();
  for (int c = 0; c < dh; ++c) {
    auto dst = out.component(c);
    for (std::size_t i = 0; i < n; ++i) {
      double a = up.component(0)[i] * ux1.component(c)[i] + vp.component(0)[i] * uy.component(c)[i];
      if (dh == 2) a += up.component(1)[i] * ux2->component(c)[i];
      dst[i] = -a;
    }
  }
  auto f = to_spectral(out);
  dealias_in_place(f);
  return f;
}

// Removes from the k = 0 slice of `f` whatever would change <u> (d_h = 1) or
// div_x <u> (d_h = 2). The xi = 0, k = 0 mode is zeroed in both cases.
void project_vertical_mean(SpectralField& f) {
  const auto& t = f.grid().tables();
  const int dh = f.grid().horizontal_dims();
  const std::size_t n = f.modes();
  for (std::size_t m = 0; m < n; ++m) {
    if (t.ky[m] != 0.0) continue;
    if (dh == 1) {
      f.at(0, m) = 0.0;
      continue;
    }
    const double k1 = t.xi1[m];
    const double k2 = t.xi2[m];
    const double kk = k1 * k1 + k2 * k2;
    if (kk == 0.0) {
      f.at(0, m) = 0.0;
      f.at(1, m) = 0.0;
      continue;
    }
    const Complex proj = (k1 * f.at(0, m) + k2 * f.at(1, m)) / kk;
    f.at(0, m) -= k1 * proj;
    f.at(1, m) -= k2 * proj;
  }
}

void check_finite(const SpectralField& u, double t, double ceiling, double norm) {
  if (!std::isfinite(norm) || norm > ceiling) {
    std::ostringstream msg;
    msg << "limit solver blow-up at t=" << t << ": ||u||_L2=" << norm
        << " (ceiling " << ceiling << "), max|coeff|=" << max_abs(u);
    throw SolverBlowupError(msg.str());
  }
}

}  // namespace

SpectralField recover_v(const SpectralField& u) {
  const Grid& grid = u.grid();
  if (u.ncomp() != grid.horizontal_dims())
    throw GridMismatchError("recover_v: u must have d_h components");
  const auto div = horizontal_divergence(u);
  const auto& t = grid.tables();
  const double scale = std::max(max_abs(u), 1e-300);
  SpectralField v(grid, 1);
  for (std::size_t m = 0; m < u.modes(); ++m) {
    const double k = t.ky_odd[m];
    if (t.ky[m] == 0.0) {
      if (std::abs(div.at(0, m)) > 1e-12 * scale * (1.0 + t.xi_abs[m]))
        throw std::invalid_argument(
            "recover_v: div_x of the vertical mean of u is nonzero");
      continue;
    }
    if (k == 0.0) continue;  // Nyquist row carries no resolved content
    v.at(0, m) = -div.at(0, m) / Complex(0.0, k);
  }
  return v;
}

SpectralField recover_pressure(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u, v, "recover_pressure");
  const Grid& grid = u.grid();
  const int dh = grid.horizontal_dims();
  const auto& t = grid.tables();
  const auto up = to_physical(u);
  SpectralField p(grid, 1);

  if (dh == 1) {
    const auto vp = to_physical(v);
    PhysicalField uu(grid, 1);
    PhysicalField vu(grid, 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double ui = up.component(0)[i];
      uu.component(0)[i] = ui * ui;
      vu.component(0)[i] = vp.component(0)[i] * ui;
    }
    auto flux = derivative(dealias(to_spectral(uu)), Axis::X1, 1) +
                derivative(dealias(to_spectral(vu)), Axis::Y, 1);
    for (std::size_t m = 0; m < u.modes(); ++m) {
      if (t.ky[m] != 0.0 || t.xi1_odd[m] == 0.0) continue;
      p.at(0, m) = -flux.at(0, m) / Complex(0.0, t.xi1_odd[m]);
    }
    return p;
  }

  // d_h = 2: -|xi|^2 p = xi_i xi_j <u_i u_j>.
  PhysicalField prod(grid, 3);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = up.component(0)[i];
    const double b = up.component(1)[i];
    prod.component(0)[i] = a * a;
    prod.component(1)[i] = a * b;
    prod.component(2)[i] = b * b;
  }
  const auto ps = dealias(to_spectral(prod));
  for (std::size_t m = 0; m < u.modes(); ++m) {
    if (t.ky[m] != 0.0) continue;
    const double k1 = t.xi1[m];
    const double k2 = t.xi2[m];
    const double kk = k1 * k1 + k2 * k2;
    if (kk == 0.0) continue;
    const Complex q = k1 * k1 * ps.at(0, m) + 2.0 * k1 * k2 * ps.at(1, m) + k2 * k2 * ps.at(2, m);
    p.at(0, m) = -q / kk;
  }
  return p;
}

SpectralField rhs_explicit(const LimitState& state, const MaterialParams& material) {
  const SpectralField& u = state.u;
  const auto v = recover_v(u);
  auto rhs = advection(u, v);

  const auto uy = derivative(u, Axis::Y, 1);
  const auto uyy = derivative(uy, Axis::Y, 1);
  rhs.axpy(1.0 - material.theta(), nonlinear_flux(uy, uyy, material.sigma()));

  const auto p = recover_pressure(u, v);
  {
    SpectralField grad(u.grid(), u.ncomp());
    grad.assign(0, derivative(p, Axis::X1, 1));
    if (u.ncomp() == 2) grad.assign(1, derivative(p, Axis::X2, 1));
    rhs -= grad;
  }
  project_vertical_mean(rhs);
  dealias_in_place(rhs);
  return rhs;
}

LimitState step(const LimitState& state, double dt, const MaterialParams& material,
                const BandParams& band) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  RadiusTracker tracker{band.radius_a, band.lambda, state.eta1, state.eta2};
  tracker = eta_advance(tracker, state.u, dt, band.s1, band.s2);

  auto next = state.u;
  next.axpy(dt, rhs_explicit(state, material));
  const auto& t = next.grid().tables();
  for (int c = 0; c < next.ncomp(); ++c) {
    auto z = next.component(c);
    for (std::size_t m = 0; m < next.modes(); ++m) z[m] /= 1.0 + dt * t.ky[m] * t.ky[m];
  }
  if (next.grid().horizontal_dims() == 1) next = remove_vertical_mean(next);

  return LimitState{std::move(next), state.t + dt, tracker.eta1, tracker.eta2};
}

double incompressibility_residual(const SpectralField& u, const SpectralField& v) {
  auto div = horizontal_divergence(u);
  div += derivative(v, Axis::Y, 1);
  return anisotropic_norm(div, NormSpec{});
}

// ---------------------------------------------------------------------------

std::vector<double> LimitRow::values() const {
  return {t,          u_norm,       u_psi_norm,   uy_psi_norm,
          uyy_psi_norm, eta1,       eta2,         psi_radius,
          energy_ratio, bootstrap_eta_margin, bootstrap_smallness_margin,
          bootstrap_ok, poincare_margin, vertical_mean_max, divergence_residual,
          tau_norm,   pressure_norm};
}

const std::vector<std::string>& limit_columns() {
  static const std::vector<std::string> cols = {
      "t",           "u_norm",       "u_psi_norm",  "uy_psi_norm",
      "uyy_psi_norm", "eta1",        "eta2",        "psi_radius",
      "energy_ratio", "bootstrap_eta_margin", "bootstrap_smallness_margin",
      "bootstrap_ok", "poincare_margin", "vertical_mean_max", "divergence_residual",
      "tau_norm",    "pressure_norm"};
  return cols;
}

LimitRun run_limit(const RunConfig& config, const std::optional<SpectralField>& u0,
                   const LimitRunOptions& options) {
  const Grid grid = config.make_grid();
  const auto material = config.material();
  const auto& mon = config.monitors;
  const BandParams band{mon.radius_a, mon.lambda, mon.s1, mon.s2};
  const double dt = config.stepping.dt;
  const int nsteps = step_count(config.stepping.t_final, dt);
  const int every = config.stepping.snapshot_every;

  LimitState state{u0 ? *u0 : default_initial_velocity(grid, config.params.delta)};
  if (!(state.u.grid() == grid) || state.u.ncomp() != grid.horizontal_dims())
    throw GridMismatchError("run_limit: initial velocity does not match the grid");
  if (grid.horizontal_dims() == 1 &&
      max_abs(vertical_mean(state.u)) > 1e-12 * std::max(max_abs(state.u), 1e-300))
    throw std::invalid_argument("run_limit: initial velocity has a nonzero vertical mean");

  LimitRun run;
  EnergyMonitor energy(state.u, mon.kappa, mon.radius_a, mon.s1, mon.s2);
  double boot_sup = 0.0;
  double prev_eta = 0.0;
  run.min_psi_radius = mon.radius_a;

  auto record = [&](const LimitState& s, bool emit) {
    const RadiusTracker tracker{mon.radius_a, mon.lambda, s.eta1, s.eta2};
    const double ratio = energy.push(s.t, s.u);
    run.max_energy_ratio = std::max(run.max_energy_ratio, ratio);
    run.min_psi_radius = std::min(run.min_psi_radius, tracker.psi_radius());
    if (tracker.eta() < prev_eta) run.eta_monotone = false;
    prev_eta = tracker.eta();

    const auto flags = bootstrap_check(tracker, s.u, mon.s1, mon.s2, mon.eps1,
                                       mon.bootstrap_c1, boot_sup);
    boot_sup = flags.sup_sq;
    if (!flags.ok() && !run.bootstrap_violation_time) run.bootstrap_violation_time = s.t;

    const double vmean = max_abs(vertical_mean(s.u));
    run.max_vertical_mean = std::max(run.max_vertical_mean, vmean);
    if (!emit) return;

    const auto v = recover_v(s.u);
    const double div = incompressibility_residual(s.u, v);
    run.max_divergence = std::max(run.max_divergence, div);

    const double r = std::max(tracker.psi_radius(), 0.0);
    const NormSpec plain{mon.s1, mon.s2, 0.0};
    const NormSpec psi{mon.s1, mon.s2, r};
    const auto uy = derivative(s.u, Axis::Y, 1);
    LimitRow row;
    row.t = s.t;
    row.u_norm = anisotropic_norm(s.u, plain);
    row.u_psi_norm = anisotropic_norm(s.u, psi);
    row.uy_psi_norm = anisotropic_norm(uy, psi);
    row.uyy_psi_norm = anisotropic_norm(derivative(uy, Axis::Y, 1), psi);
    row.eta1 = s.eta1;
    row.eta2 = s.eta2;
    row.psi_radius = tracker.psi_radius();
    row.energy_ratio = ratio;
    row.bootstrap_eta_margin = flags.eta_margin;
    row.bootstrap_smallness_margin = flags.smallness_margin;
    row.bootstrap_ok = flags.ok() ? 1.0 : 0.0;
    row.poincare_margin = grid.horizontal_dims() == 1
                              ? poincare_check(s.u, mon.kappa, psi)
                              : poincare_check(remove_vertical_mean(s.u), mon.kappa, psi);
    row.vertical_mean_max = vmean;
    row.divergence_residual = div;
    row.tau_norm = anisotropic_norm(closure_stress_field(s.u, material), plain);
    row.pressure_norm = anisotropic_norm(recover_pressure(s.u, v), plain);
    run.rows.push_back(row);
    if (options.keep_snapshots) run.snapshots.push_back({s.t, s.u});
  };

  try {
    record(state, true);
    for (int n = 1; n <= nsteps; ++n) {
      state = step(state, dt, material, band);
      state.t = n * dt;
      check_finite(state.u, state.t, mon.blowup_ceiling,
                   anisotropic_norm(state.u, NormSpec{}));
      ++run.steps;
      record(state, n % every == 0 || n == nsteps);
      if (state.eta1 + state.eta2 >= 0.0 &&
          mon.radius_a - mon.lambda * (state.eta1 + state.eta2) <= 0.0) {
        run.status = RunStatus::MonitorViolation;
        run.failure = "analytic band exhausted at t=" + std::to_string(state.t);
        if (!run.bootstrap_violation_time) run.bootstrap_violation_time = state.t;
        break;
      }
    }
  } catch (const SolverBlowupError& e) {
    run.status = RunStatus::NumericalBlowup;
    run.failure = e.what();
  }
  if (run.status == RunStatus::Completed && run.bootstrap_violation_time)
    run.status = RunStatus::MonitorViolation;
  if (run.status == RunStatus::MonitorViolation && run.failure.empty())
    run.failure = "bootstrap condition violated at t=" +
                  std::to_string(*run.bootstrap_violation_time);
  run.final_state = std::move(state);
  return run;
}

}  // namespace hydrob
