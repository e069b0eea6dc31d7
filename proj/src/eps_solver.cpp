#include "hydrob/eps_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hydrob {

namespace {

// Physical-space view of the state and the first derivatives the tendencies
// need. Second horizontal direction entries point at a zero buffer when d_h = 1.
struct PhysicalState {
  explicit PhysicalState(const EpsState& s)
      : grid(s.u.grid()),
        dh(grid.horizontal_dims()),
        zeros(grid.size(), 0.0),
        u(to_physical(s.u)),
        ux1(to_physical(derivative(s.u, Axis::X1, 1))),
        uy(to_physical(derivative(s.u, Axis::Y, 1))),
        v(to_physical(s.v)),
        vx1(to_physical(derivative(s.v, Axis::X1, 1))),
        vy(to_physical(derivative(s.v, Axis::Y, 1))) {
    if (dh == 2) {
      ux2 = to_physical(derivative(s.u, Axis::X2, 1));
      vx2 = to_physical(derivative(s.v, Axis::X2, 1));
    }
  }

  std::span<const double> u_(int c) const { return c < dh ? u.component(c) : zeros; }
  std::span<const double> ux1_(int c) const { return c < dh ? ux1.component(c) : zeros; }
  std::span<const double> ux2_(int c) const {
    return dh == 2 ? ux2->component(c) : std::span<const double>(zeros);
  }
  std::span<const double> uy_(int c) const { return c < dh ? uy.component(c) : zeros; }
  std::span<const double> vx2_() const {
    return dh == 2 ? vx2->component(0) : std::span<const double>(zeros);
  }

  const Grid& grid;
  int dh;
  std::vector<double> zeros;
  PhysicalField u, ux1, uy, v, vx1, vy;
  std::optional<PhysicalField> ux2, vx2;
};

// (u . grad_x + v d_y) f for every component of f, in physical space.
PhysicalField transport(const PhysicalState& ps, const SpectralField& f) {
  const auto fx1 = to_physical(derivative(f, Axis::X1, 1));
  const auto fy = to_physical(derivative(f, Axis::Y, 1));
  std::optional<PhysicalField> fx2;
  if (ps.dh == 2) fx2 = to_physical(derivative(f, Axis::X2, 1));
  PhysicalField out(f.grid(), f.ncomp());
  const auto u1 = ps.u_(0);
  const auto u2 = ps.u_(1);
  const auto v = ps.v.component(0);
  for (int c = 0; c < f.ncomp(); ++c) {
    auto dst = out.component(c);
    const auto a = fx1.component(c);
    const auto b = fy.component(c);
    for (std::size_t i = 0; i < dst.size(); ++i) {
      double acc = u1[i] * a[i] + v[i] * b[i];
      if (fx2) acc += u2[i] * fx2->component(c)[i];
      dst[i] = acc;
    }
  }
  return out;
}

SpectralField spectral_dealiased(const PhysicalField& p) {
  auto f = to_spectral(p);
  dealias_in_place(f);
  return f;
}

// theta * (eps^2 |xi|^2 + k^2) per mode.
double viscous_symbol(const detail::GridTables& t, std::size_t m, double eps, double theta) {
  const double xx = t.xi1[m] * t.xi1[m] + t.xi2[m] * t.xi2[m];
  return theta * (eps * eps * xx + t.ky[m] * t.ky[m]);
}

void check_state(const EpsState& s, double ceiling) {
  const double nu = anisotropic_norm(s.u, NormSpec{});
  const double nv = anisotropic_norm(s.v, NormSpec{});
  const double nt = anisotropic_norm(s.tau, NormSpec{});
  const double worst = std::max({nu, nv, nt});
  if (!std::isfinite(nu + nv + nt) || worst > ceiling) {
    std::ostringstream msg;
    msg << "eps solver blow-up at t=" << s.t << " (eps=" << s.eps << "): ||u||=" << nu
        << " ||v||=" << nv << " ||tau||=" << nt << " (ceiling " << ceiling << ")";
    throw SolverBlowupError(msg.str());
  }
}

}  // namespace

EpsState initial_eps_state(const SpectralField& u0, double eps, const MaterialParams& material) {
  if (!(eps > 0.0)) throw std::invalid_argument("initial_eps_state: eps must be positive");
  return EpsState{u0, recover_v(u0), initial_stress(u0, material), 0.0, eps};
}

std::pair<SpectralField, SpectralField> velocity_rhs(const EpsState& s,
                                                     const MaterialParams& material,
                                                     bool include_viscous) {
  const Grid& grid = s.u.grid();
  const int dh = grid.horizontal_dims();
  const double eps = s.eps;
  const PhysicalState ps(s);

  auto fu = spectral_dealiased(transport(ps, s.u));
  fu *= -1.0;
  auto fv = spectral_dealiased(transport(ps, s.v));
  fv *= -1.0;

  auto tc = [&](int c) { return s.tau.slice(c, 1); };
  auto dx1 = [&](int c) { return derivative(tc(c), Axis::X1, 1); };
  auto dx2 = [&](int c) { return derivative(tc(c), Axis::X2, 1); };
  auto dy = [&](int c) { return derivative(tc(c), Axis::Y, 1); };

  // eps d1 t11 + eps d2 t12 + d_y t13, and the same for the second row.
  auto row1 = eps * dx1(kT11) + dy(kT13);
  if (dh == 2) row1.axpy(eps, dx2(kT12));
  SpectralField force(grid, dh);
  force.assign(0, row1);
  if (dh == 2) {
    auto row2 = eps * dx1(kT12) + eps * dx2(kT22) + dy(kT23);
    force.assign(1, row2);
  }
  fu += force;

  auto row3 = eps * dx1(kT13) + dy(kT33);
  if (dh == 2) row3.axpy(eps, dx2(kT23));
  fv.axpy(1.0 / eps, row3);

  if (include_viscous) {
    const auto& t = grid.tables();
    for (std::size_t m = 0; m < s.u.modes(); ++m) {
      const double sym = viscous_symbol(t, m, eps, material.theta());
      for (int c = 0; c < dh; ++c) fu.at(c, m) -= sym * s.u.at(c, m);
      fv.at(0, m) -= sym * s.v.at(0, m);
    }
  }
  dealias_in_place(fu);
  dealias_in_place(fv);
  return {std::move(fu), std::move(fv)};
}

std::pair<SpectralField, SpectralField> anisotropic_leray(const SpectralField& fu,
                                                          const SpectralField& fv, double eps,
                                                          SpectralField* pressure) {
  if (!(eps > 0.0)) throw std::invalid_argument("anisotropic_leray: eps must be positive");
  require_same_grid(fu, fv, "anisotropic_leray");
  const Grid& grid = fu.grid();
  const int dh = grid.horizontal_dims();
  if (fu.ncomp() != dh || fv.ncomp() != 1)
    throw GridMismatchError("anisotropic_leray: expected d_h + 1 velocity components");
  const auto& t = grid.tables();
  const double inv_e2 = 1.0 / (eps * eps);
  const Complex I(0.0, 1.0);

  auto pu = fu;
  auto pv = fv;
  SpectralField p(grid, 1);
  for (std::size_t m = 0; m < fu.modes(); ++m) {
    const double k1 = t.xi1[m];
    const double k2 = dh == 2 ? t.xi2[m] : 0.0;
    const double k = t.ky[m];
    const double denom = k1 * k1 + k2 * k2 + k * k * inv_e2;
    if (denom == 0.0) continue;
    Complex div = I * k1 * fu.at(0, m) + I * k * fv.at(0, m);
    if (dh == 2) div += I * k2 * fu.at(1, m);
    const Complex pm = -div / denom;
    p.at(0, m) = pm;
    pu.at(0, m) -= I * k1 * pm;
    if (dh == 2) pu.at(1, m) -= I * k2 * pm;
    pv.at(0, m) -= I * k * inv_e2 * pm;
  }
  if (pressure) *pressure = std::move(p);
  return {std::move(pu), std::move(pv)};
}

SpectralField stress_rhs(const EpsState& s, const MaterialParams& material) {
  const Grid& grid = s.u.grid();
  if (s.tau.ncomp() != kStressCount)
    throw GridMismatchError("stress_rhs: tau must have six components");
  const double eps = s.eps;
  const double e2 = eps * eps;
  const double b = material.b();
  const double th = 1.0 - material.theta();
  const PhysicalState ps(s);
  const auto tau = to_physical(s.tau);
  const auto adv = transport(ps, s.tau);

  const auto a1 = ps.ux1_(0), a21 = ps.ux1_(1);
  const auto a12 = ps.ux2_(0), a2 = ps.ux2_(1);
  const auto uy1 = ps.uy_(0), uy2 = ps.uy_(1);
  const auto vx1 = ps.vx1.component(0), vx2 = ps.vx2_(), vy = ps.vy.component(0);

  PhysicalField g(grid, kStressCount);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t11 = tau.component(kT11)[i], t22 = tau.component(kT22)[i];
    const double t33 = tau.component(kT33)[i], t12 = tau.component(kT12)[i];
    const double t13 = tau.component(kT13)[i], t23 = tau.component(kT23)[i];
    const double sm1 = uy1[i] - e2 * vx1[i], sp1 = uy1[i] + e2 * vx1[i];
    const double sm2 = uy2[i] - e2 * vx2[i], sp2 = uy2[i] + e2 * vx2[i];
    const double w = a21[i] - a12[i];
    const double d12 = a21[i] + a12[i];

    g.component(kT11)[i] = 2.0 * th * eps * a1[i] - eps * adv.component(kT11)[i] -
                           eps * t12 * w + t13 * sm1 -
                           b * (2.0 * eps * t11 * a1[i] + eps * t12 * d12 + t13 * sp1);
    g.component(kT22)[i] = 2.0 * th * eps * a2[i] - eps * adv.component(kT22)[i] +
                           eps * t12 * w + t23 * sm2 -
                           b * (eps * t12 * d12 + 2.0 * eps * t22 * a2[i] + t23 * sp2);
    g.component(kT33)[i] = 2.0 * th * eps * vy[i] - eps * adv.component(kT33)[i] -
                           t13 * sm1 - t23 * sm2 -
                           b * (t13 * sp1 + t23 * sp2 + 2.0 * eps * t33 * vy[i]);
    g.component(kT12)[i] =
        th * eps * d12 - eps * adv.component(kT12)[i] -
        0.5 * b * eps * (2.0 * t12 * (a1[i] + a2[i]) + (t11 + t22) * d12) +
        0.5 * eps * (t11 - t22) * w + 0.5 * t13 * sm2 + 0.5 * t23 * sm1 -
        0.5 * b * (t13 * sp2 + t23 * sp1);
    g.component(kT13)[i] =
        th * sp1 - eps * adv.component(kT13)[i] -
        0.5 * b * eps * (2.0 * t13 * (a1[i] + vy[i]) + t23 * d12) -
        0.5 * (t11 - t33) * sm1 - 0.5 * t12 * sm2 - 0.5 * eps * t23 * w -
        0.5 * b * ((t11 + t33) * sp1 + t12 * sp2);
    g.component(kT23)[i] =
        th * sp2 - eps * adv.component(kT23)[i] -
        0.5 * b * eps * (2.0 * t23 * (a2[i] + vy[i]) + t13 * d12) -
        0.5 * (t22 - t33) * sm2 - 0.5 * t12 * sm1 + 0.5 * eps * t13 * w -
        0.5 * b * ((t22 + t33) * sp2 + t12 * sp1);
  }
  return spectral_dealiased(g);
}

SpectralField relaxation_step(const SpectralField& tau, const SpectralField& g, double dt,
                              double eps) {
  if (!(dt > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("relaxation_step: dt and eps must be positive");
  require_same_grid(tau, g, "relaxation_step");
  const double decay = std::exp(-dt / eps);
  const double gain = -std::expm1(-dt / eps);
  auto out = tau;
  out *= decay;
  out.axpy(gain, g);
  return out;
}

EpsState step(const EpsState& state, double dt, const MaterialParams& material,
              const EpsStepOptions& options) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  EpsState next = state;
  next.tau = relaxation_step(state.tau, stress_rhs(state, material), dt, state.eps);
  next.t = state.t + dt;
  if (options.freeze_velocity) return next;

  auto [fu, fv] = velocity_rhs(next, material, false);
  auto [pu, pv] = anisotropic_leray(fu, fv, state.eps);
  next.u.axpy(dt, pu);
  next.v.axpy(dt, pv);

  const auto& t = next.u.grid().tables();
  for (std::size_t m = 0; m < next.u.modes(); ++m) {
    const double div = 1.0 + dt * viscous_symbol(t, m, state.eps, material.theta());
    for (int c = 0; c < next.u.ncomp(); ++c) next.u.at(c, m) /= div;
    next.v.at(0, m) /= div;
    if (t.ky[m] == 0.0) {
      next.v.at(0, m) = 0.0;
      if (t.xi_abs[m] == 0.0)
        for (int c = 0; c < next.u.ncomp(); ++c) next.u.at(c, m) = 0.0;
    }
  }
  return next;
}

double eps_divergence(const EpsState& s) {
  auto div = derivative(s.u.slice(0, 1), Axis::X1, 1);
  if (s.u.ncomp() == 2) div += derivative(s.u.slice(1, 1), Axis::X2, 1);
  div += derivative(s.v, Axis::Y, 1);
  return anisotropic_norm(div, NormSpec{});
}

EpsScaledNorms eps_scaled_norms(const EpsState& s, double radius_a, double s1, double s2) {
  const NormSpec half{s1, s2, 0.5 * radius_a};
  const Grid& grid = s.u.grid();
  const int dh = grid.horizontal_dims();
  SpectralField uv(grid, dh + 1);
  uv.assign(0, s.u);
  uv.assign(dh, s.eps * s.v);

  SpectralField grad(grid, (dh + 1) * (dh + 1));
  grad.assign(0, s.eps * derivative(uv, Axis::X1, 1));
  int at = dh + 1;
  if (dh == 2) {
    grad.assign(at, s.eps * derivative(uv, Axis::X2, 1));
    at += dh + 1;
  }
  grad.assign(at, derivative(uv, Axis::Y, 1));

  EpsScaledNorms n;
  n.uv = anisotropic_norm(uv, half);
  n.tau = anisotropic_norm(s.tau, half);
  n.sqrt_eps_tau = std::sqrt(s.eps) * n.tau;
  n.grad_uv = anisotropic_norm(grad, half);
  return n;
}

// ---------------------------------------------------------------------------

std::vector<double> EpsRow::values() const {
  return {t,       u_norm,       v_norm,   tau_norm,           uv_half,    sqrt_eps_tau_half,
          grad_uv_half, tau_half, divergence_residual, v_mean_max, cfl};
}

const std::vector<std::string>& eps_columns() {
  static const std::vector<std::string> cols = {
      "t",       "u_norm",       "v_norm",   "tau_norm",           "uv_half",    "sqrt_eps_tau_half",
      "grad_uv_half", "tau_half", "divergence_residual", "v_mean_max", "cfl"};
  return cols;
}

namespace {

double cfl_number(const EpsState& s, double dt) {
  const Grid& grid = s.u.grid();
  const double dx = grid.lh() / grid.nh();
  const double dy = Grid::kVerticalPeriod / grid.ny();
  double umax = 0.0;
  const auto up = to_physical(s.u);
  for (double x : up.values()) umax = std::max(umax, std::abs(x));
  double vmax = 0.0;
  for (double x : to_physical(s.v).values()) vmax = std::max(vmax, std::abs(x));
  return dt * (umax / dx + vmax / dy);
}

}  // namespace

EpsRun run_eps(const RunConfig& config, double eps, const std::optional<SpectralField>& u0,
               const EpsRunOptions& options) {
  if (!(eps > 0.0)) throw std::invalid_argument("run_eps: eps must be positive");
  const Grid grid = config.make_grid();
  const auto material = config.material();
  const auto& mon = config.monitors;
  const double dt = config.stepping.dt;
  const int nsteps = step_count(config.stepping.t_final, dt);
  const int every = config.stepping.snapshot_every;

  const auto init = u0 ? *u0 : default_initial_velocity(grid, config.params.delta);
  if (!(init.grid() == grid) || init.ncomp() != grid.horizontal_dims())
    throw GridMismatchError("run_eps: initial velocity does not match the grid");
  EpsState state = initial_eps_state(init, eps, material);

  EpsRun run;
  run.hypothesis.bound = 100.0 * mon.smallness_c1 * mon.radius_a;
  double l2_grad = 0.0, l1_grad = 0.0, l2_tau = 0.0;
  double t_prev = 0.0;
  EpsScaledNorms prev{};

  auto accumulate = [&](const EpsState& s, bool first) {
    const auto n = eps_scaled_norms(s, mon.radius_a, mon.s1, mon.s2);
    auto& h = run.hypothesis;
    h.sup_uv = std::max(h.sup_uv, n.uv);
    h.sup_sqrt_eps_tau = std::max(h.sup_sqrt_eps_tau, n.sqrt_eps_tau);
    if (!first) {
      const double dtau = s.t - t_prev;
      l2_grad += 0.5 * dtau * (prev.grad_uv * prev.grad_uv + n.grad_uv * n.grad_uv);
      l1_grad += 0.5 * dtau * (prev.grad_uv + n.grad_uv);
      l2_tau += 0.5 * dtau * (prev.tau * prev.tau + n.tau * n.tau);
    }
    h.l2_grad_uv = std::sqrt(l2_grad);
    h.l1_grad_uv = l1_grad;
    h.l2_tau = std::sqrt(l2_tau);
    t_prev = s.t;
    prev = n;
    return n;
  };

  auto record = [&](const EpsState& s, const EpsScaledNorms& n, int index) {
    const NormSpec plain{mon.s1, mon.s2, 0.0};
    EpsRow row;
    row.t = s.t;
    row.u_norm = anisotropic_norm(s.u, plain);
    row.v_norm = anisotropic_norm(s.v, plain);
    row.tau_norm = anisotropic_norm(s.tau, plain);
    row.uv_half = n.uv;
    row.sqrt_eps_tau_half = n.sqrt_eps_tau;
    row.grad_uv_half = n.grad_uv;
    row.tau_half = n.tau;
    row.divergence_residual = eps_divergence(s);
    row.v_mean_max = max_abs(vertical_mean(s.v));
    row.cfl = cfl_number(s, dt);
    run.max_cfl = std::max(run.max_cfl, row.cfl);
    run.rows.push_back(row);
    if (options.observer) options.observer(s, index);
  };

  try {
    check_state(state, mon.blowup_ceiling);
    record(state, accumulate(state, true), 0);
    run.max_divergence = eps_divergence(state);
    for (int n = 1; n <= nsteps; ++n) {
      state = step(state, dt, material, options.step);
      state.t = n * dt;
      check_state(state, mon.blowup_ceiling);
      ++run.steps;
      run.max_divergence = std::max(run.max_divergence, eps_divergence(state));
      run.max_v_mean = std::max(run.max_v_mean, max_abs(vertical_mean(state.v)));
      const auto norms = accumulate(state, false);
      if (n % every == 0 || n == nsteps) record(state, norms, n);
    }
  } catch (const SolverBlowupError& e) {
    run.status = RunStatus::NumericalBlowup;
    run.failure = e.what();
  }
  run.final_state = std::move(state);
  return run;
}

}  // namespace hydrob
