#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "hydrob/limit_solver.hpp"

namespace hydrob {

/// Full rescaled system at aspect ratio eps. `tau` holds the six independent
/// stress components in StressIndex order (t11, t22, t33, t12, t13, t23).
/// With d_h = 1 the second horizontal velocity is identically zero and the
/// stresses that couple only through it stay at zero.
struct EpsState {
  SpectralField u;
  SpectralField v;
  SpectralField tau;
  double t = 0.0;
  double eps = 0.1;
};

/// u0, v = recover_v(u0), tau = closure stresses of u0.
EpsState initial_eps_state(const SpectralField& u0, double eps, const MaterialParams& material);

/// Momentum tendencies before the pressure is removed. The v equation is
/// divided by eps^2, so its stress forcing carries 1/eps. With
/// `include_viscous` the term theta * (eps^2 Delta_x + d_y^2) is added.
std::pair<SpectralField, SpectralField> velocity_rhs(const EpsState& state,
                                                     const MaterialParams& material,
                                                     bool include_viscous = true);

/// Removes the pressure gradient (grad_x p, eps^-2 d_y p) so that
/// i xi . Fu + i k Fv = 0 on every mode. The (0,0) mode is left alone.
/// `pressure`, if given, receives p (one component).
std::pair<SpectralField, SpectralField> anisotropic_leray(const SpectralField& fu,
                                                          const SpectralField& fv, double eps,
                                                          SpectralField* pressure = nullptr);

/// Right-hand sides G_ij of eps d_t tau_ij + tau_ij = G_ij, with the transport
/// term moved to the right. Six components in StressIndex order, dealiased.
SpectralField stress_rhs(const EpsState& state, const MaterialParams& material);

/// tau' = e^{-dt/eps} tau + (1 - e^{-dt/eps}) G.
SpectralField relaxation_step(const SpectralField& tau, const SpectralField& g, double dt,
                              double eps);

struct EpsStepOptions {
  bool freeze_velocity = false;  // stress relaxes against the current velocity only
};

/// Stress relaxation with frozen velocity, then the velocity IMEX step with the
/// new stress: projected explicit tendency, division by
/// 1 + dt theta (eps^2 |xi|^2 + k^2), vertical-mean gauges.
EpsState step(const EpsState& state, double dt, const MaterialParams& material,
              const EpsStepOptions& options = {});

/// || div_x u + d_y v || in L^2.
double eps_divergence(const EpsState& state);

/// Scaled quantities at weight a/2 in H^{s1,s2}.
struct EpsScaledNorms {
  double uv = 0.0;          // ||(u, eps v)||
  double sqrt_eps_tau = 0.0;
  double grad_uv = 0.0;     // ||(eps grad_x, d_y)(u, eps v)||
  double tau = 0.0;
};

EpsScaledNorms eps_scaled_norms(const EpsState& state, double radius_a, double s1, double s2);

struct EpsRow {
  double t = 0.0;
  double u_norm = 0.0;
  double v_norm = 0.0;
  double tau_norm = 0.0;
  double uv_half = 0.0;
  double sqrt_eps_tau_half = 0.0;
  double grad_uv_half = 0.0;
  double tau_half = 0.0;
  double divergence_residual = 0.0;
  double v_mean_max = 0.0;
  double cfl = 0.0;

  std::vector<double> values() const;
};

const std::vector<std::string>& eps_columns();

/// Running values of the five hypothesis quantities (sup, sup, L^2, L^1, L^2
/// in time) and the bound 100 c1 a they are compared against.
struct EpsHypothesis {
  double sup_uv = 0.0;
  double sup_sqrt_eps_tau = 0.0;
  double l2_grad_uv = 0.0;
  double l1_grad_uv = 0.0;
  double l2_tau = 0.0;
  double bound = 0.0;

  double total() const { return sup_uv + sup_sqrt_eps_tau + l2_grad_uv + l1_grad_uv + l2_tau; }
  bool ok() const { return std::isfinite(total()) && total() <= bound; }
};

struct EpsRunOptions {
  EpsStepOptions step;
  /// Called on the initial state and after every step whose index is a
  /// multiple of snapshot_every (and the last one), with the step index.
  std::function<void(const EpsState&, int)> observer;
};

struct EpsRun {
  RunStatus status = RunStatus::Completed;
  std::string failure;
  std::optional<EpsState> final_state;
  std::vector<EpsRow> rows;
  EpsHypothesis hypothesis;
  double max_divergence = 0.0;  // over every step
  double max_v_mean = 0.0;
  double max_cfl = 0.0;
  int steps = 0;
};

/// Fixed-step integration at aspect ratio `eps` from u0 (default initial data
/// when empty).
EpsRun run_eps(const RunConfig& config, double eps,
               const std::optional<SpectralField>& u0 = {}, const EpsRunOptions& options = {});

}  // namespace hydrob
