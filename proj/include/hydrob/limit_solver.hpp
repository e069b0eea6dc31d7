#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hydrob/config.hpp"
#include "hydrob/constitutive.hpp"
#include "hydrob/diagnostics.hpp"
#include "hydrob/spectral.hpp"

namespace hydrob {

/// Raised when a solver produces a non-finite state or exceeds the
/// configured norm ceiling. The message carries a short state dump.
class SolverBlowupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunStatus { Completed, MonitorViolation, NumericalBlowup };

std::string_view to_string(RunStatus status);

/// State of the hydrostatic system: horizontal velocity plus the
/// analyticity-loss accumulators eta1, eta2. v, p and tau are derived.
struct LimitState {
  SpectralField u;
  double t = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
};

/// Analytic-band parameters advanced alongside the state.
struct BandParams {
  double radius_a = 0.1;
  double lambda = 1.0;
  double s1 = 2.6;
  double s2 = 1.6;
};

/// v with d_y v = -div_x u mode by mode and zero vertical mean. Throws
/// std::invalid_argument if div_x of the vertical mean of u is nonzero.
SpectralField recover_v(const SpectralField& u);

/// y-independent pressure of the hydrostatic system (one component, only the
/// k = 0 slice populated, zero horizontal mean).
///   d_h = 1:  p = -(1/(i xi)) F_x< d_x(u^2) + d_y(v u) >
///   d_h = 2:  Delta_x p = -d_i d_j <u_i u_j>
SpectralField recover_pressure(const SpectralField& u, const SpectralField& v);

/// Explicit tendency -u.grad_x u - v d_y u - grad_x p + (1-theta) F, dealiased.
/// The vertical-mean part is projected so that <u> (d_h = 1) or div_x <u>
/// (d_h = 2) is conserved exactly.
SpectralField rhs_explicit(const LimitState& state, const MaterialParams& material);

/// One IMEX Euler step: u' = (u + dt rhs) / (1 + dt k^2), vertical mean
/// re-gauged, eta advanced with the state at the start of the step.
LimitState step(const LimitState& state, double dt, const MaterialParams& material,
                const BandParams& band);

/// || div_x u + d_y v || in L^2 (normalized measure).
double incompressibility_residual(const SpectralField& u, const SpectralField& v);

/// One output row of a limit run. Column order is `limit_columns()`.
struct LimitRow {
  double t = 0.0;
  double u_norm = 0.0;        // ||u||_{H^{s1,s2}}
  double u_psi_norm = 0.0;    // ||u_Psi||
  double uy_psi_norm = 0.0;   // ||d_y u_Psi||
  double uyy_psi_norm = 0.0;  // ||d_y^2 u_Psi||
  double eta1 = 0.0;
  double eta2 = 0.0;
  double psi_radius = 0.0;
  double energy_ratio = 0.0;
  double bootstrap_eta_margin = 0.0;
  double bootstrap_smallness_margin = 0.0;
  double bootstrap_ok = 1.0;
  double poincare_margin = 0.0;
  double vertical_mean_max = 0.0;
  double divergence_residual = 0.0;
  double tau_norm = 0.0;      // ||tau||_{H^{s1,s2}} of the closure stress
  double pressure_norm = 0.0; // ||p||_{H^{s1,s2}}

  std::vector<double> values() const;
};

const std::vector<std::string>& limit_columns();

struct LimitRunOptions {
  bool keep_snapshots = false;  // store u every snapshot_every steps
};

struct LimitRun {
  RunStatus status = RunStatus::Completed;
  std::string failure;
  std::optional<LimitState> final_state;
  std::vector<LimitRow> rows;
  std::vector<TimedField> snapshots;
  std::optional<double> bootstrap_violation_time;
  double max_energy_ratio = 0.0;
  double min_psi_radius = 0.0;
  double max_vertical_mean = 0.0;
  double max_divergence = 0.0;
  bool eta_monotone = true;
  int steps = 0;
};

/// Fixed-step integration to stepping.t_final from `u0` (default initial data
/// when empty). Deterministic for a given configuration.
LimitRun run_limit(const RunConfig& config, const std::optional<SpectralField>& u0 = {},
                   const LimitRunOptions& options = {});

/// Number of steps for t_final at dt (rounded to the nearest integer).
int step_count(double t_final, double dt);

}  // namespace hydrob
