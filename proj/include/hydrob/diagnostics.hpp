#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "hydrob/spectral.hpp"

namespace hydrob {

/// A snapshot of a field at time t.
struct TimedField {
  double t = 0.0;
  SpectralField field;
};

/// The analytic band is used up: a - lambda (eta1 + eta2) <= 0.
class BandExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shrinking analyticity radius r(t) = a - lambda (eta1 + eta2) with
///   eta1' = || d_y u_Psi ||_{H^{s1,s2}},  eta2' = || d_y^2 u_Psi ||_{H^{s1,s2}}.
///
/// `radius_a` is the initial analytic radius. It is unrelated to the
/// relaxation rate 1/We that carries the same letter in the dimensional
/// model; that one is absorbed into the rescaling and never appears here.
struct RadiusTracker {
  double radius_a = 0.0;
  double lambda = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;

  double eta() const { return eta1 + eta2; }
  double psi_radius() const { return radius_a - lambda * eta(); }
};

struct EtaRates {
  double deta1 = 0.0;
  double deta2 = 0.0;
};

/// Instantaneous eta1', eta2' at the tracker's current radius.
EtaRates eta_rates(const RadiusTracker& tracker, const SpectralField& u,
                   double s1, double s2);

/// Forward-Euler update of eta1, eta2 over dt using u at the start of the
/// step. Throws BandExhaustedError if the radius is already <= 0.
RadiusTracker eta_advance(const RadiusTracker& tracker, const SpectralField& u,
                          double dt, double s1, double s2);

struct BootstrapFlags {
  bool eta_ok = true;       // eta < a / lambda
  bool smallness_ok = true; // sup ||(u_Psi, d_y u_Psi)||^2 < min(eps1, 1/(16 C1))
  double eta_margin = 0.0;
  double smallness_margin = 0.0;
  double sup_sq = 0.0;      // running sup carried between calls

  bool ok() const { return eta_ok && smallness_ok; }
};

/// Evaluates both bootstrap-set conditions. `prior_sup_sq` carries the
/// running L^inf_t part from earlier calls.
BootstrapFlags bootstrap_check(const RadiusTracker& tracker, const SpectralField& u,
                               double s1, double s2, double eps1, double c1_big,
                               double prior_sup_sq = 0.0);

/// Running evaluation of the global energy inequality
///
///   ||e^{Kt} u_{a/2}||_{L^inf H} + ||e^{Kt} d_y u_{a/2}||_{L^inf H}
///     + ||e^{Kt} d_y u_{a/2}||_{L^2 H} + ||e^{Kt} d_y^2 u_{a/2}||_{L^2 H}
///   <= 100 ( ||u0_a||_H + ||d_y u0_a||_H )
///
/// with H = H^{s1,s2} and f_r = e^{r<D_x>} f. `push` returns LHS / bracket;
/// the ratio is 0 when the initial bracket vanishes. Time integrals use the
/// trapezoidal rule over the pushed samples.
class EnergyMonitor {
 public:
  EnergyMonitor(const SpectralField& u0, double kappa, double radius_a, double s1,
                double s2);

  double push(double t, const SpectralField& u);

  double bracket() const { return bracket_; }
  double lhs() const { return lhs_; }
  double ratio() const { return bracket_ > 0.0 ? lhs_ / bracket_ : 0.0; }

 private:
  double kappa_;
  double radius_a_;
  double s1_;
  double s2_;
  double bracket_ = 0.0;
  bool first_ = true;
  double t_prev_ = 0.0;
  double b_prev_sq_ = 0.0;
  double c_prev_sq_ = 0.0;
  double sup_a_ = 0.0;
  double sup_b_ = 0.0;
  double int_b_ = 0.0;
  double int_c_ = 0.0;
  double lhs_ = 0.0;
};

/// Ratio series of the energy inequality over a stored trajectory.
std::vector<double> energy_monitor(std::span<const TimedField> trajectory,
                                   double kappa, double radius_a, double s1,
                                   double s2);

/// 1/2 ||d_y f_Psi||^2 - K ||f_Psi||^2 in H^{spec.s1, spec.s2} at radius spec.r.
/// Throws std::invalid_argument if f has a nonzero vertical mean.
double poincare_check(const SpectralField& f, double kappa, const NormSpec& spec);

/// ( int_0^t w(t') ||f(t')||^p dt' )^{1/p} by the trapezoidal rule over the
/// sampled times; p = infinity returns sup ||f||. Throws for p < 1 or a
/// negative weight.
double bochner_norm(std::span<const double> times, std::span<const double> norms,
                    std::span<const double> weights, double p);

double bochner_norm(std::span<const TimedField> series,
                    std::span<const double> weights, double p, const NormSpec& spec);

/// Running zeta(t) = int_0^t [ ||(eps grad_x, d_y) u^eps_{a/2}|| + ||d_y u_{a/2}||
///   + ||d_y^2 u_{a/2}|| ] dt'  (H^{s1,s2}, trapezoidal) and the second phase
/// radius Phi(t) = (a - lambda_tilde zeta(t)) / 3.
class ZetaTracker {
 public:
  ZetaTracker(double radius_a, double lambda_tilde, double eps, double s1, double s2);

  /// Returns the updated zeta.
  double push(double t, const SpectralField& u_eps, const SpectralField& u_limit);

  double zeta() const { return zeta_; }
  double phi_radius() const { return (radius_a_ - lambda_tilde_ * zeta_) / 3.0; }
  /// a/4 <= Phi radius <= a/3.
  bool sandwich_ok() const;

 private:
  double integrand(const SpectralField& u_eps, const SpectralField& u_limit) const;

  double radius_a_;
  double lambda_tilde_;
  double eps_;
  double s1_;
  double s2_;
  bool first_ = true;
  double t_prev_ = 0.0;
  double f_prev_ = 0.0;
  double zeta_ = 0.0;
};

struct ZetaSeries {
  std::vector<double> t;
  std::vector<double> zeta;
  std::vector<double> phi_radius;
  bool sandwich_ok = true;
};

/// zeta / Phi over two trajectories sampled on the same times. Throws
/// GridMismatchError if the time grids differ.
ZetaSeries zeta_phi(std::span<const TimedField> eps_velocity,
                    std::span<const TimedField> limit_velocity, double radius_a,
                    double lambda_tilde, double eps, double s1, double s2);

}  // namespace hydrob
