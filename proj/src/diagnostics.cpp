#include "hydrob/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hydrob {

EtaRates eta_rates(const RadiusTracker& tracker, const SpectralField& u,
                   double s1, double s2) {
  const double r = tracker.psi_radius();
  if (!(r > 0.0)) {
    std::ostringstream msg;
    msg << "analytic band exhausted: a - lambda*eta = " << r;
    throw BandExhaustedError(msg.str());
  }
  const NormSpec spec{s1, s2, r};
  const auto uy = derivative(u, Axis::Y, 1);
  const auto uyy = derivative(uy, Axis::Y, 1);
  return {anisotropic_norm(uy, spec), anisotropic_norm(uyy, spec)};
}

RadiusTracker eta_advance(const RadiusTracker& tracker, const SpectralField& u,
                          double dt, double s1, double s2) {
  const auto rates = eta_rates(tracker, u, s1, s2);
  RadiusTracker next = tracker;
  next.eta1 += dt * rates.deta1;
  next.eta2 += dt * rates.deta2;
  return next;
}

BootstrapFlags bootstrap_check(const RadiusTracker& tracker, const SpectralField& u,
                               double s1, double s2, double eps1, double c1_big,
                               double prior_sup_sq) {
  BootstrapFlags flags;
  const double eta_cap = tracker.radius_a / tracker.lambda;
  flags.eta_margin = eta_cap - tracker.eta();
  flags.eta_ok = tracker.eta() < eta_cap;

  const double r = std::max(tracker.psi_radius(), 0.0);
  const NormSpec spec{s1, s2, r};
  const double nu = anisotropic_norm(u, spec);
  const double nuy = anisotropic_norm(derivative(u, Axis::Y, 1), spec);
  flags.sup_sq = std::max(prior_sup_sq, nu * nu + nuy * nuy);
  const double cap = std::min(eps1, 1.0 / (16.0 * c1_big));
  flags.smallness_margin = cap - flags.sup_sq;
  flags.smallness_ok = flags.sup_sq < cap;
  return flags;
}

// ---------------------------------------------------------------------------

EnergyMonitor::EnergyMonitor(const SpectralField& u0, double kappa, double radius_a,
                             double s1, double s2)
    : kappa_(kappa), radius_a_(radius_a), s1_(s1), s2_(s2) {
  const NormSpec full{s1, s2, radius_a};
  bracket_ = anisotropic_norm(u0, full) +
             anisotropic_norm(derivative(u0, Axis::Y, 1), full);
}

double EnergyMonitor::push(double t, const SpectralField& u) {
  const NormSpec half{s1_, s2_, 0.5 * radius_a_};
  const auto uy = derivative(u, Axis::Y, 1);
  const auto uyy = derivative(uy, Axis::Y, 1);
  const double growth = std::exp(kappa_ * t);
  const double a = growth * anisotropic_norm(u, half);
  const double b = growth * anisotropic_norm(uy, half);
  const double c = growth * anisotropic_norm(uyy, half);
  if (!first_) {
    const double h = t - t_prev_;
    int_b_ += 0.5 * h * (b_prev_sq_ + b * b);
    int_c_ += 0.5 * h * (c_prev_sq_ + c * c);
  }
  first_ = false;
  t_prev_ = t;
  b_prev_sq_ = b * b;
  c_prev_sq_ = c * c;
  sup_a_ = std::max(sup_a_, a);
  sup_b_ = std::max(sup_b_, b);
  lhs_ = sup_a_ + sup_b_ + std::sqrt(int_b_) + std::sqrt(int_c_);
  return ratio();
}

std::vector<double> energy_monitor(std::span<const TimedField> trajectory,
                                   double kappa, double radius_a, double s1,
                                   double s2) {
  std::vector<double> out;
  if (trajectory.empty()) return out;
  EnergyMonitor monitor(trajectory.front().field, kappa, radius_a, s1, s2);
  out.reserve(trajectory.size());
  for (const auto& snap : trajectory) out.push_back(monitor.push(snap.t, snap.field));
  return out;
}

double poincare_check(const SpectralField& f, double kappa, const NormSpec& spec) {
  const double scale = std::max(max_abs(f), 1e-300);
  if (max_abs(vertical_mean(f)) > 1e-12 * scale)
    throw std::invalid_argument("poincare_check: field has a nonzero vertical mean");
  const double n0 = anisotropic_norm(f, spec);
  const double n1 = anisotropic_norm(derivative(f, Axis::Y, 1), spec);
  return 0.5 * n1 * n1 - kappa * n0 * n0;
}

double bochner_norm(std::span<const double> times, std::span<const double> norms,
                    std::span<const double> weights, double p) {
  if (times.size() != norms.size() || times.size() != weights.size())
    throw std::invalid_argument("bochner_norm: series lengths differ");
  if (!(p >= 1.0)) throw std::invalid_argument("bochner_norm: p must be >= 1");
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("bochner_norm: negative weight");
  if (times.empty()) return 0.0;
  if (std::isinf(p)) {
    double sup = 0.0;
    for (std::size_t i = 0; i < norms.size(); ++i)
      if (weights[i] > 0.0) sup = std::max(sup, norms[i]);
    return sup;
  }
  double acc = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = times[i] - times[i - 1];
    acc += 0.5 * h *
           (weights[i - 1] * std::pow(norms[i - 1], p) + weights[i] * std::pow(norms[i], p));
  }
  return std::pow(acc, 1.0 / p);
}

double bochner_norm(std::span<const TimedField> series,
                    std::span<const double> weights, double p, const NormSpec& spec) {
  std::vector<double> t;
  std::vector<double> n;
  for (const auto& s : series) {
    t.push_back(s.t);
    n.push_back(anisotropic_norm(s.field, spec));
  }
  return bochner_norm(t, n, weights, p);
}

// ---------------------------------------------------------------------------

ZetaTracker::ZetaTracker(double radius_a, double lambda_tilde, double eps, double s1,
                         double s2)
    : radius_a_(radius_a), lambda_tilde_(lambda_tilde), eps_(eps), s1_(s1), s2_(s2) {}

double ZetaTracker::integrand(const SpectralField& u_eps,
                              const SpectralField& u_limit) const {
  const NormSpec half{s1_, s2_, 0.5 * radius_a_};
  const int dh = u_eps.grid().horizontal_dims();
  // (eps grad_x, d_y) u^eps as one stacked field.
  SpectralField grad(u_eps.grid(), (dh + 1) * u_eps.ncomp());
  int at = 0;
  grad.assign(at, eps_ * derivative(u_eps, Axis::X1, 1));
  at += u_eps.ncomp();
  if (dh == 2) {
    grad.assign(at, eps_ * derivative(u_eps, Axis::X2, 1));
    at += u_eps.ncomp();
  }
  grad.assign(at, derivative(u_eps, Axis::Y, 1));
  const auto uy = derivative(u_limit, Axis::Y, 1);
  return anisotropic_norm(grad, half) + anisotropic_norm(uy, half) +
         anisotropic_norm(derivative(uy, Axis::Y, 1), half);
}

double ZetaTracker::push(double t, const SpectralField& u_eps,
                         const SpectralField& u_limit) {
  const double f = integrand(u_eps, u_limit);
  if (!first_) zeta_ += 0.5 * (t - t_prev_) * (f_prev_ + f);
  first_ = false;
  t_prev_ = t;
  f_prev_ = f;
  return zeta_;
}

bool ZetaTracker::sandwich_ok() const {
  const double phi = phi_radius();
  return 0.25 * radius_a_ <= phi && phi <= radius_a_ / 3.0;
}

ZetaSeries zeta_phi(std::span<const TimedField> eps_velocity,
                    std::span<const TimedField> limit_velocity, double radius_a,
                    double lambda_tilde, double eps, double s1, double s2) {
  if (eps_velocity.size() != limit_velocity.size())
    throw GridMismatchError("zeta_phi: trajectories have different lengths");
  ZetaSeries out;
  ZetaTracker tracker(radius_a, lambda_tilde, eps, s1, s2);
  for (std::size_t i = 0; i < eps_velocity.size(); ++i) {
    if (std::abs(eps_velocity[i].t - limit_velocity[i].t) > 1e-12)
      throw GridMismatchError("zeta_phi: trajectories are on different time grids");
    tracker.push(eps_velocity[i].t, eps_velocity[i].field, limit_velocity[i].field);
    out.t.push_back(eps_velocity[i].t);
    out.zeta.push_back(tracker.zeta());
    out.phi_radius.push_back(tracker.phi_radius());
    out.sandwich_ok = out.sandwich_ok && tracker.sandwich_ok();
  }
  return out;
}

}  // namespace hydrob
