#include "hydrob/constitutive.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hydrob {

MaterialParams::MaterialParams(double theta, double b)
    : theta_(theta), b_(b), sigma_(1.0 - b * b) {
  std::ostringstream err;
  if (!(theta > 0.0 && theta < 1.0)) err << " theta=" << theta << " not in (0,1);";
  if (!(std::abs(b) <= 1.0)) err << " b=" << b << " not in [-1,1];";
  if (!err.str().empty()) throw std::invalid_argument("MaterialParams:" + err.str());
}

double g1(double m, double sigma) { return 1.0 / (1.0 + sigma * m) - 1.0; }

double g2(double m, double sigma) {
  const double d = 1.0 + sigma * m;
  return 1.0 / (d * d) - 1.0;
}

OffDiagonalStress stress_closure(ShearPair s, const MaterialParams& p) {
  const double denom = 1.0 + p.sigma() * (s.q1 * s.q1 + s.q2 * s.q2);
  const double c = (1.0 - p.theta()) / denom;
  return {c * s.q1, c * s.q2};
}

DerivedStress stress_derived(ShearPair s, double t13, double t23,
                             const MaterialParams& p) {
  const double b = p.b();
  DerivedStress d;
  d.t11 = -(b - 1.0) * t13 * s.q1;
  d.t22 = -(b - 1.0) * t23 * s.q2;
  d.t33 = -(b + 1.0) * (t13 * s.q1 + t23 * s.q2);
  d.t12 = -0.5 * (b - 1.0) * (t13 * s.q2 + t23 * s.q1);
  return d;
}

StressTuple closure_stress(ShearPair s, const MaterialParams& p) {
  const auto off = stress_closure(s, p);
  const auto d = stress_derived(s, off.t13, off.t23, p);
  return {d.t11, d.t22, d.t33, d.t12, off.t13, off.t23};
}

StressTuple algebraic_oracle(ShearPair s, const MaterialParams& p) {
  const double b = p.b();
  const double q1 = s.q1;
  const double q2 = s.q2;
  const double one_b2 = 1.0 - b * b;
  const double a = 2.0 + 2.0 * one_b2 * q1 * q1 - 0.5 * (b * b - 1.0) * q2 * q2;
  const double bb = 1.5 * one_b2 * q1 * q2;
  const double c = 2.0 + 2.0 * one_b2 * q2 * q2 - 0.5 * (b * b - 1.0) * q1 * q1;
  const double det = a * c - bb * bb;
  if (std::abs(det) < 1e-14) {
    std::ostringstream msg;
    msg << "algebraic_oracle: singular system, AC - B^2 = " << det;
    throw std::domain_error(msg.str());
  }
  const double r1 = 2.0 * (1.0 - p.theta()) * q1;
  const double r2 = 2.0 * (1.0 - p.theta()) * q2;

  StressTuple t;
  t.t13 = (r1 * c - bb * r2) / det;
  t.t23 = (a * r2 - bb * r1) / det;
  // Back-substitution through the first four relations, written out here
  // rather than shared with stress_derived.
  t.t11 = (1.0 - b) * t.t13 * q1;
  t.t22 = (1.0 - b) * t.t23 * q2;
  t.t33 = -(1.0 + b) * (t.t13 * q1 + t.t23 * q2);
  t.t12 = 0.5 * (1.0 - b) * (t.t13 * q2 + t.t23 * q1);
  return t;
}

std::array<double, 6> limit_relation_residuals(const StressTuple& t, ShearPair s,
                                               const MaterialParams& p) {
  const double b = p.b();
  const double q1 = s.q1;
  const double q2 = s.q2;
  const double th = p.theta();
  return {
      (b - 1.0) * t.t13 * q1 + t.t11,
      (b - 1.0) * t.t23 * q2 + t.t22,
      (b + 1.0) * (t.t13 * q1 + t.t23 * q2) + t.t33,
      (b - 1.0) * (t.t13 * q2 + t.t23 * q1) + 2.0 * t.t12,
      b * (t.t11 + t.t33) * q1 + (t.t11 - t.t33) * q1 + (b + 1.0) * t.t12 * q2 +
          2.0 * t.t13 - 2.0 * (1.0 - th) * q1,
      b * (t.t22 + t.t33) * q2 + (t.t22 - t.t33) * q2 + (b + 1.0) * t.t12 * q1 +
          2.0 * t.t23 - 2.0 * (1.0 - th) * q2,
  };
}

SpectralField nonlinear_flux(const SpectralField& uy, const SpectralField& uyy,
                             double sigma) {
  require_same_grid(uy, uyy, "nonlinear_flux");
  const int dh = uy.grid().horizontal_dims();
  if (uy.ncomp() != dh || uyy.ncomp() != dh)
    throw GridMismatchError("nonlinear_flux: component count must equal d_h");

  const auto q = to_physical(uy);
  const auto qy = to_physical(uyy);
  PhysicalField out(uy.grid(), dh);
  const std::size_t n = uy.grid().size();
  for (std::size_t i = 0; i < n; ++i) {
    double m = 0.0;
    double dot = 0.0;
    for (int c = 0; c < dh; ++c) {
      const double qc = q.component(c)[i];
      m += qc * qc;
      dot += qc * qy.component(c)[i];
    }
    const double gg1 = g1(m, sigma);
    const double gg2 = g2(m, sigma);
    for (int c = 0; c < dh; ++c) {
      const double qc = q.component(c)[i];
      out.component(c)[i] = qy.component(c)[i] * gg1 -
                            2.0 * sigma * qc * dot * gg2 -
                            2.0 * sigma * qc * dot;
    }
  }
  auto f = to_spectral(out);
  dealias_in_place(f);
  return f;
}

SpectralField closure_stress_field(const SpectralField& u, const MaterialParams& p) {
  const int dh = u.grid().horizontal_dims();
  if (u.ncomp() != dh)
    throw GridMismatchError("closure_stress_field: component count must equal d_h");
  const auto q = to_physical(derivative(u, Axis::Y, 1));
  PhysicalField tau(u.grid(), kStressCount);
  const std::size_t n = u.grid().size();
  for (std::size_t i = 0; i < n; ++i) {
    ShearPair s{q.component(0)[i], dh == 2 ? q.component(1)[i] : 0.0};
    const auto t = closure_stress(s, p).as_array();
    for (int c = 0; c < kStressCount; ++c) tau.component(c)[i] = t[c];
  }
  auto out = to_spectral(tau);
  dealias_in_place(out);
  return out;
}

}  // namespace hydrob
