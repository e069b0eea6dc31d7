#pragma once

#include <array>

#include "hydrob/spectral.hpp"

namespace hydrob {

/// Vertical shear (d_y u_1, d_y u_2) at a point; q2 = 0 for one horizontal
/// dimension.
struct ShearPair {
  double q1 = 0.0;
  double q2 = 0.0;
};

/// Storage order of the six independent stress components wherever a
/// six-component field is used.
enum StressIndex : int { kT11 = 0, kT22, kT33, kT12, kT13, kT23, kStressCount };

struct StressTuple {
  double t11 = 0.0;
  double t22 = 0.0;
  double t33 = 0.0;
  double t12 = 0.0;
  double t13 = 0.0;
  double t23 = 0.0;

  std::array<double, 6> as_array() const { return {t11, t22, t33, t12, t13, t23}; }
};

struct OffDiagonalStress {
  double t13 = 0.0;
  double t23 = 0.0;
};

struct DerivedStress {
  double t11 = 0.0;
  double t22 = 0.0;
  double t33 = 0.0;
  double t12 = 0.0;
};

/// Coupling ratio theta in (0,1) and slip parameter b in [-1,1];
/// sigma = 1 - b^2.
class MaterialParams {
 public:
  MaterialParams(double theta, double b);

  double theta() const { return theta_; }
  double b() const { return b_; }
  double sigma() const { return sigma_; }

 private:
  double theta_;
  double b_;
  double sigma_;
};

/// 1/(1 + sigma m) - 1 with m = |d_y u|^2.
double g1(double m, double sigma);
/// 1/(1 + sigma m)^2 - 1.
double g2(double m, double sigma);

/// tau_13, tau_23 of the hydrostatic limit in closed form:
/// (1-theta) q / (1 + sigma |q|^2).
OffDiagonalStress stress_closure(ShearPair s, const MaterialParams& p);

/// tau_11, tau_22, tau_33, tau_12 from the first four limit relations.
DerivedStress stress_derived(ShearPair s, double t13, double t23,
                             const MaterialParams& p);

/// Closed form for all six components (closure + derived).
StressTuple closure_stress(ShearPair s, const MaterialParams& p);

/// Independent route to the limit stresses: assembles the 2x2 system
///   A tau13 + B tau23 = 2(1-theta) q1
///   B tau13 + C tau23 = 2(1-theta) q2
/// by elimination, solves it by Cramer's rule and back-substitutes the
/// remaining four relations. Throws std::domain_error if |AC - B^2| < 1e-14.
StressTuple algebraic_oracle(ShearPair s, const MaterialParams& p);

/// Residuals (lhs - rhs) of the six algebraic limit relations.
std::array<double, 6> limit_relation_residuals(const StressTuple& t, ShearPair s,
                                               const MaterialParams& p);

/// F = d_y^2u G1 - 2 sigma d_yu (d_yu . d_y^2u) G2 - 2 sigma d_yu (d_yu . d_y^2u),
/// formed pointwise and dealiased. `uy` and `uyy` carry d_h components.
SpectralField nonlinear_flux(const SpectralField& uy, const SpectralField& uyy,
                             double sigma);

/// Six-component stress field (order StressIndex) given by the closure
/// applied pointwise to d_y u, dealiased. Used both as the limit-system
/// stress and as the shared initial stress of the two solvers.
SpectralField closure_stress_field(const SpectralField& u, const MaterialParams& p);

/// Alias kept for the initial-data construction.
inline SpectralField initial_stress(const SpectralField& u0, const MaterialParams& p) {
  return closure_stress_field(u0, p);
}

}  // namespace hydrob
