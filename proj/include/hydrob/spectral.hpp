#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydrob/grid.hpp"

namespace hydrob {

/// Raised when an analytic weight e^{r(1+|xi|)} would exceed the exponent
/// guard on the grid's largest wavevector.
class WeightOverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// Raised when two fields on different grids (or with incompatible
/// component counts) are combined.
class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Largest admissible r(1+|xi|_max), natural-log units.
inline constexpr double kWeightExponentLimit = 700.0;

/// Real samples on the physical grid, `ncomp` components back to back.
class PhysicalField {
 public:
  PhysicalField(Grid grid, int ncomp);
  PhysicalField(Grid grid, int ncomp, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }

  std::span<double> component(int c);
  std::span<const double> component(int c) const;
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 private:
  Grid grid_;
  int ncomp_;
  std::vector<double> values_;
};

/// Fourier amplitudes of a real multi-component field. The forward transform
/// carries the 1/(N_h^{d_h} N_y) factor, so `coeff(c, m)` is the amplitude of
/// e^{i(xi.x + k y)} at mode m.
class SpectralField {
 public:
  SpectralField(Grid grid, int ncomp);

  const Grid& grid() const { return grid_; }
  int ncomp() const { return ncomp_; }
  std::size_t modes() const { return grid_.size(); }

  std::span<Complex> component(int c);
  std::span<const Complex> component(int c) const;
  std::span<Complex> coeffs() { return coeffs_; }
  std::span<const Complex> coeffs() const { return coeffs_; }

  Complex& at(int c, std::size_t mode) { return coeffs_[c * modes() + mode]; }
  const Complex& at(int c, std::size_t mode) const {
    return coeffs_[c * modes() + mode];
  }

  /// Components [first, first + count) as a new field.
  SpectralField slice(int first, int count) const;
  /// Copy `src` into components starting at `first`.
  void assign(int first, const SpectralField& src);

  SpectralField& operator+=(const SpectralField& rhs);
  SpectralField& operator-=(const SpectralField& rhs);
  SpectralField& operator*=(double s);
  /// this += s * x
  SpectralField& axpy(double s, const SpectralField& x);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) {
    return a += b;
  }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) {
    return a -= b;
  }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

 private:
  Grid grid_;
  int ncomp_;
  std::vector<Complex> coeffs_;
};

/// Concatenate components of several fields on the same grid.
SpectralField stack(std::span<const SpectralField* const> parts);

/// Anisotropic Sobolev / analytic norm selector. r = 0 gives plain
/// H^{s1,s2}.
struct NormSpec {
  double s1 = 0.0;
  double s2 = 0.0;
  double r = 0.0;
};

SpectralField to_spectral(const PhysicalField& f);
SpectralField to_spectral(const Grid& grid, int ncomp,
                          std::span<const double> samples);
PhysicalField to_physical(const SpectralField& f);

/// Sample `fn(x1, x2, y)` on the grid into a one-component field.
PhysicalField sample(const Grid& grid,
                     const std::function<double(double, double, double)>& fn);

/// Multiply every mode by (i * wavenumber)^order along `axis`.
SpectralField derivative(const SpectralField& f, Axis axis, int order = 1);

/// ( sum <xi>^{2 s1} <k>^{2 s2} e^{2 r (1+|xi|)} |f(xi,k)|^2 )^{1/2}, summed
/// over components.
double anisotropic_norm(const SpectralField& f, const NormSpec& spec);

/// Mode-wise multiplication by e^{r(1+|xi|)}. At r = 0 this is the identity.
SpectralField apply_weight(const SpectralField& f, double r);

/// Throws WeightOverflowError unless r(1+|xi|_max) is within the guard.
void check_weight_exponent(const Grid& grid, double r);

/// Every coefficient replaced by its modulus.
SpectralField magnitude_field(const SpectralField& f);

/// Keeps only the k = 0 slice (a y-independent field on the same grid).
SpectralField vertical_mean(const SpectralField& f);
SpectralField remove_vertical_mean(const SpectralField& f);

/// 2/3-rule truncation: zero every mode with |n| > N/3 on any axis.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);

/// Largest |coeff(-m) - conj(coeff(m))| over all components and modes.
double hermitian_defect(const SpectralField& f);

/// Largest coefficient modulus.
double max_abs(const SpectralField& f);

void require_same_grid(const SpectralField& a, const SpectralField& b,
                       const char* where);

}  // namespace hydrob
