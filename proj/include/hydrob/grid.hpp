#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <vector>

namespace hydrob {

using Complex = std::complex<double>;

enum class Axis { X1, X2, Y };

namespace detail {
struct GridTables;
}

/// Periodic (horizontal x vertical) box. The horizontal axes have period
/// `lh`; the vertical axis is the unit torus of period 2*pi. Storage is
/// row-major over (x1, x2, y) with y fastest; for one horizontal dimension
/// the x2 extent is 1.
class Grid {
 public:
  static constexpr double kVerticalPeriod = 2.0 * std::numbers::pi;

  Grid(int horizontal_dims, int nh, int ny, double lh = 2.0 * std::numbers::pi);

  int horizontal_dims() const { return dh_; }
  int nh() const { return nh_; }
  int ny() const { return ny_; }
  double lh() const { return lh_; }

  int n1() const { return nh_; }
  int n2() const { return dh_ == 2 ? nh_ : 1; }

  /// Points (and modes) per component.
  std::size_t size() const {
    return static_cast<std::size_t>(n1()) * n2() * ny_;
  }

  std::size_t index(int i1, int i2, int iy) const {
    return (static_cast<std::size_t>(i1) * n2() + i2) * ny_ + iy;
  }

  /// Signed FFT-order integer for storage position i on an axis of n
  /// points; the Nyquist slot maps to -n/2.
  static int signed_mode(int i, int n) { return i < n / 2 ? i : i - n; }

  double x1(int i) const { return lh_ * i / nh_; }
  double x2(int i) const { return lh_ * i / nh_; }
  double y(int i) const { return kVerticalPeriod * i / ny_; }

  /// Per-mode wavenumber tables, shared between copies of the grid.
  const detail::GridTables& tables() const { return *tables_; }

  bool operator==(const Grid& other) const {
    return dh_ == other.dh_ && nh_ == other.nh_ && ny_ == other.ny_ &&
           lh_ == other.lh_;
  }

 private:
  int dh_;
  int nh_;
  int ny_;
  double lh_;
  std::shared_ptr<const detail::GridTables> tables_;
};

namespace detail {

/// Flat per-mode lookup tables. Odd-order derivative tables zero the
/// Nyquist wavenumber so real fields stay real.
struct GridTables {
  std::vector<double> xi1;       // physical wavenumber, axis x1
  std::vector<double> xi2;       // physical wavenumber, axis x2 (0 if dh=1)
  std::vector<double> ky;        // vertical integer wavenumber
  std::vector<double> xi1_odd;   // Nyquist-zeroed variants
  std::vector<double> xi2_odd;
  std::vector<double> ky_odd;
  std::vector<double> xi_abs;    // |xi| (Euclidean over horizontal axes)
  std::vector<std::size_t> conj; // flat index of the (-xi, -k) partner
  std::vector<unsigned char> keep;  // 2/3-rule retained band
  double xi_abs_max = 0.0;

  GridTables(int dh, int nh, int ny, double lh);
};

}  // namespace detail

}  // namespace hydrob
