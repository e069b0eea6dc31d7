#include "hydrob/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hydrob {

Grid::Grid(int horizontal_dims, int nh, int ny, double lh)
    : dh_(horizontal_dims), nh_(nh), ny_(ny), lh_(lh) {
  std::ostringstream err;
  if (dh_ != 1 && dh_ != 2) err << " horizontal_dims must be 1 or 2;";
  if (nh_ < 4 || nh_ % 2 != 0) err << " nh must be even and >= 4;";
  if (ny_ < 4 || ny_ % 2 != 0) err << " ny must be even and >= 4;";
  if (!(lh_ > 0.0) || !std::isfinite(lh_)) err << " lh must be positive;";
  if (!err.str().empty()) throw std::invalid_argument("Grid:" + err.str());
  tables_ = std::make_shared<const detail::GridTables>(dh_, nh_, ny_, lh_);
}

namespace detail {

GridTables::GridTables(int dh, int nh, int ny, double lh) {
  const int n1 = nh;
  const int n2 = dh == 2 ? nh : 1;
  const std::size_t total = static_cast<std::size_t>(n1) * n2 * ny;
  xi1.resize(total);
  xi2.resize(total);
  ky.resize(total);
  xi1_odd.resize(total);
  xi2_odd.resize(total);
  ky_odd.resize(total);
  xi_abs.resize(total);
  conj.resize(total);
  keep.resize(total);

  const double base = 2.0 * std::numbers::pi / lh;
  auto retained = [](int m, int n) { return 3 * std::abs(m) <= n; };
  auto partner = [](int i, int n) { return i == 0 ? 0 : n - i; };

  for (int i1 = 0; i1 < n1; ++i1) {
    const int m1 = Grid::signed_mode(i1, n1);
    for (int i2 = 0; i2 < n2; ++i2) {
      const int m2 = dh == 2 ? Grid::signed_mode(i2, n2) : 0;
      for (int iy = 0; iy < ny; ++iy) {
        const int my = Grid::signed_mode(iy, ny);
        const std::size_t at = (static_cast<std::size_t>(i1) * n2 + i2) * ny + iy;
        xi1[at] = base * m1;
        xi2[at] = base * m2;
        ky[at] = my;
        xi1_odd[at] = (2 * i1 == n1) ? 0.0 : base * m1;
        xi2_odd[at] = (dh == 2 && 2 * i2 == n2) ? 0.0 : base * m2;
        ky_odd[at] = (2 * iy == ny) ? 0.0 : static_cast<double>(my);
        xi_abs[at] = std::hypot(xi1[at], xi2[at]);
        conj[at] = (static_cast<std::size_t>(partner(i1, n1)) * n2 +
                    (dh == 2 ? partner(i2, n2) : 0)) * ny + partner(iy, ny);
        keep[at] = retained(m1, n1) && (dh == 1 || retained(m2, n2)) &&
                   retained(my, ny);
        xi_abs_max = std::max(xi_abs_max, xi_abs[at]);
      }
    }
  }
}

}  // namespace detail

}  // namespace hydrob
