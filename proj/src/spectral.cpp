#include "hydrob/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace hydrob {

namespace {

// FFTW planning is not thread safe; execution on distinct buffers is. Plans
// are created once per grid shape with FFTW_ESTIMATE so the chosen algorithm
// (and hence the rounding) does not depend on timing.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

class PlanCache {
 public:
  const PlanPair& get(const Grid& grid) {
    const auto key = std::make_tuple(grid.horizontal_dims(), grid.nh(), grid.ny());
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    int dims[3];
    int rank = 0;
    dims[rank++] = grid.n1();
    if (grid.horizontal_dims() == 2) dims[rank++] = grid.n2();
    dims[rank++] = grid.ny();

    std::vector<Complex> scratch(grid.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair pair;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    pair.forward = fftw_plan_dft(rank, dims, buf, buf, FFTW_FORWARD, flags);
    pair.backward = fftw_plan_dft(rank, dims, buf, buf, FFTW_BACKWARD, flags);
    return plans_.emplace(key, pair).first->second;
  }

  ~PlanCache() {
    for (auto& [key, pair] : plans_) {
      fftw_destroy_plan(pair.forward);
      fftw_destroy_plan(pair.backward);
    }
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, PlanPair> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

void require_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw GridMismatchError(std::string(where) + ": grid mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------

PhysicalField::PhysicalField(Grid grid, int ncomp)
    : grid_(std::move(grid)), ncomp_(ncomp), values_(grid_.size() * ncomp, 0.0) {
  if (ncomp < 1) throw std::invalid_argument("PhysicalField: ncomp must be >= 1");
}

PhysicalField::PhysicalField(Grid grid, int ncomp, std::vector<double> values)
    : grid_(std::move(grid)), ncomp_(ncomp), values_(std::move(values)) {
  if (ncomp < 1) throw std::invalid_argument("PhysicalField: ncomp must be >= 1");
  if (values_.size() != grid_.size() * static_cast<std::size_t>(ncomp)) {
    std::ostringstream msg;
    msg << "PhysicalField: expected " << grid_.size() * ncomp << " samples, got "
        << values_.size();
    throw std::invalid_argument(msg.str());
  }
}

std::span<double> PhysicalField::component(int c) {
  return std::span<double>(values_).subspan(c * grid_.size(), grid_.size());
}

std::span<const double> PhysicalField::component(int c) const {
  return std::span<const double>(values_).subspan(c * grid_.size(), grid_.size());
}

SpectralField::SpectralField(Grid grid, int ncomp)
    : grid_(std::move(grid)), ncomp_(ncomp), coeffs_(grid_.size() * ncomp) {
  if (ncomp < 1) throw std::invalid_argument("SpectralField: ncomp must be >= 1");
}

std::span<Complex> SpectralField::component(int c) {
  return std::span<Complex>(coeffs_).subspan(c * modes(), modes());
}

std::span<const Complex> SpectralField::component(int c) const {
  return std::span<const Complex>(coeffs_).subspan(c * modes(), modes());
}

SpectralField SpectralField::slice(int first, int count) const {
  if (first < 0 || count < 1 || first + count > ncomp_)
    throw std::out_of_range("SpectralField::slice: component range");
  SpectralField out(grid_, count);
  std::copy_n(coeffs_.begin() + first * modes(), count * modes(),
              out.coeffs_.begin());
  return out;
}

void SpectralField::assign(int first, const SpectralField& src) {
  require_grid(grid_, src.grid_, "SpectralField::assign");
  if (first < 0 || first + src.ncomp_ > ncomp_)
    throw std::out_of_range("SpectralField::assign: component range");
  std::copy(src.coeffs_.begin(), src.coeffs_.end(),
            coeffs_.begin() + first * modes());
}

SpectralField& SpectralField::operator+=(const SpectralField& rhs) {
  return axpy(1.0, rhs);
}

SpectralField& SpectralField::operator-=(const SpectralField& rhs) {
  return axpy(-1.0, rhs);
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& x) {
  require_grid(grid_, x.grid_, "SpectralField::axpy");
  if (ncomp_ != x.ncomp_)
    throw GridMismatchError("SpectralField::axpy: component count mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * x.coeffs_[i];
  return *this;
}

SpectralField stack(std::span<const SpectralField* const> parts) {
  if (parts.empty()) throw std::invalid_argument("stack: no fields");
  int total = 0;
  for (const auto* p : parts) {
    require_grid(parts.front()->grid(), p->grid(), "stack");
    total += p->ncomp();
  }
  SpectralField out(parts.front()->grid(), total);
  int at = 0;
  for (const auto* p : parts) {
    out.assign(at, *p);
    at += p->ncomp();
  }
  return out;
}

void require_same_grid(const SpectralField& a, const SpectralField& b,
                       const char* where) {
  require_grid(a.grid(), b.grid(), where);
}

// ---------------------------------------------------------------------------

SpectralField to_spectral(const PhysicalField& f) {
  const Grid& grid = f.grid();
  const auto& plan = plan_cache().get(grid);
  const std::size_t n = grid.size();
  const double scale = 1.0 / static_cast<double>(n);
  SpectralField out(grid, f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < n; ++i) dst[i] = Complex(src[i], 0.0);
    auto* buf = reinterpret_cast<fftw_complex*>(dst.data());
    fftw_execute_dft(plan.forward, buf, buf);
    for (auto& z : dst) z *= scale;
  }
  return out;
}

SpectralField to_spectral(const Grid& grid, int ncomp,
                          std::span<const double> samples) {
  return to_spectral(
      PhysicalField(grid, ncomp, std::vector<double>(samples.begin(), samples.end())));
}

PhysicalField to_physical(const SpectralField& f) {
  const Grid& grid = f.grid();
  const auto& plan = plan_cache().get(grid);
  const std::size_t n = grid.size();
  PhysicalField out(grid, f.ncomp());
  std::vector<Complex> work(n);
  auto* buf = reinterpret_cast<fftw_complex*>(work.data());
  for (int c = 0; c < f.ncomp(); ++c) {
    auto src = f.component(c);
    std::copy(src.begin(), src.end(), work.begin());
    fftw_execute_dft(plan.backward, buf, buf);
    auto dst = out.component(c);
    for (std::size_t i = 0; i < n; ++i) dst[i] = work[i].real();
  }
  return out;
}

PhysicalField sample(const Grid& grid,
                     const std::function<double(double, double, double)>& fn) {
  PhysicalField out(grid, 1);
  auto v = out.component(0);
  for (int i1 = 0; i1 < grid.n1(); ++i1)
    for (int i2 = 0; i2 < grid.n2(); ++i2)
      for (int iy = 0; iy < grid.ny(); ++iy)
        v[grid.index(i1, i2, iy)] = fn(grid.x1(i1), grid.x2(i2), grid.y(iy));
  return out;
}

SpectralField derivative(const SpectralField& f, Axis axis, int order) {
  if (order < 0) throw std::invalid_argument("derivative: negative order");
  const Grid& grid = f.grid();
  if (axis == Axis::X2 && grid.horizontal_dims() < 2)
    throw std::invalid_argument("derivative: x2 axis on a one-dimensional grid");
  const auto& t = grid.tables();
  const bool odd = order % 2 == 1;
  const std::vector<double>* wn = nullptr;
  switch (axis) {
    case Axis::X1: wn = odd ? &t.xi1_odd : &t.xi1; break;
    case Axis::X2: wn = odd ? &t.xi2_odd : &t.xi2; break;
    case Axis::Y: wn = odd ? &t.ky_odd : &t.ky; break;
  }
  SpectralField out = f;
  const std::size_t n = f.modes();
  for (int c = 0; c < f.ncomp(); ++c) {
    auto z = out.component(c);
    for (std::size_t m = 0; m < n; ++m) {
      Complex factor(1.0, 0.0);
      const Complex ik(0.0, (*wn)[m]);
      for (int p = 0; p < order; ++p) factor *= ik;
      z[m] *= factor;
    }
  }
  return out;
}

void check_weight_exponent(const Grid& grid, double r) {
  if (!(r >= 0.0) || !std::isfinite(r))
    throw std::invalid_argument("analytic radius must be finite and >= 0");
  const double exponent = r * (1.0 + grid.tables().xi_abs_max);
  if (exponent > kWeightExponentLimit) {
    std::ostringstream msg;
    msg << "analytic weight exponent r(1+|xi|_max) = " << exponent
        << " exceeds the guard " << kWeightExponentLimit << " (r = " << r
        << ", |xi|_max = " << grid.tables().xi_abs_max << ")";
    throw WeightOverflowError(msg.str());
  }
}

double anisotropic_norm(const SpectralField& f, const NormSpec& spec) {
  if (!std::isfinite(spec.s1) || !std::isfinite(spec.s2))
    throw std::invalid_argument("anisotropic_norm: Sobolev indices must be finite");
  check_weight_exponent(f.grid(), spec.r);
  const auto& t = f.grid().tables();
  const std::size_t n = f.modes();

  // log of the per-mode symbol; the sum is rescaled by its largest term so
  // e^{2r(1+|xi|)} never has to be formed directly.
  std::vector<double> logw(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double xi2 = t.xi_abs[m] * t.xi_abs[m];
    const double k2 = t.ky[m] * t.ky[m];
    logw[m] = 0.5 * spec.s1 * std::log1p(xi2) + 0.5 * spec.s2 * std::log1p(k2) +
              spec.r * (1.0 + t.xi_abs[m]);
  }
  double top = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < f.ncomp(); ++c) {
    auto z = f.component(c);
    for (std::size_t m = 0; m < n; ++m)
      if (z[m] != Complex(0.0, 0.0)) top = std::max(top, logw[m] + std::log(std::abs(z[m])));
  }
  if (!std::isfinite(top)) return 0.0;
  double sum = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto z = f.component(c);
    for (std::size_t m = 0; m < n; ++m) {
      if (z[m] == Complex(0.0, 0.0)) continue;
      const double scaled = std::exp(logw[m] + std::log(std::abs(z[m])) - top);
      sum += scaled * scaled;
    }
  }
  return std::exp(top) * std::sqrt(sum);
}

SpectralField apply_weight(const SpectralField& f, double r) {
  check_weight_exponent(f.grid(), r);
  if (r == 0.0) return f;
  const auto& t = f.grid().tables();
  SpectralField out = f;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto z = out.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m) z[m] *= std::exp(r * (1.0 + t.xi_abs[m]));
  }
  return out;
}

SpectralField magnitude_field(const SpectralField& f) {
  SpectralField out = f;
  for (auto& z : out.coeffs()) z = Complex(std::abs(z), 0.0);
  return out;
}

SpectralField vertical_mean(const SpectralField& f) {
  const auto& t = f.grid().tables();
  SpectralField out(f.grid(), f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m)
      if (t.ky[m] == 0.0) dst[m] = src[m];
  }
  return out;
}

SpectralField remove_vertical_mean(const SpectralField& f) {
  const auto& t = f.grid().tables();
  SpectralField out = f;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto z = out.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m)
      if (t.ky[m] == 0.0) z[m] = Complex(0.0, 0.0);
  }
  return out;
}

void dealias_in_place(SpectralField& f) {
  const auto& keep = f.grid().tables().keep;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto z = f.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m)
      if (!keep[m]) z[m] = Complex(0.0, 0.0);
  }
}

SpectralField dealias(const SpectralField& f) {
  SpectralField out = f;
  dealias_in_place(out);
  return out;
}

double hermitian_defect(const SpectralField& f) {
  const auto& conj = f.grid().tables().conj;
  double worst = 0.0;
  for (int c = 0; c < f.ncomp(); ++c) {
    auto z = f.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m)
      worst = std::max(worst, std::abs(z[conj[m]] - std::conj(z[m])));
  }
  return worst;
}

double max_abs(const SpectralField& f) {
  double worst = 0.0;
  for (const auto& z : f.coeffs()) worst = std::max(worst, std::abs(z));
  return worst;
}

}  // namespace hydrob
