#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hydrob/spectral.hpp"

using namespace hydrob;

namespace {

constexpr double kPi = std::numbers::pi;

PhysicalField random_samples(const Grid& g, int ncomp, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<double> v(g.size() * ncomp);
  for (auto& x : v) x = d(rng);
  return PhysicalField(g, ncomp, std::move(v));
}

// Smooth field with every mode inside the 2/3 band.
SpectralField band_limited(const Grid& g, unsigned seed) {
  return dealias(to_spectral(random_samples(g, 1, seed)));
}

std::size_t mode_of(const Grid& g, int m1, int ky) {
  const int i1 = m1 >= 0 ? m1 : m1 + g.n1();
  const int iy = ky >= 0 ? ky : ky + g.ny();
  return g.index(i1, 0, iy);
}

double physical_l2(const PhysicalField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x * x;
  return std::sqrt(s / static_cast<double>(f.grid().size()));
}

}  // namespace

TEST_CASE("constant field lives on the zero mode") {
  Grid g(1, 16, 16);
  auto f = to_spectral(sample(g, [](double, double, double) { return 1.0; }));
  CHECK(std::abs(f.at(0, 0) - Complex(1.0)) < 1e-15);
  double rest = 0.0;
  for (std::size_t m = 1; m < f.modes(); ++m) rest = std::max(rest, std::abs(f.at(0, m)));
  CHECK(rest < 1e-15);
}

TEST_CASE("sin(y) has amplitudes -i/2 and +i/2 at k = +1, -1") {
  Grid g(1, 8, 16);
  auto f = to_spectral(sample(g, [](double, double, double y) { return std::sin(y); }));
  CHECK(std::abs(f.at(0, mode_of(g, 0, 1)) - Complex(0.0, -0.5)) < 1e-15);
  CHECK(std::abs(f.at(0, mode_of(g, 0, -1)) - Complex(0.0, 0.5)) < 1e-15);
}

TEST_CASE("round trip is exact to 1e-12") {
  for (int dh : {1, 2}) {
    Grid g(dh, 16, 12, 3.0);
    auto p = random_samples(g, 2, 7);
    auto back = to_physical(to_spectral(p));
    double err = 0.0;
    for (std::size_t i = 0; i < p.values().size(); ++i)
      err = std::max(err, std::abs(back.values()[i] - p.values()[i]));
    CHECK(err <= 1e-12);
  }
}

TEST_CASE("size mismatch is rejected") {
  Grid g(1, 8, 8);
  std::vector<double> v(10);
  CHECK_THROWS(to_spectral(g, 1, v));
}

TEST_CASE("derivatives multiply by (i wavenumber)^order") {
  Grid g(1, 16, 16);
  auto s = to_spectral(sample(g, [](double, double, double y) { return std::sin(y); }));
  auto c = to_spectral(sample(g, [](double, double, double y) { return std::cos(y); }));
  CHECK(max_abs(derivative(s, Axis::Y, 1) - c) < 1e-15);

  auto one = to_spectral(sample(g, [](double, double, double) { return 1.0; }));
  CHECK(max_abs(derivative(one, Axis::X1, 1)) == 0.0);
  CHECK(max_abs(derivative(one, Axis::Y, 1)) == 0.0);

  auto w = to_spectral(sample(g, [](double x, double, double y) { return std::cos(x + 2 * y); }));
  CHECK(max_abs(derivative(w, Axis::Y, 2) - (-4.0) * w) < 1e-14);
  CHECK(max_abs(derivative(w, Axis::X1, 2) - (-1.0) * w) < 1e-14);

  // horizontal period 4 pi halves the wavenumber
  Grid wide(1, 16, 8, 4 * kPi);
  auto h = to_spectral(sample(wide, [](double x, double, double) { return std::sin(x / 2); }));
  auto hc = to_spectral(sample(wide, [](double x, double, double) { return 0.5 * std::cos(x / 2); }));
  CHECK(max_abs(derivative(h, Axis::X1, 1) - hc) < 1e-15);
}

TEST_CASE("norm of zero and of a single conjugate pair") {
  Grid g(1, 16, 16);
  SpectralField z(g, 1);
  CHECK(anisotropic_norm(z, {2.6, 1.6, 0.1}) == 0.0);

  const double a = 0.3, s1 = 2.6, s2 = 1.6, r = 0.1;
  SpectralField f(g, 1);
  f.at(0, mode_of(g, 2, 1)) = Complex(a, 0.0);
  f.at(0, mode_of(g, -2, -1)) = Complex(a, 0.0);
  const double expected = std::sqrt(2.0) * a * std::pow(5.0, s1 / 2) * std::pow(2.0, s2 / 2) *
                          std::exp(r * 3.0);
  CHECK(anisotropic_norm(f, {s1, s2, r}) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("Parseval against the physical L2 norm") {
  for (int dh : {1, 2}) {
    Grid g(dh, 16, 16);
    auto f = band_limited(g, 11 + dh);
    const double spectral = anisotropic_norm(f, {0.0, 0.0, 0.0});
    CHECK(std::abs(spectral - physical_l2(to_physical(f))) <= 1e-12 * spectral);
  }
}

TEST_CASE("weight overflow is diagnosed") {
  Grid g(1, 64, 8);
  CHECK_THROWS_AS(anisotropic_norm(band_limited(g, 3), {0, 0, 50.0}), WeightOverflowError);
  CHECK_THROWS_AS(apply_weight(band_limited(g, 3), 50.0), WeightOverflowError);
  CHECK_NOTHROW(check_weight_exponent(g, 1.0));
}

TEST_CASE("apply_weight scales by e^{r(1+|xi|)}") {
  Grid g(1, 16, 16);
  auto f = band_limited(g, 5);
  CHECK(max_abs(apply_weight(f, 0.0) - f) == 0.0);

  SpectralField one(g, 1);
  one.at(0, mode_of(g, 1, 0)) = 1.0;
  one.at(0, mode_of(g, -1, 0)) = 1.0;
  auto w = apply_weight(one, 0.1);
  CHECK(w.at(0, mode_of(g, 1, 0)).real() == doctest::Approx(std::exp(0.2)).epsilon(1e-15));

  const NormSpec spec{2.6, 1.6, 0.3};
  const double direct = anisotropic_norm(f, spec);
  const double via = anisotropic_norm(apply_weight(f, 0.3), {2.6, 1.6, 0.0});
  CHECK(std::abs(direct - via) <= 1e-13 * direct);
}

TEST_CASE("weight phase is subadditive") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-50.0, 50.0);
  const double r = 0.1;
  auto w = [&](double x) { return r * (1.0 + std::abs(x)); };
  for (int i = 0; i < 1000; ++i) {
    const double a = d(rng), b = d(rng);
    CHECK(w(a) <= w(a - b) + w(b) + 1e-15);
  }
}

TEST_CASE("magnitude_field keeps moduli and norms") {
  Grid g(2, 8, 8);
  SpectralField f(g, 1);
  f.at(0, g.index(1, 0, 0)) = -3.0;
  f.at(0, g.index(7, 0, 0)) = -3.0;
  auto m = magnitude_field(f);
  CHECK(m.at(0, g.index(1, 0, 0)) == Complex(3.0));

  auto pos = magnitude_field(band_limited(g, 21));
  CHECK(max_abs(magnitude_field(pos) - pos) == 0.0);

  auto r = band_limited(g, 22);
  auto rm = magnitude_field(r);
  CHECK(hermitian_defect(rm) < 1e-15);
  for (NormSpec s : {NormSpec{0, 0, 0}, NormSpec{2.6, 1.6, 0.1}, NormSpec{-1, 3, 0.5}})
    CHECK(anisotropic_norm(rm, s) == doctest::Approx(anisotropic_norm(r, s)).epsilon(1e-14));
}

TEST_CASE("vertical mean extraction") {
  Grid g(1, 8, 16);
  auto s = to_spectral(sample(g, [](double, double, double y) { return std::sin(y); }));
  CHECK(max_abs(vertical_mean(s)) < 1e-16);

  auto f = to_spectral(sample(g, [](double, double, double y) { return 1.0 + std::sin(y); }));
  auto mean = to_physical(vertical_mean(f));
  for (double x : mean.values()) CHECK(x == doctest::Approx(1.0));
  CHECK(max_abs(remove_vertical_mean(f) - s) < 1e-15);

  auto r = band_limited(g, 31);
  CHECK(max_abs(vertical_mean(remove_vertical_mean(r))) == 0.0);
}

TEST_CASE("dealias keeps the band and drops Nyquist") {
  Grid g(2, 12, 12);
  auto f = to_spectral(random_samples(g, 1, 41));
  auto d = dealias(f);
  CHECK(max_abs(dealias(d) - d) == 0.0);

  SpectralField nyq(g, 1);
  nyq.at(0, g.index(6, 0, 0)) = 1.0;
  CHECK(max_abs(dealias(nyq)) == 0.0);

  // |m| = 4 = N/3 is kept, |m| = 5 is not
  SpectralField edge(g, 1);
  edge.at(0, g.index(4, 0, 4)) = 1.0;
  edge.at(0, g.index(8, 0, 8)) = 1.0;
  CHECK(max_abs(dealias(edge) - edge) == 0.0);
  SpectralField out(g, 1);
  out.at(0, g.index(5, 0, 0)) = 1.0;
  CHECK(max_abs(dealias(out)) == 0.0);
}

TEST_CASE("operations preserve Hermitian symmetry") {
  Grid g(2, 8, 8);
  auto f = to_spectral(random_samples(g, 2, 51));
  CHECK(hermitian_defect(f) < 1e-15);
  CHECK(hermitian_defect(derivative(f, Axis::X2, 1)) < 1e-14);
  CHECK(hermitian_defect(derivative(f, Axis::Y, 3)) < 1e-13);
  CHECK(hermitian_defect(dealias(f)) < 1e-15);
  CHECK(hermitian_defect(apply_weight(f, 0.2)) < 1e-14);
  CHECK(hermitian_defect(remove_vertical_mean(f)) < 1e-15);
}

TEST_CASE("grid mismatch is an error") {
  SpectralField a(Grid(1, 8, 8), 1), b(Grid(1, 8, 16), 1);
  CHECK_THROWS_AS(a += b, GridMismatchError);
}
