#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hydrob/constitutive.hpp"

using namespace hydrob;

namespace {

double max_residual(const StressTuple& t, ShearPair s, const MaterialParams& p) {
  double r = 0.0;
  for (double x : limit_relation_residuals(t, s, p)) r = std::max(r, std::abs(x));
  return r;
}

// Trig polynomial of vertical degree one. The closure of its shear is
// analytic in a wide strip at these amplitudes, so the dealiased pointwise
// evaluation is accurate to roundoff.
SpectralField smooth_velocity(const Grid& g, double amp, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::array<double, 12> c{};
  for (auto& x : c) x = amp * d(rng);
  PhysicalField u(g, g.horizontal_dims());
  for (int comp = 0; comp < g.horizontal_dims(); ++comp) {
    auto v = u.component(comp);
    for (int i1 = 0; i1 < g.n1(); ++i1)
      for (int i2 = 0; i2 < g.n2(); ++i2)
        for (int iy = 0; iy < g.ny(); ++iy) {
          const double x = g.x1(i1), x2 = g.x2(i2), y = g.y(iy);
          v[g.index(i1, i2, iy)] = c[0 + comp] * std::sin(x) * std::sin(y) +
                                   c[2 + comp] * std::cos(y + x2) +
                                   c[4 + comp] * std::sin(x - y + 0.3) +
                                   c[6 + comp] * std::cos(y - 2 * x);
        }
  }
  return to_spectral(u);
}

}  // namespace

TEST_CASE("material parameters") {
  MaterialParams p(0.5, 0.3);
  CHECK(p.sigma() == doctest::Approx(0.91));
  CHECK_THROWS(MaterialParams(1.0, 0.0));
  CHECK_THROWS(MaterialParams(0.5, 1.5));
}

TEST_CASE("g1 and g2") {
  CHECK(g1(0.0, 0.7) == 0.0);
  CHECK(g2(0.0, 0.7) == 0.0);
  CHECK(g1(3.0, 0.0) == 0.0);
  CHECK(g2(3.0, 0.0) == 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> m(0.0, 10.0), s(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double mm = m(rng), ss = s(rng);
    const double a = g1(mm, ss), b = g2(mm, ss);
    CHECK(std::abs(b - ((1.0 + a) * (1.0 + a) - 1.0)) <= 1e-14);
    CHECK(a <= 0.0);
    CHECK(a > -1.0);
    CHECK(b <= 0.0);
    CHECK(b > -1.0);
  }
}

TEST_CASE("closure special cases") {
  MaterialParams p(0.4, 0.0);
  auto z = stress_closure({0, 0}, p);
  CHECK(z.t13 == 0.0);
  CHECK(z.t23 == 0.0);

  MaterialParams slip(0.4, 1.0);
  auto t = stress_closure({1.5, -0.7}, slip);
  CHECK(t.t13 == doctest::Approx(0.6 * 1.5));
  CHECK(t.t23 == doctest::Approx(0.6 * -0.7));
  auto d = stress_derived({1.5, -0.7}, t.t13, t.t23, slip);
  CHECK(d.t11 == 0.0);
  CHECK(d.t22 == 0.0);
  CHECK(d.t12 == 0.0);
  CHECK(d.t33 == doctest::Approx(-2.0 * (t.t13 * 1.5 + t.t23 * -0.7)));

  auto zd = stress_derived({0, 0}, 0, 0, p);
  CHECK(zd.t11 == 0.0);
  CHECK(zd.t33 == 0.0);
}

TEST_CASE("oracle special cases") {
  MaterialParams p(0.3, 0.0);
  auto z = algebraic_oracle({0, 0}, p).as_array();
  for (double x : z) CHECK(x == 0.0);
  const double q = 1.7;
  CHECK(algebraic_oracle({q, 0}, p).t13 == doctest::Approx(0.7 * q / (1 + q * q)).epsilon(1e-14));
}

TEST_CASE("closed form matches the linear-solve oracle") {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), rad(0.0, 2.0), ang(0.0, 2 * std::numbers::pi);
  double worst = 0.0, worst_residual = 0.0;
  for (double theta : {0.1, 0.5, 0.9})
    for (int i = 0; i < 1000; ++i) {
      MaterialParams p(theta, unit(rng));
      const double r = rad(rng), a = ang(rng);
      ShearPair s{r * std::cos(a), r * std::sin(a)};
      const auto closed = closure_stress(s, p).as_array();
      const auto oracle = algebraic_oracle(s, p).as_array();
      for (int c = 0; c < 6; ++c) worst = std::max(worst, std::abs(closed[c] - oracle[c]));
      worst_residual = std::max(worst_residual, max_residual(closure_stress(s, p), s, p));

      // boundedness by AM-GM, and joint oddness
      if (p.sigma() > 1e-3) {
        const double bound = (1 - theta) / (2 * std::sqrt(p.sigma()));
        CHECK(std::abs(closed[kT13]) <= bound * (1 + 1e-14));
        CHECK(std::abs(closed[kT23]) <= bound * (1 + 1e-14));
      }
      const auto neg = closure_stress({-s.q1, -s.q2}, p).as_array();
      CHECK(neg[kT13] == -closed[kT13]);
      CHECK(neg[kT23] == -closed[kT23]);
      CHECK(neg[kT11] == closed[kT11]);
      CHECK(neg[kT22] == closed[kT22]);
      CHECK(neg[kT33] == closed[kT33]);
      CHECK(neg[kT12] == closed[kT12]);
    }
  CHECK(worst <= 1e-10);
  CHECK(worst_residual <= 1e-12);
}

TEST_CASE("flux vanishes without shear or without sigma") {
  Grid g(1, 16, 16);
  SpectralField zero(g, 1);
  auto u = smooth_velocity(g, 0.5, 3);
  CHECK(max_abs(nonlinear_flux(zero, derivative(u, Axis::Y, 2), 0.9)) == 0.0);
  CHECK(max_abs(nonlinear_flux(derivative(u, Axis::Y, 1), derivative(u, Axis::Y, 2), 0.0)) <
        1e-17);
  CHECK_THROWS_AS(nonlinear_flux(SpectralField(g, 2), SpectralField(g, 2), 0.5), GridMismatchError);
}

TEST_CASE("flux agrees with differentiating the quotient directly") {
  for (int dh : {1, 2}) {
    Grid g(dh, dh == 1 ? 32 : 16, 64);
    const double sigma = 0.91;
    auto u = smooth_velocity(g, 0.1, 7 + dh);
    auto uy = derivative(u, Axis::Y, 1);
    auto uyy = derivative(u, Axis::Y, 2);
    auto f = nonlinear_flux(uy, uyy, sigma);

    auto q = to_physical(uy);
    PhysicalField quot(g, dh);
    for (std::size_t i = 0; i < g.size(); ++i) {
      double m = 0.0;
      for (int c = 0; c < dh; ++c) m += q.component(c)[i] * q.component(c)[i];
      for (int c = 0; c < dh; ++c) quot.component(c)[i] = q.component(c)[i] / (1 + sigma * m);
    }
    auto direct = derivative(dealias(to_spectral(quot)), Axis::Y, 1);
    const double err = anisotropic_norm(uyy + f - direct, {0, 0, 0});
    CHECK(err <= 1e-8);
  }
}

TEST_CASE("initial stress") {
  Grid g(1, 32, 32);
  MaterialParams p(0.5, 0.0);
  CHECK(max_abs(initial_stress(SpectralField(g, 1), p)) == 0.0);

  const double delta = 0.1;
  auto u0 = to_spectral(
      sample(g, [&](double x, double, double y) { return delta * std::sin(x) * std::sin(y); }));
  auto tau = to_physical(initial_stress(u0, p));
  double err = 0.0;
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int iy = 0; iy < g.ny(); ++iy) {
      const double s = std::sin(g.x1(i1)) * std::cos(g.y(iy));
      const double expected = 0.5 * delta * s / (1 + delta * delta * s * s);
      err = std::max(err, std::abs(tau.component(kT13)[g.index(i1, 0, iy)] - expected));
    }
  CHECK(err <= 1e-12);
}

TEST_CASE("initial stress satisfies the six relations pointwise") {
  for (int dh : {1, 2}) {
    Grid g(dh, 32, 32);
    MaterialParams p(0.3, -0.4);
    auto u0 = smooth_velocity(g, 0.02, 17 + dh);
    auto tau = to_physical(initial_stress(u0, p));
    auto q = to_physical(derivative(u0, Axis::Y, 1));
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      ShearPair s{q.component(0)[i], dh == 2 ? q.component(1)[i] : 0.0};
      StressTuple t{tau.component(kT11)[i], tau.component(kT22)[i], tau.component(kT33)[i],
                    tau.component(kT12)[i], tau.component(kT13)[i], tau.component(kT23)[i]};
      worst = std::max(worst, max_residual(t, s, p));
    }
    CHECK(worst <= 1e-10);
  }
}
