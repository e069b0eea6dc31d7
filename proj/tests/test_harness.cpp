#include <cmath>
#include <random>

#include "doctest.h"
#include "hydrob/harness.hpp"

using namespace hydrob;

namespace {

RunConfig small_config(double t_final) {
  RunConfig c;
  c.grid.nh = 16;
  c.grid.ny = 16;
  c.stepping.t_final = t_final;
  return c;
}

SpectralField field(const Grid& g, std::function<double(double, double, double)> fn) {
  return to_spectral(sample(g, fn));
}

}  // namespace

TEST_CASE("rate fit on exact power laws") {
  std::vector<double> eps{0.2, 0.1, 0.05, 0.025}, e1, e2, half;
  for (double e : eps) {
    e1.push_back(3 * e);
    e2.push_back(e * e);
    half.push_back(1.5 * e);
  }
  auto f1 = fit_rate(eps, e1);
  CHECK(f1.slope == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(f1.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(f1.residual <= 1e-13);
  CHECK(fit_rate(eps, e2).slope == doctest::Approx(2.0).epsilon(1e-13));

  auto fh = fit_rate(eps, half);
  CHECK(fh.slope == doctest::Approx(f1.slope).epsilon(1e-13));
  CHECK(f1.intercept - fh.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-13));

  std::vector<double> one{0.1}, neg{0.1, -1.0};
  CHECK_THROWS_AS(fit_rate(one, one), std::invalid_argument);
  CHECK_THROWS_AS(fit_rate(std::vector<double>{0.1, 0.2}, neg), std::invalid_argument);
}

TEST_CASE("rate fit recovers the slope of perturbed data") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  std::vector<double> eps, err;
  for (int i = 0; i < 8; ++i) {
    eps.push_back(0.2 / std::pow(2.0, i));
    err.push_back(2.0 * eps.back() * std::exp(noise(rng)));
  }
  // each log error moves by at most 0.05 over a log range of 7 log 2
  CHECK(std::abs(fit_rate(eps, err).slope - 1.0) <= 0.1 / (7 * std::log(2.0)) * 2);
}

TEST_CASE("random fields are real and band limited") {
  Grid g(2, 16, 16);
  std::mt19937_64 rng(1);
  auto f = random_field(g, 2, 2.6, 1.6, rng);
  CHECK(hermitian_defect(f) == 0.0);
  CHECK(max_abs(dealias(f) - f) == 0.0);
  std::mt19937_64 again(1);
  CHECK(max_abs(random_field(g, 2, 2.6, 1.6, again) - f) == 0.0);
}

TEST_CASE("product ratios in closed form") {
  Grid g(1, 32, 16);
  const double s1 = 2.6, s2 = 1.6, r = 0.1;
  const NormSpec spec{s1, s2, r};
  auto f = field(g, [](double x, double, double y) { return std::sin(x + y); });
  auto one = field(g, [](double, double, double) { return 1.0; });
  const double ratio1 =
      anisotropic_norm(multiply(f, one), spec) / (anisotropic_norm(f, spec) * anisotropic_norm(one, spec));
  CHECK(ratio1 == doctest::Approx(std::exp(-r)).epsilon(1e-12));

  // cos^2 x = 1/2 + (1/2) cos 2x
  auto c = field(g, [](double x, double, double) { return std::cos(x); });
  const double nc = std::sqrt(2.0) * 0.5 * std::pow(2.0, s1 / 2) * std::exp(2 * r);
  const double nsq = std::sqrt(0.25 * std::exp(2 * r) +
                               2 * 0.0625 * std::pow(5.0, s1) * std::exp(6 * r));
  const double ratio2 = anisotropic_norm(multiply(c, c), spec) / std::pow(anisotropic_norm(c, spec), 2);
  CHECK(ratio2 == doctest::Approx(nsq / (nc * nc)).epsilon(1e-12));
}

TEST_CASE("magnitude lemma is an equality without cancellation") {
  Grid g(1, 16, 16);
  auto a = magnitude_field(field(g, [](double x, double, double y) { return std::cos(x) + std::sin(2 * y); }));
  auto b = magnitude_field(field(g, [](double x, double, double y) { return std::cos(x - y); }));
  auto lhs = multiply(a, b);
  auto rhs = multiply(magnitude_field(a), magnitude_field(b));
  CHECK(max_abs(lhs - rhs) <= 1e-15);

  auto weighted_l = apply_weight(lhs, 0.1);
  auto weighted_r = multiply(apply_weight(a, 0.1), apply_weight(b, 0.1));
  for (std::size_t m = 0; m < lhs.modes(); ++m)
    CHECK(std::abs(weighted_l.at(0, m)) <= weighted_r.at(0, m).real() + 1e-15);

  auto rep = lemma_magnitude_check(g, 20, 2.6, 1.6, 0.1, 5);
  CHECK(rep.violations == 0);
  CHECK(rep.pass);
}

TEST_CASE("composition values and slopes") {
  CHECK(composition_value(Composition::G1, 0.0, 0.9) == 0.0);
  CHECK(composition_value(Composition::G2, 0.0, 0.9) == 0.0);
  CHECK(composition_value(Composition::G1, 1.0, 0.5) == doctest::Approx(1 / 1.5 - 1));
  CHECK(composition_slope(Composition::G2, 0.4) == doctest::Approx(0.8));

  Grid g(1, 32, 32);
  auto small = lemma_composition_check(g, 20, Composition::G1, 0.91, 1e-4, 2.6, 1.6, 0.1, 7, 10.0);
  CHECK(small.skipped == 0);
  CHECK(small.max_ratio / 0.91 == doctest::Approx(1.0).epsilon(0.1));
  auto g2 = lemma_composition_check(g, 20, Composition::G2, 0.91, 1e-4, 2.6, 1.6, 0.1, 7, 10.0);
  CHECK(g2.max_ratio / 1.82 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("lemma suite is deterministic and passes on defaults") {
  RunConfig c;
  c.monitors.lemma_samples = 20;
  auto a = lemma_suite(c);
  auto b = lemma_suite(c);
  CHECK(a.pass());
  CHECK(a.product_coarse.ratios == b.product_coarse.ratios);
  CHECK(a.composition.ratios == b.composition.ratios);
  CHECK(a.poincare.violations == 0);
}

TEST_CASE("null experiment is degenerate") {
  RunConfig c = small_config(0.05);
  std::vector<double> eps{0.2, 0.1, 0.05};
  ConvergenceOptions opt;
  opt.null_experiment = true;
  auto study = convergence_study(c, eps, opt);
  CHECK(study.complete);
  CHECK(study.degenerate);
  for (const auto& p : study.points) CHECK(p.error <= 1e-14);
}

TEST_CASE("convergence study assembles points in list order") {
  RunConfig c = small_config(0.05);
  c.stepping.workers = 3;
  std::vector<double> eps{0.2, 0.1, 0.05};
  auto study = convergence_study(c, eps);
  REQUIRE(study.points.size() == 3);
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(study.points[i].eps == eps[i]);
  CHECK(study.complete);
  CHECK_FALSE(study.degenerate);
  CHECK(study.errors_decreasing);

  c.stepping.workers = 1;
  auto serial = convergence_study(c, eps);
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(serial.points[i].error == study.points[i].error);
}

TEST_CASE("self-convergence") {
  std::vector<double> dts{4e-3, 2e-3, 1e-3};
  // nearly linear: the rational-vs-exponential mismatch is first order
  RunConfig lin = small_config(0.2);
  lin.params.delta = 1e-8;
  auto l = self_convergence(lin, dts, Solver::Limit);
  CHECK(l.complete);
  CHECK(l.order == doctest::Approx(1.0).epsilon(0.05));

  RunConfig c = small_config(0.2);
  auto e = self_convergence(c, dts, Solver::Eps);
  CHECK(e.order >= 0.7);
  CHECK(e.order <= 1.3);

  auto frozen = self_convergence(c, dts, Solver::Eps, true);
  CHECK(frozen.degenerate);
}
