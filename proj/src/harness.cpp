#include "hydrob/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace hydrob {

RateFit fit_rate(std::span<const double> eps, std::span<const double> error) {
  if (eps.size() != error.size()) throw std::invalid_argument("fit_rate: length mismatch");
  if (eps.size() < 2) throw std::invalid_argument("fit_rate: need at least two points");
  const std::size_t n = eps.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0) || !(error[i] > 0.0))
      throw std::invalid_argument("fit_rate: eps and error must be positive");
    x[i] = std::log(eps[i]);
    y[i] = std::log(error[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_rate: eps values must differ");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

namespace {

struct LimitFrame {
  double t;
  SpectralField u, v, tau;
};

struct ErrorAccumulator {
  const RunConfig& config;
  double eps;
  double velocity = 0.0;
  double stress = 0.0;

  void push(const EpsState& s, const LimitFrame& lim) {
    const auto& m = config.monitors;
    const int dh = s.u.grid().horizontal_dims();
    SpectralField r(s.u.grid(), dh + 1);
    r.assign(0, s.u - lim.u);
    r.assign(dh, eps * (s.v - lim.v));
    const NormSpec quarter{m.s1 - 1.0, m.s2 - 1.0, 0.25 * m.radius_a};
    const NormSpec half{m.s1 - 1.0, m.s2 - 1.0, 0.5 * m.radius_a};
    velocity = std::max(velocity, anisotropic_norm(r, quarter));
    stress = std::max(stress, std::sqrt(eps) * anisotropic_norm(s.tau - lim.tau, half));
  }
};

RatePoint eps_point(const RunConfig& config, double eps, const std::vector<LimitFrame>& frames,
                    const SpectralField& u0, bool null_experiment) {
  const auto& m = config.monitors;
  RatePoint point;
  point.eps = eps;
  ErrorAccumulator acc{config, eps};
  ZetaTracker zeta(m.radius_a, m.lambda_tilde, eps, m.s1, m.s2);
  double last_zeta = 0.0;
  point.phi_radius_min = zeta.phi_radius();

  auto observe = [&](const EpsState& s, std::size_t idx) {
    if (idx >= frames.size())
      throw std::runtime_error("eps trajectory outlives the limit trajectory");
    const auto& lim = frames[idx];
    acc.push(s, lim);
    const double z = zeta.push(s.t, s.u, lim.u);
    if (z < last_zeta) point.zeta_monotone = false;
    last_zeta = z;
    point.phi_radius_min = std::min(point.phi_radius_min, zeta.phi_radius());
    point.sandwich_ok = point.sandwich_ok && zeta.sandwich_ok();
  };

  if (null_experiment) {
    for (std::size_t i = 0; i < frames.size(); ++i)
      observe(EpsState{frames[i].u, frames[i].v, frames[i].tau, frames[i].t, eps}, i);
  } else {
    std::size_t idx = 0;
    EpsRunOptions opts;
    opts.observer = [&](const EpsState& s, int) { observe(s, idx++); };
    const auto run = run_eps(config, eps, u0, opts);
    point.status = run.status;
    point.failure = run.failure;
    point.hypothesis = run.hypothesis;
    point.max_divergence = run.max_divergence;
  }
  point.velocity_error = acc.velocity;
  point.stress_error = acc.stress;
  point.error = acc.velocity + acc.stress;
  point.zeta_final = zeta.zeta();
  return point;
}

template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::min<std::size_t>(std::max(workers, 1), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < w; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

RateStudy convergence_study(const RunConfig& config, std::span<const double> eps_list,
                            const ConvergenceOptions& options) {
  const Grid grid = config.make_grid();
  const auto material = config.material();
  const auto u0 = default_initial_velocity(grid, config.params.delta);

  RateStudy study;
  LimitRunOptions lopts;
  lopts.keep_snapshots = true;
  const auto limit = run_limit(config, u0, lopts);
  study.limit_status = limit.status;
  study.limit_energy_ratio = limit.max_energy_ratio;
  study.limit_min_psi_radius = limit.min_psi_radius;
  study.limit_max_divergence = limit.max_divergence;
  study.limit_eta_monotone = limit.eta_monotone;
  if (limit.status == RunStatus::NumericalBlowup) {
    study.complete = false;
    study.failure = "limit run: " + limit.failure;
    return study;
  }

  std::vector<LimitFrame> frames;
  frames.reserve(limit.snapshots.size());
  for (const auto& s : limit.snapshots)
    frames.push_back({s.t, s.field, recover_v(s.field), closure_stress_field(s.field, material)});

  study.points.resize(eps_list.size());
  std::vector<std::string> errors(eps_list.size());
  parallel_for(eps_list.size(), config.stepping.workers, [&](std::size_t i) {
    try {
      study.points[i] = eps_point(config, eps_list[i], frames, u0, options.null_experiment);
    } catch (const std::exception& e) {
      study.points[i].eps = eps_list[i];
      study.points[i].status = RunStatus::NumericalBlowup;
      errors[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < study.points.size(); ++i) {
    auto& p = study.points[i];
    if (!errors[i].empty()) p.failure = errors[i];
    if (p.status == RunStatus::NumericalBlowup && study.complete) {
      study.complete = false;
      study.failure = "eps=" + std::to_string(p.eps) + ": " + p.failure;
    }
  }
  if (!study.complete) return study;

  std::vector<double> eps(eps_list.begin(), eps_list.end());
  std::vector<double> total, vel, str;
  for (const auto& p : study.points) {
    total.push_back(p.error);
    vel.push_back(p.velocity_error);
    str.push_back(p.stress_error);
  }
  const double scale = std::max(anisotropic_norm(u0, NormSpec{}), 1.0);
  study.degenerate = std::all_of(total.begin(), total.end(),
                                 [&](double e) { return e <= 1e-14 * scale; });
  if (study.degenerate) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    study.fit = study.velocity_fit = study.stress_fit = RateFit{nan, nan, nan};
    return study;
  }
  try {
    study.fit = fit_rate(eps, total);
    study.velocity_fit = fit_rate(eps, vel);
    study.stress_fit = fit_rate(eps, str);
  } catch (const std::invalid_argument& e) {
    study.complete = false;
    study.failure = e.what();
    return study;
  }
  study.errors_decreasing = true;
  for (std::size_t i = 1; i < total.size(); ++i)
    if (!(total[i] < total[i - 1])) study.errors_decreasing = false;
  return study;
}

// ---------------------------------------------------------------------------

SpectralField random_field(const Grid& grid, int ncomp, double s1, double s2,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& t = grid.tables();
  SpectralField raw(grid, ncomp);
  for (int c = 0; c < ncomp; ++c)
    for (std::size_t m = 0; m < raw.modes(); ++m) {
      const double re = normal(rng);
      const double im = normal(rng);
      if (!t.keep[m]) continue;
      const double amp = std::pow(1.0 + t.xi_abs[m] * t.xi_abs[m], -0.5 * (s1 + 2.0)) *
                         std::pow(1.0 + t.ky[m] * t.ky[m], -0.5 * (s2 + 2.0));
      raw.at(c, m) = amp * Complex(re, im);
    }
  SpectralField out(grid, ncomp);
  for (int c = 0; c < ncomp; ++c)
    for (std::size_t m = 0; m < raw.modes(); ++m)
      out.at(c, m) = 0.5 * (raw.at(c, m) + std::conj(raw.at(c, t.conj[m])));
  return out;
}

SpectralField multiply(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a, b, "multiply");
  if (a.ncomp() != b.ncomp()) throw GridMismatchError("multiply: component counts differ");
  const auto pa = to_physical(a);
  auto pb = to_physical(b);
  auto va = pa.values();
  auto vb = pb.values();
  for (std::size_t i = 0; i < vb.size(); ++i) vb[i] *= va[i];
  auto out = to_spectral(pb);
  dealias_in_place(out);
  return out;
}

namespace {

void finish(LemmaReport& rep) {
  rep.max_ratio = rep.ratios.empty() ? 0.0 : *std::max_element(rep.ratios.begin(), rep.ratios.end());
  bool finite = std::all_of(rep.ratios.begin(), rep.ratios.end(),
                            [](double r) { return std::isfinite(r); });
  rep.pass = finite && rep.violations == 0 && (rep.ceiling <= 0.0 || rep.max_ratio <= rep.ceiling);
}

}  // namespace

LemmaReport lemma_magnitude_check(const Grid& grid, int samples, double s1, double s2,
                                  double r, std::uint64_t seed) {
  LemmaReport rep;
  rep.name = "magnitude";
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  const auto& t = grid.tables();
  for (int i = 0; i < samples; ++i) {
    const auto a = random_field(grid, 1, s1, s2, rng);
    const auto b = random_field(grid, 1, s1, s2, rng);
    const auto lhs = apply_weight(multiply(a, b), r);
    const auto rhs = multiply(apply_weight(magnitude_field(a), r),
                              apply_weight(magnitude_field(b), r));
    double worst = 0.0;
    for (std::size_t m = 0; m < lhs.modes(); ++m) {
      if (!t.keep[m]) continue;
      const double l = std::abs(lhs.at(0, m));
      const double q = rhs.at(0, m).real();
      if (l > q + 1e-12 * std::max(1.0, std::abs(q))) ++rep.violations;
      if (q > 0.0) worst = std::max(worst, l / q);
    }
    rep.ratios.push_back(worst);
  }
  finish(rep);
  return rep;
}

LemmaReport lemma_product_check(const Grid& grid, int samples, double s1, double s2, double r,
                                std::uint64_t seed, double ceiling) {
  LemmaReport rep;
  rep.name = "product";
  rep.samples = samples;
  rep.ceiling = ceiling;
  const NormSpec spec{s1, s2, r};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    const auto f = random_field(grid, 1, s1, s2, rng);
    const auto g = random_field(grid, 1, s1, s2, rng);
    const double nf = anisotropic_norm(f, spec);
    const double ng = anisotropic_norm(g, spec);
    if (nf == 0.0 || ng == 0.0) {
      ++rep.skipped;
      continue;
    }
    rep.ratios.push_back(anisotropic_norm(multiply(f, g), spec) / (nf * ng));
  }
  finish(rep);
  return rep;
}

double composition_value(Composition f, double z, double sigma) {
  const double q = 1.0 / (1.0 + sigma * z);
  return f == Composition::G1 ? q - 1.0 : q * q - 1.0;
}

double composition_slope(Composition f, double sigma) {
  return f == Composition::G1 ? std::abs(sigma) : 2.0 * std::abs(sigma);
}

LemmaReport lemma_composition_check(const Grid& grid, int samples, Composition f,
                                    double sigma, double amplitude, double s1, double s2,
                                    double r, std::uint64_t seed, double ceiling) {
  LemmaReport rep;
  rep.name = f == Composition::G1 ? "composition_g1" : "composition_g2";
  rep.samples = samples;
  rep.ceiling = ceiling;
  const NormSpec spec{s1, s2, r};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    auto b = random_field(grid, 1, s1, s2, rng);
    const double nb = anisotropic_norm(b, spec);
    if (nb == 0.0) {
      ++rep.skipped;
      continue;
    }
    b *= amplitude / nb;
    auto pb = to_physical(b);
    for (double& z : pb.values()) z = composition_value(f, z, sigma);
    rep.ratios.push_back(anisotropic_norm(to_spectral(pb), spec) / amplitude);
  }
  finish(rep);
  return rep;
}

LemmaReport poincare_suite(const Grid& grid, int samples, double kappa, double s1, double s2,
                           double r, std::uint64_t seed) {
  LemmaReport rep;
  rep.name = "poincare";
  rep.samples = samples;
  const NormSpec spec{s1, s2, r};
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const auto f = remove_vertical_mean(random_field(grid, grid.horizontal_dims(), s1, s2, rng));
    const double margin = poincare_check(f, kappa, spec);
    if (margin < 0.0) ++rep.violations;
    rep.ratios.push_back(margin);
    worst = std::min(worst, margin);
  }
  rep.pass = rep.violations == 0;
  rep.max_ratio = rep.ratios.empty() ? 0.0 : worst;  // smallest margin
  return rep;
}

bool LemmaSuite::pass() const {
  return magnitude.pass && product_coarse.pass && product_fine.pass && product_stable &&
         composition.pass && composition_small_error <= 0.1 && poincare.pass;
}

LemmaSuite lemma_suite(const RunConfig& config) {
  const auto& m = config.monitors;
  const int dh = config.grid.dh;
  const int n = config.grid.nh;
  const Grid coarse(dh, n, config.grid.ny, config.grid.lh);
  const Grid fine(dh, 2 * n, 2 * config.grid.ny, config.grid.lh);
  const std::uint64_t seed = config.params.seed;
  const double sigma = config.material().sigma();
  const double product_ceiling = m.product_ceiling > 0.0 ? m.product_ceiling : kDefaultProductCeiling;
  const double comp_ceiling =
      m.composition_ceiling > 0.0 ? m.composition_ceiling : kDefaultCompositionCeiling;

  LemmaSuite suite;
  suite.magnitude = lemma_magnitude_check(coarse, m.lemma_samples, m.s1, m.s2, m.radius_a, seed);
  suite.product_coarse =
      lemma_product_check(coarse, m.lemma_samples, m.s1, m.s2, m.radius_a, seed, product_ceiling);
  suite.product_fine =
      lemma_product_check(fine, m.lemma_samples, m.s1, m.s2, m.radius_a, seed, product_ceiling);
  suite.product_drift =
      suite.product_coarse.max_ratio > 0.0
          ? std::abs(suite.product_fine.max_ratio / suite.product_coarse.max_ratio - 1.0)
          : std::numeric_limits<double>::infinity();
  suite.product_stable = suite.product_drift <= 0.2;
  suite.composition = lemma_composition_check(coarse, m.lemma_samples, Composition::G1, sigma,
                                              m.eps0, m.s1, m.s2, m.radius_a, seed, comp_ceiling);
  suite.composition_small =
      lemma_composition_check(coarse, m.lemma_samples, Composition::G1, sigma, 1e-4, m.s1, m.s2,
                              m.radius_a, seed, comp_ceiling);
  suite.composition_g2 =
      lemma_composition_check(coarse, m.lemma_samples, Composition::G2, sigma, 1e-4, m.s1, m.s2,
                              m.radius_a, seed, 2.0 * comp_ceiling);
  double worst = 0.0;
  for (double r : suite.composition_small.ratios)
    worst = std::max(worst, std::abs(r / composition_slope(Composition::G1, sigma) - 1.0));
  suite.composition_small_error = worst;
  suite.poincare = poincare_suite(coarse, 200, m.kappa, m.s1, m.s2, m.radius_a, seed);
  return suite;
}

// ---------------------------------------------------------------------------

namespace {

SpectralField random_stress(const Grid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_field(grid, kStressCount, 2.0, 2.0, rng);
}

EpsState frozen_relaxation(const Grid& grid, double eps, double t_final, int steps,
                           const MaterialParams& material, const SpectralField& tau0) {
  EpsState s{SpectralField(grid, grid.horizontal_dims()), SpectralField(grid, 1), tau0, 0.0, eps};
  const double dt = t_final / steps;
  EpsStepOptions opts;
  opts.freeze_velocity = true;
  for (int i = 0; i < steps; ++i) s = step(s, dt, material, opts);
  return s;
}

SpectralField final_state(const RunConfig& config, Solver solver, bool freeze) {
  const Grid grid = config.make_grid();
  if (solver == Solver::Limit) {
    const auto run = run_limit(config);
    if (run.status == RunStatus::NumericalBlowup) throw SolverBlowupError(run.failure);
    return run.final_state->u;
  }
  EpsState s = [&] {
    if (freeze) {
      const int steps = step_count(config.stepping.t_final, config.stepping.dt);
      return frozen_relaxation(grid, config.params.eps, config.stepping.t_final, steps,
                               config.material(), random_stress(grid, config.params.seed));
    }
    const auto run = run_eps(config, config.params.eps);
    if (run.status == RunStatus::NumericalBlowup) throw SolverBlowupError(run.failure);
    return *run.final_state;
  }();
  const SpectralField* parts[] = {&s.u, &s.v, &s.tau};
  return stack(parts);
}

}  // namespace

SelfConvergence self_convergence(const RunConfig& config, std::span<const double> dt_list,
                                 Solver solver, bool freeze_velocity) {
  if (dt_list.size() < 3) throw std::invalid_argument("self_convergence: need three time steps");
  SelfConvergence out;
  out.dt.assign(dt_list.begin(), dt_list.end());
  std::vector<SpectralField> finals;
  try {
    for (double dt : dt_list) {
      RunConfig c = config;
      c.stepping.dt = dt;
      c.stepping.snapshot_every = std::max(1, step_count(c.stepping.t_final, dt));
      finals.push_back(final_state(c, solver, freeze_velocity));
    }
  } catch (const std::exception& e) {
    out.complete = false;
    out.failure = e.what();
    return out;
  }
  double scale = 0.0;
  for (const auto& f : finals) scale = std::max(scale, anisotropic_norm(f, NormSpec{}));
  for (std::size_t i = 1; i < finals.size(); ++i)
    out.differences.push_back(anisotropic_norm(finals[i - 1] - finals[i], NormSpec{}));
  const double d0 = out.differences[out.differences.size() - 2];
  const double d1 = out.differences.back();
  const double floor = 1e-13 * std::max(scale, 1e-300);
  out.degenerate = d0 <= floor || d1 <= floor;
  out.order = out.degenerate ? std::numeric_limits<double>::quiet_NaN() : std::log2(d0 / d1);
  return out;
}

double relaxation_decay_error(const Grid& grid, double eps, double t_final, int steps,
                              const MaterialParams& material, std::uint64_t seed) {
  const auto tau0 = random_stress(grid, seed);
  const auto s = frozen_relaxation(grid, eps, t_final, steps, material, tau0);
  auto exact = tau0;
  exact *= std::exp(-t_final / eps);
  return max_abs(s.tau - exact) / max_abs(exact);
}

}  // namespace hydrob
