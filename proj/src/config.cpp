#include "hydrob/config.hpp"

#include <cmath>
#include <sstream>

#include "hydrob/spectral.hpp"

namespace hydrob {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Limit: return "limit";
    case Mode::Eps: return "eps";
    case Mode::Convergence: return "convergence";
    case Mode::Lemmas: return "lemmas";
    case Mode::SelfConvergence: return "selfconv";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::Limit, Mode::Eps, Mode::Convergence, Mode::Lemmas,
                 Mode::SelfConvergence})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected limit, eps, convergence, lemmas, selfconv)");
}

ConfigError::ConfigError(std::string message, std::vector<std::string> issues)
    : std::runtime_error([&] {
        std::string full = std::move(message);
        for (const auto& i : issues) full += "\n  - " + i;
        return full;
      }()),
      issues_(std::move(issues)) {}

namespace {

template <typename T>
std::string fmt(T v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

std::vector<std::string> validate(const RunConfig& c, Mode mode) {
  std::vector<std::string> out;
  auto need = [&](bool ok, std::string msg) {
    if (!ok) out.push_back(std::move(msg));
  };

  need(c.grid.dh == 1 || c.grid.dh == 2, "grid.dh=" + fmt(c.grid.dh) + " must be 1 or 2");
  need(c.grid.nh >= 4 && c.grid.nh % 2 == 0,
       "grid.nh=" + fmt(c.grid.nh) + " must be even and >= 4");
  need(c.grid.ny >= 4 && c.grid.ny % 2 == 0,
       "grid.ny=" + fmt(c.grid.ny) + " must be even and >= 4");
  need(c.grid.lh > 0.0 && std::isfinite(c.grid.lh),
       "grid.lh=" + fmt(c.grid.lh) + " must be positive");

  need(c.params.theta > 0.0 && c.params.theta < 1.0,
       "params.theta=" + fmt(c.params.theta) + " violates theta in (0,1)");
  need(std::abs(c.params.b) <= 1.0,
       "params.b=" + fmt(c.params.b) + " violates |b| <= 1");
  need(c.params.eps > 0.0 && std::isfinite(c.params.eps),
       "params.eps=" + fmt(c.params.eps) + " violates eps > 0");
  need(std::isfinite(c.params.delta), "params.delta must be finite");
  if (mode == Mode::Convergence) {
    need(c.params.eps_list.size() >= 2, "params.eps_list needs at least 2 entries");
    for (std::size_t i = 0; i < c.params.eps_list.size(); ++i) {
      need(c.params.eps_list[i] > 0.0,
           "params.eps_list[" + fmt(i) + "]=" + fmt(c.params.eps_list[i]) +
               " violates eps > 0");
      if (i > 0)
        need(c.params.eps_list[i] < c.params.eps_list[i - 1],
             "params.eps_list must be strictly decreasing (entry " + fmt(i) + ")");
    }
  }

  const auto& m = c.monitors;
  switch (mode) {
    case Mode::Limit:
    case Mode::SelfConvergence:
      need(m.s1 > 1.5, "monitors.s1=" + fmt(m.s1) +
                           " violates s1 > 3/2 required for global well-posedness");
      need(m.s2 > 0.5, "monitors.s2=" + fmt(m.s2) +
                           " violates s2 > 1/2 required for global well-posedness");
      break;
    case Mode::Eps:
    case Mode::Convergence:
      need(m.s1 > 2.5, "monitors.s1=" + fmt(m.s1) +
                           " violates s1 > 5/2 required for the hydrostatic limit");
      need(m.s2 > 1.5, "monitors.s2=" + fmt(m.s2) +
                           " violates s2 > 3/2 required for the hydrostatic limit");
      break;
    case Mode::Lemmas:
      need(m.s1 > 1.0, "monitors.s1=" + fmt(m.s1) + " violates s1 > 1 (product law)");
      need(m.s2 > 0.5, "monitors.s2=" + fmt(m.s2) + " violates s2 > 1/2 (product law)");
      break;
  }
  need(m.radius_a > 0.0, "monitors.radius_a=" + fmt(m.radius_a) + " must be > 0");
  need(m.kappa > 0.0 && m.kappa < 0.5,
       "monitors.kappa=" + fmt(m.kappa) + " violates 0 < kappa < 1/2");
  need(m.lambda > 0.0, "monitors.lambda=" + fmt(m.lambda) + " must be > 0");
  need(m.lambda_tilde >= m.lambda,
       "monitors.lambda_tilde=" + fmt(m.lambda_tilde) + " must be >= lambda");
  need(m.eps1 > 0.0, "monitors.eps1 must be > 0");
  need(m.bootstrap_c1 > 0.0, "monitors.bootstrap_c1 must be > 0");
  need(m.smallness_c1 > 0.0, "monitors.smallness_c1 must be > 0");
  need(m.eps0 > 0.0, "monitors.eps0 must be > 0");
  need(m.blowup_ceiling > 0.0, "monitors.blowup_ceiling must be > 0");
  need(m.lemma_samples >= 1, "monitors.lemma_samples must be >= 1");
  need(m.product_ceiling >= 0.0, "monitors.product_ceiling must be >= 0");
  need(m.composition_ceiling >= 0.0, "monitors.composition_ceiling must be >= 0");

  const auto& s = c.stepping;
  need(s.dt > 0.0, "stepping.dt=" + fmt(s.dt) + " must be > 0");
  need(s.t_final >= 0.0, "stepping.t_final=" + fmt(s.t_final) + " must be >= 0");
  need(s.snapshot_every >= 1, "stepping.snapshot_every must be >= 1");
  need(s.cfl > 0.0, "stepping.cfl must be > 0");
  need(s.workers >= 1, "stepping.workers must be >= 1");
  if (mode == Mode::SelfConvergence) {
    need(s.dt_list.size() >= 3, "stepping.dt_list needs at least 3 entries");
    for (std::size_t i = 1; i < s.dt_list.size(); ++i)
      need(std::abs(s.dt_list[i] - 0.5 * s.dt_list[i - 1]) <= 1e-12 * s.dt_list[i - 1],
           "stepping.dt_list must be a halving sequence (entry " + fmt(i) + ")");
  }

  // Analytic weights up to e^{a(1+|xi|_max)} must stay within the exponent guard.
  if (c.grid.nh >= 4 && c.grid.lh > 0.0) {
    const double xi_max = 2.0 * std::numbers::pi / c.grid.lh * (c.grid.nh / 2) *
                          (c.grid.dh == 2 ? std::sqrt(2.0) : 1.0);
    need(m.radius_a * (1.0 + xi_max) <= 700.0,
         "monitors.radius_a=" + fmt(m.radius_a) +
             " makes the analytic weight exponent exceed 700 on this grid");
  }
  return out;
}

SpectralField default_initial_velocity(const Grid& grid, double delta) {
  const double k = 2.0 * std::numbers::pi / grid.lh();
  const auto phys = sample(grid, [&](double x1, double, double y) {
    return delta * std::sin(k * x1) * std::sin(y);
  });
  auto first = to_spectral(phys);
  SpectralField u(grid, grid.horizontal_dims());
  u.assign(0, first);
  return u;
}

}  // namespace hydrob
