#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hydrob/constitutive.hpp"
#include "hydrob/grid.hpp"

namespace hydrob {

enum class Mode { Limit, Eps, Convergence, Lemmas, SelfConvergence };

std::string_view to_string(Mode mode);
/// Throws std::invalid_argument for an unknown name.
Mode parse_mode(std::string_view name);

/// Every tunable of a run. Section names mirror the configuration file.
struct RunConfig {
  struct GridSection {
    int dh = 1;
    int nh = 32;
    int ny = 32;
    double lh = 2.0 * std::numbers::pi;

    bool operator==(const GridSection&) const = default;
  } grid;

  struct ParamsSection {
    double theta = 0.5;
    double b = 0.3;
    double eps = 0.1;
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    double delta = 0.01;  // initial amplitude
    std::uint64_t seed = 20240607;

    bool operator==(const ParamsSection&) const = default;
  } params;

  struct MonitorsSection {
    double s1 = 2.6;
    double s2 = 1.6;
    double radius_a = 0.1;
    double kappa = 0.25;
    double lambda = 1.0;  // keeps a - lambda*eta > a/2 on small data
    double lambda_tilde = 4.0;
    double eps1 = 1e-2;          // bootstrap smallness threshold
    double bootstrap_c1 = 10.0;  // C_1 in min{eps1, 1/(16 C_1)}
    double smallness_c1 = 1.0;   // c_1 in the 100 c_1 a hypothesis bound
    double eps0 = 1e-2;          // composition-lemma amplitude ceiling
    double blowup_ceiling = 1e6;
    bool assert_mode = false;
    int lemma_samples = 100;
    double product_ceiling = 0.0;      // 0 selects the built-in default
    double composition_ceiling = 0.0;  // 0 selects the built-in default

    bool operator==(const MonitorsSection&) const = default;
  } monitors;

  struct SteppingSection {
    double dt = 1e-3;
    double t_final = 1.0;
    int snapshot_every = 10;
    std::vector<double> dt_list{4e-3, 2e-3, 1e-3};
    double cfl = 0.5;
    int workers = 1;

    bool operator==(const SteppingSection&) const = default;
  } stepping;

  struct OutputSection {
    std::string dir = "out";

    bool operator==(const OutputSection&) const = default;
  } output;

  Grid make_grid() const { return Grid(grid.dh, grid.nh, grid.ny, grid.lh); }
  MaterialParams material() const { return MaterialParams(params.theta, params.b); }

  bool operator==(const RunConfig&) const = default;
};

/// Every violated range constraint for `mode`, one message per violation.
/// Empty when the configuration is valid.
std::vector<std::string> validate(const RunConfig& config, Mode mode);

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string message, std::vector<std::string> issues = {});
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Default initial velocity delta sin(2 pi x1 / L_h) sin(y) in the first
/// horizontal component; vertical mean zero.
SpectralField default_initial_velocity(const Grid& grid, double delta);

}  // namespace hydrob
