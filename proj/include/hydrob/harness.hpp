#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hydrob/eps_solver.hpp"

namespace hydrob {

// ---------------------------------------------------------------- rate study

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // log(C) in error ~ C eps^slope
  double residual = 0.0;   // root-mean-square log residual
};

/// Least squares of log(error) against log(eps). Throws std::invalid_argument
/// for fewer than two points, mismatched lengths or nonpositive entries.
RateFit fit_rate(std::span<const double> eps, std::span<const double> error);

struct RatePoint {
  double eps = 0.0;
  double velocity_error = 0.0;  // sup_t ||e^{a/4 <D>} (u^R, eps v^R)||_{H^{s1-1,s2-1}}
  double stress_error = 0.0;    // sup_t ||e^{a/2 <D>} sqrt(eps) tau^R||_{H^{s1-1,s2-1}}
  double error = 0.0;           // sum of the two
  RunStatus status = RunStatus::Completed;
  std::string failure;
  EpsHypothesis hypothesis;
  double max_divergence = 0.0;
  double zeta_final = 0.0;
  double phi_radius_min = 0.0;
  bool zeta_monotone = true;
  bool sandwich_ok = true;
};

struct RateStudy {
  std::vector<RatePoint> points;
  bool complete = true;         // every run finished
  std::string failure;
  bool degenerate = false;      // all errors vanish: slope undefined
  RateFit fit;                  // total error
  RateFit velocity_fit;
  RateFit stress_fit;
  bool errors_decreasing = false;
  // limit-run diagnostics over the same horizon
  double limit_energy_ratio = 0.0;
  double limit_min_psi_radius = 0.0;
  double limit_max_divergence = 0.0;
  bool limit_eta_monotone = true;
  RunStatus limit_status = RunStatus::Completed;
};

struct ConvergenceOptions {
  /// Test hook: replace every eps trajectory by the limit trajectory and its
  /// closure stresses, so every error vanishes identically.
  bool null_experiment = false;
};

/// Limit run once, eps run per entry of `eps_list` on the same initial data,
/// errors evaluated at every output step. Runs fan out over
/// stepping.workers threads; results are assembled in list order.
RateStudy convergence_study(const RunConfig& config, std::span<const double> eps_list,
                            const ConvergenceOptions& options = {});

// ---------------------------------------------------------------- random data

/// Complex Gaussian coefficients with amplitude <xi>^{-(s1+2)} <k>^{-(s2+2)}
/// inside the 2/3 band, Hermitian-symmetrized (real in physical space).
SpectralField random_field(const Grid& grid, int ncomp, double s1, double s2,
                           std::mt19937_64& rng);

/// Pointwise product, dealiased.
SpectralField multiply(const SpectralField& a, const SpectralField& b);

// ---------------------------------------------------------------- lemma checks

struct LemmaReport {
  std::string name;
  int samples = 0;
  int skipped = 0;
  std::vector<double> ratios;  // per sample; magnitude check stores worst lhs/rhs
  double max_ratio = 0.0;
  double ceiling = 0.0;        // 0 when the check has no ceiling
  int violations = 0;
  bool pass = false;
};

/// Per-mode |F((ab)_Psi)| <= F(a+_Psi b+_Psi) on the retained band, slack
/// 1e-12 max(1, rhs).
LemmaReport lemma_magnitude_check(const Grid& grid, int samples, double s1, double s2,
                                  double r, std::uint64_t seed);

/// ||(fg)_Psi|| / (||f_Psi|| ||g_Psi||) over random pairs, H^{s1,s2}.
LemmaReport lemma_product_check(const Grid& grid, int samples, double s1, double s2, double r,
                                std::uint64_t seed, double ceiling);

enum class Composition { G1, G2 };

/// f(z) = 1/(1+sigma z) - 1 (G1) or 1/(1+sigma z)^2 - 1 (G2).
double composition_value(Composition f, double z, double sigma);
/// |f'(0)|: sigma for G1, 2 sigma for G2.
double composition_slope(Composition f, double sigma);

/// ||f(b)_Psi|| / ||b_Psi|| with every sample rescaled to ||b_Psi|| = amplitude.
LemmaReport lemma_composition_check(const Grid& grid, int samples, Composition f,
                                    double sigma, double amplitude, double s1, double s2,
                                    double r, std::uint64_t seed, double ceiling);

/// Margins of the Poincare check over random vertical-mean-free fields.
LemmaReport poincare_suite(const Grid& grid, int samples, double kappa, double s1, double s2,
                           double r, std::uint64_t seed);

// Ceilings used when the configuration leaves them at 0: three times the
// largest ratio observed at the reference seed and default grid.
inline constexpr double kDefaultProductCeiling = 3.0 * 1.0317;
inline constexpr double kDefaultCompositionCeiling = 3.0 * 0.9194;

struct LemmaSuite {
  LemmaReport magnitude;
  LemmaReport product_coarse;  // N
  LemmaReport product_fine;    // 2N
  double product_drift = 0.0;  // |max_fine / max_coarse - 1|
  bool product_stable = false;
  LemmaReport composition;        // G1 at amplitude eps0
  LemmaReport composition_small;  // G1 at amplitude 1e-4
  double composition_small_error = 0.0;  // |ratio / sigma - 1|
  LemmaReport composition_g2;     // G2 at amplitude 1e-4
  LemmaReport poincare;
  bool pass() const;
};

LemmaSuite lemma_suite(const RunConfig& config);

// ---------------------------------------------------------------- self-convergence

struct SelfConvergence {
  std::vector<double> dt;
  std::vector<double> differences;  // ||x_{dt_i} - x_{dt_{i+1}}|| at t_final
  double order = 0.0;               // log2 of the last two differences' ratio
  bool degenerate = false;
  bool complete = true;
  std::string failure;
};

enum class Solver { Limit, Eps };

/// Final-state differences over a halving dt sequence. The eps solver uses
/// params.eps and compares (u, v, tau). With `freeze_velocity` the eps run
/// starts from zero velocity and a random stress (seeded by params.seed), so
/// only the exact relaxation acts and the report comes back degenerate.
SelfConvergence self_convergence(const RunConfig& config, std::span<const double> dt_list,
                                 Solver solver, bool freeze_velocity = false);

/// Frozen zero velocity, random initial stress: max |tau(T) - e^{-T/eps} tau0|
/// relative to max |e^{-T/eps} tau0| after `steps` equal steps.
double relaxation_decay_error(const Grid& grid, double eps, double t_final, int steps,
                              const MaterialParams& material, std::uint64_t seed);

}  // namespace hydrob
