#ifndef RAIDPH_FIT_HPP
#define RAIDPH_FIT_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <variant>

#include "raidph/phase_type.hpp"
#include "raidph/weibull.hpp"

namespace raidph {

// Burn-in / working / failed chain: alpha is the failure rate during
// burn-in, sigma the rate into the working state, beta the failure rate
// afterwards. Absorption time of the chain approximates the target
// failure distribution.
struct ThreeStateParams {
  double alpha = 0.0;
  double sigma = 0.0;
  double beta = 0.0;

  void validate() const;
};

struct ErlangSpec {
  int stages = 1;
  double rate = 1.0;  // per hour

  double mean() const { return stages / rate; }
  void validate() const;
};

// Feed-forward chain of three transient phases with per-phase failure
// exits; five free rates.
struct FourStateParams {
  double advance1 = 0.0;  // phase 1 -> 2
  double advance2 = 0.0;  // phase 2 -> 3
  double fail1 = 0.0;
  double fail2 = 0.0;
  double fail3 = 0.0;

  void validate() const;
};

PhaseTypeSpec to_phase_type(const ThreeStateParams& p);
PhaseTypeSpec to_phase_type(const ErlangSpec& e);
PhaseTypeSpec to_phase_type(const FourStateParams& p);

// ---------------------------------------------------------------------------
// Three-state closed forms.

double three_state_pdf(const ThreeStateParams& p, double t);
double three_state_cdf(const ThreeStateParams& p, double t);
double three_state_hazard(const ThreeStateParams& p, double t);

// d/dt of the hazard. Nonnegative and decreasing for beta > alpha, so the
// hazard flattens out; its limit is min(beta, sigma + alpha).
double three_state_hazard_slope(const ThreeStateParams& p, double t);
double three_state_hazard_limit(const ThreeStateParams& p);

// ---------------------------------------------------------------------------
// Moment-matching fit of the three-state chain.

enum class FitErrorKind {
  complex_discriminant,  // discriminant of the closed form is negative
  negative_rate,         // a real solution exists but some rate is <= 0
};

// Infeasible closed-form solution. Carries the raw (possibly complex)
// values of both solution branches so a caller can repair them.
struct FitError {
  FitErrorKind kind = FitErrorKind::negative_rate;
  std::complex<double> alpha;  // identical in both branches
  std::complex<double> sigma_plus, beta_plus;
  std::complex<double> sigma_minus, beta_minus;
  double discriminant = 0.0;

  const char* kind_name() const;
};

// The two +/- solution branches. Both describe the same absorption-time
// density: the exponential rate pair {beta, sigma+alpha} is swapped
// between them.
struct ThreeStateFit {
  ThreeStateParams plus;
  ThreeStateParams minus;
};

using ThreeStateFitResult = std::variant<ThreeStateFit, FitError>;

// Closed-form solution of the moment equations for (alpha, sigma, beta).
ThreeStateFitResult fit_three_state(const MomentTriple& m);

// Turn an infeasible solution into a usable model: take real parts, clamp
// rates to a 1e-12/h floor, then rescale all rates by one factor so the
// repaired chain's first moment equals m.mu1 exactly.
ThreeStateParams repair_infeasible_fit(const FitError& err,
                                       const MomentTriple& m);

// Mean-matching Erlang fit: rate = stages / mu1(target).
ErlangSpec fit_erlang(int stages, const WeibullSpec& target);

// ---------------------------------------------------------------------------
// Four-state hazard-curve fit.

struct FourStateFitOptions {
  int starts = 16;
  int max_iterations = 200;
  double param_tolerance = 1e-10;  // relative parameter change
  std::uint64_t seed = 20240917;
  // Relative-mean penalty keeping the fitted mu1 near the target mu1;
  // expressed in units of the mean grid hazard.
  double mu1_penalty_weight = 1.0;
};

struct FitNonConvergence : std::runtime_error {
  explicit FitNonConvergence(double residual);
  double best_residual;
};

// Least-squares match of the chain's hazard to the target Weibull hazard
// on a uniform grid over (0, horizon], multi-start Levenberg-Marquardt in
// log-rate space seeded from the three-state solution.
FourStateParams fit_four_state(const WeibullSpec& target, double horizon,
                               int grid,
                               const FourStateFitOptions& options = {});

double four_state_hazard(const FourStateParams& p, double t);
double four_state_mu1(const FourStateParams& p);
double four_state_hazard_limit(const FourStateParams& p);

// ---------------------------------------------------------------------------
// Fit quality.

struct DeviationBand {
  double max_excess = 0.0;   // max of approximate CDF - target CDF, >= 0
  double min_deficit = 0.0;  // min of the same difference, <= 0
};

DeviationBand cdf_deviation(const ThreeStateParams& p,
                            const WeibullSpec& target, double horizon,
                            int grid_points = 10000);
DeviationBand cdf_deviation(const FourStateParams& p,
                            const WeibullSpec& target, double horizon,
                            int grid_points = 10000);

using FitParams = std::variant<ThreeStateParams, ErlangSpec, FourStateParams>;

struct FitReport {
  FitParams params;
  WeibullSpec target;
  double max_cdf_excess = 0.0;   // >= 0, approximate CDF minus target CDF
  double min_cdf_deficit = 0.0;  // <= 0
  double hazard_limit = 0.0;     // long-run hazard of the fitted model
  bool repaired = false;
  // second solution branch, present for feasible three-state fits
  std::optional<ThreeStateParams> minus_branch;
};

// Fit-and-package helpers: parameters, CDF deviation band over the given
// horizon, hazard limit and the repair flag in one report.
// Three-state infeasibility is repaired (and flagged) when allow_repair
// is set, otherwise the FitError comes back unchanged.
std::variant<FitReport, FitError> three_state_fit_report(
    const WeibullSpec& target, bool allow_repair, double horizon = 87600.0);
FitReport four_state_fit_report(const WeibullSpec& target,
                                double horizon = 87600.0, int grid = 200);
// covers the exact-exponential plan as stages = 1
FitReport erlang_fit_report(int stages, const WeibullSpec& target);

}  // namespace raidph

#endif
