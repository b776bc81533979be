#include "raidph/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "raidph/detail/dense.hpp"
#include "raidph/rng.hpp"

namespace raidph {

void ThreeStateParams::validate() const {
  if (!(alpha > 0.0) || !(sigma > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("ThreeStateParams: all rates must be > 0");
  }
}

void ErlangSpec::validate() const {
  if (stages < 1) throw std::invalid_argument("ErlangSpec: stages must be >= 1");
  if (!(rate > 0.0)) throw std::invalid_argument("ErlangSpec: rate must be > 0");
}

void FourStateParams::validate() const {
  if (!(advance1 > 0.0) || !(advance2 > 0.0) || !(fail1 > 0.0) ||
      !(fail2 > 0.0) || !(fail3 > 0.0)) {
    throw std::invalid_argument("FourStateParams: all rates must be > 0");
  }
}

PhaseTypeSpec to_phase_type(const ThreeStateParams& p) {
  p.validate();
  PhaseTypeSpec ph;
  ph.phases = 2;
  ph.initial = {1.0, 0.0};
  ph.subgen = {-(p.sigma + p.alpha), p.sigma,  //
               0.0, -p.beta};
  return ph;
}

PhaseTypeSpec to_phase_type(const ErlangSpec& e) {
  e.validate();
  PhaseTypeSpec ph;
  const std::size_t k = static_cast<std::size_t>(e.stages);
  ph.phases = k;
  ph.initial.assign(k, 0.0);
  ph.initial[0] = 1.0;
  ph.subgen.assign(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    ph.rate(i, i) = -e.rate;
    if (i + 1 < k) ph.rate(i, i + 1) = e.rate;
  }
  return ph;
}

PhaseTypeSpec to_phase_type(const FourStateParams& p) {
  p.validate();
  PhaseTypeSpec ph;
  ph.phases = 3;
  ph.initial = {1.0, 0.0, 0.0};
  ph.subgen = {-(p.advance1 + p.fail1), p.advance1, 0.0,   //
               0.0, -(p.advance2 + p.fail2), p.advance2,  //
               0.0, 0.0, -p.fail3};
  return ph;
}

// ---------------------------------------------------------------------------
// Three-state closed forms.

namespace {

bool confluent(const ThreeStateParams& p) {
  return std::fabs(p.sigma + p.alpha - p.beta) <=
         1e-12 * (p.sigma + p.alpha + p.beta);
}

}  // namespace

double three_state_pdf(const ThreeStateParams& p, double t) {
  p.validate();
  if (t < 0.0) throw std::invalid_argument("three_state_pdf: t must be >= 0");
  if (confluent(p)) {
    const double r = p.beta;
    return (p.alpha + p.sigma * r * t) * std::exp(-r * t);
  }
  const double d = p.sigma + p.alpha - p.beta;
  return (p.beta * p.sigma * std::exp(-p.beta * t) +
          (p.alpha - p.beta) * (p.sigma + p.alpha) *
              std::exp(-(p.sigma + p.alpha) * t)) /
         d;
}

double three_state_cdf(const ThreeStateParams& p, double t) {
  p.validate();
  if (t < 0.0) throw std::invalid_argument("three_state_cdf: t must be >= 0");
  if (confluent(p)) {
    const double r = p.beta;
    return 1.0 - std::exp(-r * t) * (1.0 + p.sigma * t);
  }
  const double d = p.sigma + p.alpha - p.beta;
  return 1.0 - (p.sigma * std::exp(-p.beta * t) +
                (p.alpha - p.beta) * std::exp(-(p.sigma + p.alpha) * t)) /
                   d;
}

double three_state_hazard(const ThreeStateParams& p, double t) {
  const double surv = 1.0 - three_state_cdf(p, t);
  return three_state_pdf(p, t) / surv;
}

double three_state_hazard_slope(const ThreeStateParams& p, double t) {
  p.validate();
  if (t < 0.0) {
    throw std::invalid_argument("three_state_hazard_slope: t must be >= 0");
  }
  if (confluent(p)) {
    const double g = 1.0 + p.sigma * t;
    return p.sigma * p.sigma / (g * g);
  }
  const double d = p.sigma + p.alpha - p.beta;
  const double numer = p.sigma * (p.beta - p.alpha) *
                       std::exp(-(p.sigma + p.alpha + p.beta) * t);
  const double surv = p.sigma / d * std::exp(-p.beta * t) +
                      (p.alpha - p.beta) / d *
                          std::exp(-(p.sigma + p.alpha) * t);
  return numer / (surv * surv);
}

double three_state_hazard_limit(const ThreeStateParams& p) {
  return std::min(p.beta, p.sigma + p.alpha);
}

// ---------------------------------------------------------------------------
// Moment matching.

namespace {

struct ClosedForm {
  std::complex<double> alpha, sigma_plus, beta_plus, sigma_minus, beta_minus;
  double discriminant;
};

// The closed-form solution of the moment equations in terms of the mean,
// the variance and the third central moment.
ClosedForm closed_form(double c1, double c2, double c3) {
  const double c1_2 = c1 * c1;
  const double c1_3 = c1_2 * c1;
  const double x = -2.0 * c1_3 * c1_3 + 6.0 * c1_2 * c1_2 * c2 -
                   18.0 * c1_2 * c2 * c2 + 18.0 * c2 * c2 * c2 +
                   8.0 * c1_3 * c3 - 12.0 * c1 * c2 * c3 + c3 * c3;
  const double y = c1_2 * c1_2 + 3.0 * c2 * c2 - 2.0 * c1 * c3;
  const std::complex<double> sqrt_x = std::sqrt(std::complex<double>(x, 0.0));
  ClosedForm cf;
  cf.discriminant = x;
  cf.alpha = -2.0 * (c1_3 - 3.0 * c1 * c2 + c3) / y;
  cf.sigma_plus = (4.0 * c1_3 - 6.0 * c1 * c2 + c3 + sqrt_x) / y;
  cf.beta_plus = (2.0 * c1_3 - c3 - sqrt_x) / y;
  cf.sigma_minus = (4.0 * c1_3 - 6.0 * c1 * c2 + c3 - sqrt_x) / y;
  cf.beta_minus = (2.0 * c1_3 - c3 + sqrt_x) / y;
  return cf;
}

FitError make_error(FitErrorKind kind, const ClosedForm& cf) {
  FitError err;
  err.kind = kind;
  err.alpha = cf.alpha;
  err.sigma_plus = cf.sigma_plus;
  err.beta_plus = cf.beta_plus;
  err.sigma_minus = cf.sigma_minus;
  err.beta_minus = cf.beta_minus;
  err.discriminant = cf.discriminant;
  return err;
}

double three_state_mu1(double alpha, double sigma, double beta) {
  const double a = sigma + alpha;
  return 1.0 / a + (sigma / a) / beta;
}

}  // namespace

const char* FitError::kind_name() const {
  return kind == FitErrorKind::complex_discriminant ? "complex_discriminant"
                                                    : "negative_rate";
}

ThreeStateFitResult fit_three_state(const MomentTriple& m) {
  m.validate();
  const double c1 = m.mu1;
  const double c2 = m.mu2 - m.mu1 * m.mu1;
  const double c3 = m.mu3 - 3.0 * m.mu1 * m.mu2 + 2.0 * m.mu1 * m.mu1 * m.mu1;

  // Exponential-consistent moments sit exactly on the degenerate boundary
  // of the closed form (X = Y = 0 up to rounding); evaluating it on the
  // raw moments instead gives finite, stably negative rates to repair.
  const bool exponential_boundary =
      std::fabs(c2 - c1 * c1) <= 1e-9 * c1 * c1 &&
      std::fabs(c3 - 2.0 * c1 * c1 * c1) <= 2e-9 * c1 * c1 * c1;
  const double y_scale =
      c1 * c1 * c1 * c1 + 3.0 * c2 * c2 + 2.0 * std::fabs(c1 * c3);
  const double y = c1 * c1 * c1 * c1 + 3.0 * c2 * c2 - 2.0 * c1 * c3;
  if (exponential_boundary || std::fabs(y) <= 1e-12 * y_scale) {
    return make_error(FitErrorKind::negative_rate,
                      closed_form(m.mu1, m.mu2, m.mu3));
  }

  const ClosedForm cf = closed_form(c1, c2, c3);
  if (cf.discriminant < 0.0) {
    return make_error(FitErrorKind::complex_discriminant, cf);
  }
  const double rates[5] = {cf.alpha.real(), cf.sigma_plus.real(),
                           cf.beta_plus.real(), cf.sigma_minus.real(),
                           cf.beta_minus.real()};
  for (double r : rates) {
    if (!(r > 0.0)) {
      return make_error(FitErrorKind::negative_rate, cf);
    }
  }
  ThreeStateFit fit;
  fit.plus = ThreeStateParams{cf.alpha.real(), cf.sigma_plus.real(),
                              cf.beta_plus.real()};
  fit.minus = ThreeStateParams{cf.alpha.real(), cf.sigma_minus.real(),
                               cf.beta_minus.real()};
  return fit;
}

ThreeStateParams repair_infeasible_fit(const FitError& err,
                                       const MomentTriple& m) {
  m.validate();
  constexpr double kFloor = 1e-12;
  const auto clamp = [](double v) { return v > kFloor ? v : kFloor; };
  const auto positives = [](double a, double s, double b) {
    return (a > 0.0 ? 1 : 0) + (s > 0.0 ? 1 : 0) + (b > 0.0 ? 1 : 0);
  };
  const double a_re = err.alpha.real();
  const int plus_score =
      positives(a_re, err.sigma_plus.real(), err.beta_plus.real());
  const int minus_score =
      positives(a_re, err.sigma_minus.real(), err.beta_minus.real());
  double sigma_re, beta_re;
  if (minus_score > plus_score) {
    sigma_re = err.sigma_minus.real();
    beta_re = err.beta_minus.real();
  } else {
    sigma_re = err.sigma_plus.real();
    beta_re = err.beta_plus.real();
  }
  double a = clamp(a_re);
  double s = clamp(sigma_re);
  double b = clamp(beta_re);
  if (a == b) {
    // With alpha = beta the absorption time is exactly exponential with
    // rate beta no matter what sigma is; canonicalize sigma so the
    // rescale below cannot strand it at an extreme magnitude.
    s = a;
  }
  const double factor = three_state_mu1(a, s, b) / m.mu1;
  ThreeStateParams repaired{a * factor, s * factor, b * factor};
  repaired.validate();
  return repaired;
}

ErlangSpec fit_erlang(int stages, const WeibullSpec& target) {
  if (stages < 1) throw std::invalid_argument("fit_erlang: stages must be >= 1");
  const MomentTriple m = weibull_moments(target);
  return ErlangSpec{stages, stages / m.mu1};
}

// ---------------------------------------------------------------------------
// Four-state hazard fit.

namespace {

void coxian_surv_pdf(const FourStateParams& p, double t, double& surv,
                     double& pdf) {
  std::vector<double> at = {-(p.advance1 + p.fail1) * t,
                            p.advance1 * t,
                            0.0,
                            0.0,
                            -(p.advance2 + p.fail2) * t,
                            p.advance2 * t,
                            0.0,
                            0.0,
                            -p.fail3 * t};
  const auto e = detail::expm(std::move(at), 3);
  // started in phase 0
  surv = e[0] + e[1] + e[2];
  pdf = e[0] * p.fail1 + e[1] * p.fail2 + e[2] * p.fail3;
}

FourStateParams from_log(const double* lp) {
  const auto r = [&](int i) { return std::exp(std::clamp(lp[i], -80.0, 20.0)); };
  return FourStateParams{r(0), r(1), r(2), r(3), r(4)};
}

}  // namespace

double four_state_hazard(const FourStateParams& p, double t) {
  double surv, pdf;
  coxian_surv_pdf(p, t, surv, pdf);
  return pdf / surv;
}

double four_state_mu1(const FourStateParams& p) {
  // expected absorption time, walking the feed-forward chain
  const double e3 = 1.0 / p.fail3;
  const double e2 = (1.0 + p.advance2 * e3) / (p.advance2 + p.fail2);
  return (1.0 + p.advance1 * e2) / (p.advance1 + p.fail1);
}

double four_state_hazard_limit(const FourStateParams& p) {
  return std::min({p.advance1 + p.fail1, p.advance2 + p.fail2, p.fail3});
}

FitNonConvergence::FitNonConvergence(double residual)
    : std::runtime_error("fit_four_state failed to converge; best residual " +
                         std::to_string(residual)),
      best_residual(residual) {}

FourStateParams fit_four_state(const WeibullSpec& target, double horizon,
                               int grid, const FourStateFitOptions& options) {
  target.validate();
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("fit_four_state: horizon must be > 0");
  }
  if (grid < 5) throw std::invalid_argument("fit_four_state: grid too small");

  std::vector<double> ts(grid), hz(grid);
  double hz_mean = 0.0;
  for (int i = 0; i < grid; ++i) {
    ts[i] = (i + 1) * horizon / grid;
    hz[i] = weibull_eval(target, ts[i], WhichCurve::hazard);
    hz_mean += hz[i];
  }
  hz_mean /= grid;
  const double mu1_target = weibull_moments(target).mu1;
  const double mu1_weight = options.mu1_penalty_weight * hz_mean;

  const int nres = grid + 1;
  const auto residuals = [&](const double* lp, std::vector<double>& r) {
    const FourStateParams p = from_log(lp);
    for (int i = 0; i < grid; ++i) {
      double surv, pdf;
      coxian_surv_pdf(p, ts[i], surv, pdf);
      if (!(surv > 1e-290) || !std::isfinite(pdf)) return false;
      r[i] = pdf / surv - hz[i];
    }
    r[grid] = mu1_weight * (four_state_mu1(p) / mu1_target - 1.0);
    for (int i = 0; i < nres; ++i) {
      if (!std::isfinite(r[i])) return false;
    }
    return true;
  };
  const auto cost_of = [&](std::vector<double>& r) {
    double c = 0.0;
    for (double v : r) c += v * v;
    return c;
  };

  // Starting point from the three-state solution (repaired if needed).
  ThreeStateParams seed3{};
  const MomentTriple m = weibull_moments(target);
  const ThreeStateFitResult three = fit_three_state(m);
  if (std::holds_alternative<ThreeStateFit>(three)) {
    seed3 = std::get<ThreeStateFit>(three).plus;
  } else {
    seed3 = repair_infeasible_fit(std::get<FitError>(three), m);
  }
  const double base[5] = {std::log(seed3.sigma), std::log(seed3.sigma),
                          std::log(seed3.alpha),
                          std::log(0.5 * (seed3.alpha + seed3.beta)),
                          std::log(seed3.beta)};

  RngStream rng(options.seed);
  double best_cost = std::numeric_limits<double>::infinity();
  double best_lp[5] = {0, 0, 0, 0, 0};
  bool found = false;

  std::vector<double> r(nres), r_try(nres), jac(nres * 5);
  for (int start = 0; start < options.starts; ++start) {
    double lp[5];
    for (int i = 0; i < 5; ++i) {
      const double u1 = rng.uniform01();
      const double u2 = rng.uniform01();
      const double gauss =
          std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      lp[i] = base[i] + (start == 0 ? 0.0 : gauss);
    }
    if (!residuals(lp, r)) continue;
    double cost = cost_of(r);
    double lambda = 1e-3;
    for (int iter = 0; iter < options.max_iterations; ++iter) {
      // central-difference Jacobian in log space
      for (int col = 0; col < 5; ++col) {
        const double h = 1e-6;
        double lp_hi[5], lp_lo[5];
        std::copy(lp, lp + 5, lp_hi);
        std::copy(lp, lp + 5, lp_lo);
        lp_hi[col] += h;
        lp_lo[col] -= h;
        std::vector<double> r_hi(nres), r_lo(nres);
        if (!residuals(lp_hi, r_hi) || !residuals(lp_lo, r_lo)) {
          r_hi = r;
          r_lo = r;
        }
        for (int row = 0; row < nres; ++row) {
          jac[row * 5 + col] = (r_hi[row] - r_lo[row]) / (2.0 * h);
        }
      }
      bool stepped = false;
      for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
        // (J^T J + lambda diag(J^T J)) delta = -J^T r
        std::vector<double> jtj(25, 0.0), jtr(5, 0.0);
        for (int row = 0; row < nres; ++row) {
          for (int a = 0; a < 5; ++a) {
            jtr[a] += jac[row * 5 + a] * r[row];
            for (int b = 0; b < 5; ++b) {
              jtj[a * 5 + b] += jac[row * 5 + a] * jac[row * 5 + b];
            }
          }
        }
        for (int a = 0; a < 5; ++a) {
          jtj[a * 5 + a] += lambda * std::max(jtj[a * 5 + a], 1e-30);
        }
        std::vector<double> delta(5);
        for (int a = 0; a < 5; ++a) delta[a] = -jtr[a];
        try {
          detail::lu_solve(jtj, 5, delta);
        } catch (const std::domain_error&) {
          lambda *= 10.0;
          continue;
        }
        double lp_try[5];
        for (int a = 0; a < 5; ++a) lp_try[a] = lp[a] + delta[a];
        if (residuals(lp_try, r_try)) {
          const double cost_try = cost_of(r_try);
          if (cost_try < cost) {
            double rel_change = 0.0;
            for (int a = 0; a < 5; ++a) {
              rel_change = std::max(
                  rel_change, std::fabs(delta[a]) / (std::fabs(lp[a]) + 1.0));
            }
            std::copy(lp_try, lp_try + 5, lp);
            r = r_try;
            cost = cost_try;
            lambda = std::max(lambda * 0.3, 1e-12);
            stepped = true;
            if (rel_change < options.param_tolerance) {
              iter = options.max_iterations;  // converged
            }
            break;
          }
        }
        lambda *= 10.0;
      }
      if (!stepped) break;
    }
    if (cost < best_cost) {
      best_cost = cost;
      std::copy(lp, lp + 5, best_lp);
      found = true;
    }
  }
  if (!found || !std::isfinite(best_cost)) {
    throw FitNonConvergence(best_cost);
  }
  FourStateParams best = from_log(best_lp);
  best.validate();
  return best;
}

// ---------------------------------------------------------------------------
// CDF deviation.

namespace {

template <typename Cdf>
DeviationBand deviation_impl(Cdf&& approx_cdf, const WeibullSpec& target,
                             double horizon, int grid_points) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("cdf_deviation: horizon must be > 0");
  }
  DeviationBand band;
  for (int i = 0; i <= grid_points; ++i) {
    const double t = horizon * i / grid_points;
    const double diff = approx_cdf(t) - weibull_eval(target, t, WhichCurve::cdf);
    band.max_excess = std::max(band.max_excess, diff);
    band.min_deficit = std::min(band.min_deficit, diff);
  }
  return band;
}

}  // namespace

DeviationBand cdf_deviation(const ThreeStateParams& p,
                            const WeibullSpec& target, double horizon,
                            int grid_points) {
  return deviation_impl([&](double t) { return three_state_cdf(p, t); },
                        target, horizon, grid_points);
}

DeviationBand cdf_deviation(const FourStateParams& p,
                            const WeibullSpec& target, double horizon,
                            int grid_points) {
  return deviation_impl(
      [&](double t) {
        double surv, pdf;
        coxian_surv_pdf(p, t, surv, pdf);
        return 1.0 - surv;
      },
      target, horizon, grid_points);
}

// ---------------------------------------------------------------------------
// Fit reports.

std::variant<FitReport, FitError> three_state_fit_report(
    const WeibullSpec& target, bool allow_repair, double horizon) {
  const MomentTriple m = weibull_moments(target);
  const ThreeStateFitResult result = fit_three_state(m);
  FitReport report;
  report.target = target;
  if (std::holds_alternative<ThreeStateFit>(result)) {
    const ThreeStateFit& fit = std::get<ThreeStateFit>(result);
    report.params = fit.plus;
    report.minus_branch = fit.minus;
    report.hazard_limit = three_state_hazard_limit(fit.plus);
    const DeviationBand band = cdf_deviation(fit.plus, target, horizon);
    report.max_cdf_excess = band.max_excess;
    report.min_cdf_deficit = band.min_deficit;
    return report;
  }
  const FitError& err = std::get<FitError>(result);
  if (!allow_repair) {
    return err;
  }
  const ThreeStateParams repaired = repair_infeasible_fit(err, m);
  report.params = repaired;
  report.repaired = true;
  report.hazard_limit = three_state_hazard_limit(repaired);
  const DeviationBand band = cdf_deviation(repaired, target, horizon);
  report.max_cdf_excess = band.max_excess;
  report.min_cdf_deficit = band.min_deficit;
  return report;
}

FitReport four_state_fit_report(const WeibullSpec& target, double horizon,
                                int grid) {
  const FourStateParams p = fit_four_state(target, horizon, grid);
  FitReport report;
  report.target = target;
  report.params = p;
  report.hazard_limit = four_state_hazard_limit(p);
  const DeviationBand band = cdf_deviation(p, target, horizon);
  report.max_cdf_excess = band.max_excess;
  report.min_cdf_deficit = band.min_deficit;
  return report;
}

FitReport erlang_fit_report(int stages, const WeibullSpec& target) {
  const ErlangSpec e = fit_erlang(stages, target);
  FitReport report;
  report.target = target;
  report.params = e;
  // the Erlang hazard rises from zero toward its stage rate
  report.hazard_limit = e.rate;
  return report;
}

}  // namespace raidph
