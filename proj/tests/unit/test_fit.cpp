#include <cmath>
#include <limits>
#include <variant>

#include "doctest.h"
#include "raidph/fit.hpp"
#include "raidph/rng.hpp"
#include "test_helpers.hpp"

using namespace raidph;

namespace {

const WeibullSpec kTtop{1.12, 461386.0, 0.0};
const WeibullSpec kTtr{2.0, 12.0, 6.0};
const WeibullSpec kTtscr{3.0, 168.0, 6.0};

ThreeStateFit fit_or_fail(const MomentTriple& m) {
  const ThreeStateFitResult r = fit_three_state(m);
  REQUIRE(std::holds_alternative<ThreeStateFit>(r));
  return std::get<ThreeStateFit>(r);
}

}  // namespace

TEST_CASE("three_state_pdf at zero equals the burn-in exit rate") {
  const ThreeStateParams p{1.72e-6, 2.49e-6, 2.88e-6};
  CHECK(three_state_pdf(p, 0.0) == doctest::Approx(p.alpha).epsilon(1e-12));
}

TEST_CASE("three_state_pdf integrates to one") {
  const ThreeStateParams p{1.72e-6, 2.49e-6, 2.88e-6};
  const double mu1 = ph_moment(to_phase_type(p), 1);
  const double integral = test_oracle::integrate(
      [&](double t) { return three_state_pdf(p, t); }, 0.0, 20.0 * mu1, 1e-11);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("three_state_pdf matches the matrix-exponential evaluation") {
  const ThreeStateParams p{1.72e-6, 2.49e-6, 2.88e-6};
  const PhaseTypeSpec ph = to_phase_type(p);
  for (double t : {0.0, 1e3, 1e5, 5e5, 2e6}) {
    CHECK(std::fabs(three_state_pdf(p, t) - ph_pdf(ph, t)) <= 1e-10);
    CHECK(std::fabs(three_state_cdf(p, t) - ph_cdf(ph, t)) <= 1e-10);
  }
}

TEST_CASE("confluent three-state forms agree with the generic ones nearby") {
  // sigma + alpha == beta exactly triggers the limit form
  const ThreeStateParams conf{1e-4, 2e-4, 3e-4};
  const ThreeStateParams near{1e-4, 2e-4, 3e-4 * (1.0 + 1e-7)};
  for (double t : {0.0, 100.0, 5000.0, 40000.0}) {
    CHECK(three_state_pdf(conf, t) ==
          doctest::Approx(three_state_pdf(near, t)).epsilon(1e-5));
    CHECK(three_state_cdf(conf, t) ==
          doctest::Approx(three_state_cdf(near, t)).epsilon(1e-5));
  }
  const double integral = test_oracle::integrate(
      [&](double t) { return three_state_pdf(conf, t); }, 0.0, 4e5, 1e-11);
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fit_three_state reproduces the fitted disk failure parameters") {
  const ThreeStateFit fit = fit_or_fail(weibull_moments(kTtop));
  CHECK(fit.plus.alpha == doctest::Approx(1.72e-6).epsilon(0.015));
  CHECK(fit.plus.sigma == doctest::Approx(2.49e-6).epsilon(0.015));
  CHECK(fit.plus.beta == doctest::Approx(2.88e-6).epsilon(0.015));
  CHECK(fit.minus.alpha == doctest::Approx(1.72e-6).epsilon(0.015));
  CHECK(fit.minus.sigma == doctest::Approx(1.16e-6).epsilon(0.015));
  CHECK(fit.minus.beta == doctest::Approx(4.21e-6).epsilon(0.015));
}

TEST_CASE("fit_three_state rejects the repair and scrub targets") {
  const ThreeStateFitResult r_ttr = fit_three_state(weibull_moments(kTtr));
  REQUIRE(std::holds_alternative<FitError>(r_ttr));
  CHECK(std::get<FitError>(r_ttr).kind == FitErrorKind::complex_discriminant);
  // the raw alpha is real and negative, as reported
  CHECK(std::get<FitError>(r_ttr).alpha.real() < 0.0);
  CHECK(std::get<FitError>(r_ttr).alpha.imag() == 0.0);

  const ThreeStateFitResult r_scr = fit_three_state(weibull_moments(kTtscr));
  REQUIRE(std::holds_alternative<FitError>(r_scr));
  CHECK(std::get<FitError>(r_scr).kind == FitErrorKind::complex_discriminant);
}

TEST_CASE("exponential moments are infeasible with raw alpha -2") {
  const ThreeStateFitResult r = fit_three_state(MomentTriple{1.0, 2.0, 6.0});
  REQUIRE(std::holds_alternative<FitError>(r));
  const FitError& err = std::get<FitError>(r);
  CHECK(err.kind == FitErrorKind::negative_rate);
  CHECK(err.alpha.real() == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("moment round trip for random feasible chains") {
  RngStream rng(31337);
  int tested = 0;
  while (tested < 25) {
    // burn-in slower than steady failure keeps the closed form feasible
    const double beta = 1e-5 * (0.5 + rng.uniform01());
    const double alpha = beta * (0.1 + 0.7 * rng.uniform01());
    const double sigma = beta * (0.3 + 2.0 * rng.uniform01());
    if (std::fabs(sigma + alpha - beta) < 0.2 * beta) continue;
    const ThreeStateParams p{alpha, sigma, beta};
    const PhaseTypeSpec ph = to_phase_type(p);
    const MomentTriple m{ph_moment(ph, 1), ph_moment(ph, 2), ph_moment(ph, 3)};
    const ThreeStateFitResult r = fit_three_state(m);
    if (!std::holds_alternative<ThreeStateFit>(r)) continue;
    const ThreeStateFit& fit = std::get<ThreeStateFit>(r);
    for (const ThreeStateParams& branch : {fit.plus, fit.minus}) {
      const PhaseTypeSpec bh = to_phase_type(branch);
      CHECK(ph_moment(bh, 1) == doctest::Approx(m.mu1).epsilon(1e-6));
      CHECK(ph_moment(bh, 2) == doctest::Approx(m.mu2).epsilon(1e-6));
      CHECK(ph_moment(bh, 3) == doctest::Approx(m.mu3).epsilon(1e-6));
    }
    tested += 1;
  }
}

TEST_CASE("both branches describe the same density") {
  const ThreeStateFit fit = fit_or_fail(weibull_moments(kTtop));
  // the exponential rate pair {beta, sigma+alpha} swaps between branches
  CHECK(fit.plus.sigma + fit.plus.alpha ==
        doctest::Approx(fit.minus.beta).epsilon(1e-12));
  CHECK(fit.minus.sigma + fit.minus.alpha ==
        doctest::Approx(fit.plus.beta).epsilon(1e-12));
  for (double t = 0.0; t <= 2e6; t += 1e5) {
    CHECK(std::fabs(three_state_pdf(fit.plus, t) -
                    three_state_pdf(fit.minus, t)) <= 1e-10);
  }
}

TEST_CASE("repair restores the first moment exactly") {
  SUBCASE("exponential moments") {
    const MomentTriple m{1.0, 2.0, 6.0};
    const ThreeStateFitResult r = fit_three_state(m);
    const ThreeStateParams repaired =
        repair_infeasible_fit(std::get<FitError>(r), m);
    CHECK(ph_moment(to_phase_type(repaired), 1) ==
          doctest::Approx(1.0).epsilon(1e-12));
    // alpha == beta makes the repaired chain exactly exponential
    CHECK(repaired.alpha == doctest::Approx(repaired.beta).epsilon(1e-12));
  }
  SUBCASE("rebuild-time moments") {
    const MomentTriple m = weibull_moments(kTtr);
    const ThreeStateFitResult r = fit_three_state(m);
    const ThreeStateParams repaired =
        repair_infeasible_fit(std::get<FitError>(r), m);
    CHECK(ph_moment(to_phase_type(repaired), 1) ==
          doctest::Approx(16.63472310794).epsilon(1e-9));
  }
  SUBCASE("any infeasible triple keeps mu1") {
    RngStream rng(99);
    for (int i = 0; i < 20; ++i) {
      const double mu1 = 1.0 + 100.0 * rng.uniform01();
      // inflated third moment drives the discriminant negative
      const MomentTriple m{mu1, 1.3 * mu1 * mu1, 9.0 * mu1 * mu1 * mu1};
      const ThreeStateFitResult r = fit_three_state(m);
      if (!std::holds_alternative<FitError>(r)) continue;
      const ThreeStateParams repaired =
          repair_infeasible_fit(std::get<FitError>(r), m);
      CHECK(ph_moment(to_phase_type(repaired), 1) ==
            doctest::Approx(m.mu1).epsilon(1e-9));
    }
  }
}

TEST_CASE("erlang fits reproduce the reference rates") {
  const ErlangSpec scr = fit_erlang(3, kTtscr);
  const ErlangSpec ttr = fit_erlang(3, kTtr);
  // exact mean matching
  CHECK(scr.mean() == doctest::Approx(weibull_moments(kTtscr).mu1).epsilon(1e-12));
  CHECK(ttr.mean() == doctest::Approx(weibull_moments(kTtr).mu1).epsilon(1e-12));
  // reference values: the rebuild rate agrees to nine digits, the scrub
  // rate only to about 2e-7 relative (its printed value is that precise)
  CHECK(ttr.rate == doctest::Approx(0.180345653).epsilon(1e-8));
  CHECK(scr.rate == doctest::Approx(0.019228232).epsilon(2e-7));
  CHECK(scr.rate == doctest::Approx(0.0192282353014262).epsilon(1e-12));
  // mean 3 target gives unit rate
  CHECK(fit_erlang(3, WeibullSpec{1.0, 3.0, 0.0}).rate ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("four-state fit: exponential target is matched exactly") {
  const WeibullSpec target{1.0, 1000.0, 0.0};
  const FourStateParams p = fit_four_state(target, 87600.0, 120);
  for (double t : {100.0, 5000.0, 50000.0}) {
    CHECK(four_state_hazard(p, t) ==
          doctest::Approx(1.0 / 1000.0).epsilon(1e-4));
  }
}

TEST_CASE("four-state fit tracks the disk failure hazard") {
  const FourStateParams p = fit_four_state(kTtop, 87600.0, 200);
  for (double t = 4380.0; t <= 87600.0; t += 4380.0) {
    const double target = weibull_eval(kTtop, t, WhichCurve::hazard);
    CHECK(std::fabs(four_state_hazard(p, t) - target) <= 0.10 * target);
  }
  const double mu1 = weibull_moments(kTtop).mu1;
  CHECK(std::fabs(four_state_mu1(p) - mu1) <= 0.05 * mu1);
}

TEST_CASE("cdf deviation band for the disk failure fit") {
  const ThreeStateFit fit = fit_or_fail(weibull_moments(kTtop));
  const DeviationBand band = cdf_deviation(fit.plus, kTtop, 87600.0);
  CHECK(band.max_excess <= 0.008);
  CHECK(band.min_deficit >= -0.005);
  CHECK(band.max_excess - band.min_deficit <= 0.009 * 1.5);
}

TEST_CASE("cdf deviation of a distribution against itself is zero") {
  // alpha == beta is exactly exponential, matching a shape-1 Weibull
  const ThreeStateParams p{1e-3, 5e-4, 1e-3};
  const DeviationBand band = cdf_deviation(p, WeibullSpec{1.0, 1000.0, 0.0},
                                           87600.0, 2000);
  CHECK(std::fabs(band.max_excess) <= 1e-12);
  CHECK(std::fabs(band.min_deficit) <= 1e-12);
}

TEST_CASE("hazard slope: sign, monotonicity and finite differences") {
  const ThreeStateParams p{1.72e-6, 2.49e-6, 2.88e-6};  // beta > alpha
  double prev = std::numeric_limits<double>::infinity();
  for (double t = 0.0; t <= 2e6; t += 1e5) {
    const double slope = three_state_hazard_slope(p, t);
    CHECK(slope >= 0.0);
    CHECK(slope <= prev * (1.0 + 1e-12));
    prev = slope;
    // central finite difference of the hazard
    if (t > 0.0) {
      const double h = t * 1e-4;
      const double fd = (three_state_hazard(p, t + h) -
                         three_state_hazard(p, t - h)) /
                        (2.0 * h);
      CHECK(fd == doctest::Approx(slope).epsilon(1e-6));
    }
  }
}

TEST_CASE("hazard slope vanishes when beta equals alpha") {
  const ThreeStateParams p{2e-6, 3e-6, 2e-6};
  for (double t : {0.0, 1e4, 1e6}) {
    CHECK(three_state_hazard_slope(p, t) == 0.0);
  }
}

TEST_CASE("fit reports carry band, hazard limit and the repair flag") {
  SUBCASE("feasible three-state") {
    const auto result = three_state_fit_report(kTtop, false);
    REQUIRE(std::holds_alternative<FitReport>(result));
    const FitReport& report = std::get<FitReport>(result);
    CHECK(!report.repaired);
    CHECK(report.minus_branch.has_value());
    CHECK(report.max_cdf_excess >= 0.0);
    CHECK(report.min_cdf_deficit <= 0.0);
    CHECK(report.hazard_limit == doctest::Approx(2.88e-6).epsilon(0.015));
    // fitted first moment matches the target exactly up to the fit tolerance
    const auto& p = std::get<ThreeStateParams>(report.params);
    CHECK(ph_moment(to_phase_type(p), 1) ==
          doctest::Approx(weibull_moments(kTtop).mu1).epsilon(1e-6));
  }
  SUBCASE("infeasible three-state without repair permission") {
    const auto result = three_state_fit_report(kTtr, false);
    REQUIRE(std::holds_alternative<FitError>(result));
  }
  SUBCASE("repaired three-state is flagged") {
    const auto result = three_state_fit_report(kTtr, true);
    REQUIRE(std::holds_alternative<FitReport>(result));
    const FitReport& report = std::get<FitReport>(result);
    CHECK(report.repaired);
    CHECK(!report.minus_branch.has_value());
    const auto& p = std::get<ThreeStateParams>(report.params);
    CHECK(ph_moment(to_phase_type(p), 1) ==
          doctest::Approx(weibull_moments(kTtr).mu1).epsilon(1e-9));
  }
  SUBCASE("four-state and erlang reports") {
    const FitReport four = four_state_fit_report(kTtop, 87600.0, 120);
    CHECK(std::holds_alternative<FourStateParams>(four.params));
    CHECK(four.max_cdf_excess >= 0.0);
    CHECK(four.min_cdf_deficit <= 0.0);
    const auto& fp = std::get<FourStateParams>(four.params);
    CHECK(four_state_mu1(fp) ==
          doctest::Approx(weibull_moments(kTtop).mu1).epsilon(0.05));
    const FitReport erl = erlang_fit_report(3, kTtr);
    CHECK(std::get<ErlangSpec>(erl.params).mean() ==
          doctest::Approx(weibull_moments(kTtr).mu1).epsilon(1e-12));
    CHECK(erl.hazard_limit ==
          doctest::Approx(std::get<ErlangSpec>(erl.params).rate));
  }
}

TEST_CASE("hazard tends to min(beta, sigma+alpha)") {
  const ThreeStateFit fit = fit_or_fail(weibull_moments(kTtop));
  const double limit = three_state_hazard_limit(fit.plus);
  CHECK(limit == doctest::Approx(2.88e-6).epsilon(0.015));
  CHECK(three_state_hazard(fit.plus, 1e7) ==
        doctest::Approx(limit).epsilon(1e-4));
}
