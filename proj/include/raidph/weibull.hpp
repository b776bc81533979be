#ifndef RAIDPH_WEIBULL_HPP
#define RAIDPH_WEIBULL_HPP

#include "raidph/rng.hpp"

namespace raidph {

// Two- or three-parameter Weibull time distribution. All times are hours.
// shape = 1 with offset = 0 is exactly the exponential with rate 1/scale.
struct WeibullSpec {
  double shape = 1.0;
  double scale = 1.0;
  double offset = 0.0;

  void validate() const;
};

enum class WhichCurve { pdf, cdf, hazard };

struct MomentTriple {
  double mu1 = 0.0;  // hours
  double mu2 = 0.0;  // hours^2
  double mu3 = 0.0;  // hours^3

  void validate() const;
};

double weibull_eval(const WeibullSpec& spec, double t, WhichCurve which);

// Raw moments E[T^k], k = 1..3. Offset handled by the binomial shift of the
// offset-free moments scale^k * Gamma(1 + k/shape).
MomentTriple weibull_moments(const WeibullSpec& spec);

// Inverse transform at survival probability u in (0, 1]:
//   t = offset + scale * (-ln u)^(1/shape)
double weibull_from_survival(const WeibullSpec& spec, double u);

double sample(const WeibullSpec& spec, RngStream& rng);

// Residual life sample for a device of age `age`: distributed as
// (T - age | T > age). Reduces to a plain sample when age = 0.
double sample_conditional(const WeibullSpec& spec, double age, RngStream& rng);

}  // namespace raidph

#endif
