#include "raidph/weibull.hpp"

#include <cmath>
#include <stdexcept>

#include "raidph/math_util.hpp"

namespace raidph {

void WeibullSpec::validate() const {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw std::invalid_argument("WeibullSpec: shape must be > 0");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("WeibullSpec: scale must be > 0");
  }
  if (!(offset >= 0.0) || !std::isfinite(offset)) {
    throw std::invalid_argument("WeibullSpec: offset must be >= 0");
  }
}

void MomentTriple::validate() const {
  if (!(mu1 > 0.0) || !(mu3 > 0.0)) {
    throw std::invalid_argument("MomentTriple: mu1 and mu3 must be > 0");
  }
  if (mu2 < mu1 * mu1) {
    throw std::invalid_argument("MomentTriple: mu2 < mu1^2 (negative variance)");
  }
}

double weibull_eval(const WeibullSpec& spec, double t, WhichCurve which) {
  spec.validate();
  if (!std::isfinite(t)) {
    throw std::invalid_argument("weibull_eval: non-finite t");
  }
  if (t < 0.0) {
    throw std::invalid_argument("weibull_eval: t must be >= 0");
  }
  if (t < spec.offset) {
    return 0.0;
  }
  const double x = (t - spec.offset) / spec.scale;
  switch (which) {
    case WhichCurve::pdf:
      return spec.shape / spec.scale * std::pow(x, spec.shape - 1.0) *
             std::exp(-std::pow(x, spec.shape));
    case WhichCurve::cdf:
      return -std::expm1(-std::pow(x, spec.shape));
    case WhichCurve::hazard:
      // pdf / (1 - cdf) simplifies; stable arbitrarily far into the tail.
      return spec.shape / spec.scale * std::pow(x, spec.shape - 1.0);
  }
  return 0.0;
}

MomentTriple weibull_moments(const WeibullSpec& spec) {
  spec.validate();
  // offset-free raw moments
  double raw[4] = {1.0, 0.0, 0.0, 0.0};
  for (int k = 1; k <= 3; ++k) {
    raw[k] = std::pow(spec.scale, k) * gamma_fn(1.0 + k / spec.shape);
  }
  const double g = spec.offset;
  MomentTriple m;
  m.mu1 = raw[1] + g;
  m.mu2 = raw[2] + 2.0 * g * raw[1] + g * g;
  m.mu3 = raw[3] + 3.0 * g * raw[2] + 3.0 * g * g * raw[1] + g * g * g;
  return m;
}

double weibull_from_survival(const WeibullSpec& spec, double u) {
  if (!(u > 0.0) || u > 1.0) {
    throw std::invalid_argument("weibull_from_survival: u must be in (0, 1]");
  }
  return spec.offset + spec.scale * std::pow(-std::log(u), 1.0 / spec.shape);
}

double sample(const WeibullSpec& spec, RngStream& rng) {
  return weibull_from_survival(spec, rng.uniform01());
}

double sample_conditional(const WeibullSpec& spec, double age, RngStream& rng) {
  if (age < 0.0) {
    throw std::invalid_argument("sample_conditional: age must be >= 0");
  }
  if (age <= spec.offset) {
    return weibull_from_survival(spec, rng.uniform01()) - age;
  }
  // S(t) = exp(-((t-off)/scale)^shape); solve S(x) = u * S(age) for x > age.
  const double xa = (age - spec.offset) / spec.scale;
  const double ha = std::pow(xa, spec.shape);  // cumulative hazard at age
  const double u = rng.uniform01();
  const double h = ha - std::log(u);
  return spec.offset + spec.scale * std::pow(h, 1.0 / spec.shape) - age;
}

}  // namespace raidph
