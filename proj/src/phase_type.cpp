#include "raidph/phase_type.hpp"

#include <cmath>
#include <stdexcept>

#include "raidph/detail/dense.hpp"

namespace raidph {

double PhaseTypeSpec::exit_rate(std::size_t i) const {
  double s = 0.0;
  for (std::size_t j = 0; j < phases; ++j) s += rate(i, j);
  return -s;
}

void PhaseTypeSpec::validate() const {
  if (phases == 0 || initial.size() != phases ||
      subgen.size() != phases * phases) {
    throw std::invalid_argument("PhaseTypeSpec: inconsistent dimensions");
  }
  double total = 0.0;
  for (double p : initial) {
    if (p < 0.0) throw std::invalid_argument("PhaseTypeSpec: negative initial");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("PhaseTypeSpec: initial must sum to 1");
  }
  bool any_exit = false;
  for (std::size_t i = 0; i < phases; ++i) {
    for (std::size_t j = 0; j < phases; ++j) {
      if (i != j && rate(i, j) < 0.0) {
        throw std::invalid_argument("PhaseTypeSpec: negative off-diagonal");
      }
    }
    const double e = exit_rate(i);
    if (e < -1e-12) {
      throw std::invalid_argument("PhaseTypeSpec: positive row sum");
    }
    if (e > 0.0) any_exit = true;
  }
  if (!any_exit) {
    throw std::invalid_argument("PhaseTypeSpec: no phase exits to absorption");
  }
}

double ph_moment(const PhaseTypeSpec& ph, int k) {
  ph.validate();
  if (k < 1 || k > 3) {
    throw std::invalid_argument("ph_moment: k must be 1..3");
  }
  const std::size_t n = ph.phases;
  std::vector<double> neg(n * n);
  for (std::size_t idx = 0; idx < n * n; ++idx) neg[idx] = -ph.subgen[idx];
  std::vector<double> x(n, 1.0);
  double factorial = 1.0;
  try {
    for (int j = 1; j <= k; ++j) {
      detail::lu_solve(neg, n, x);
      factorial *= j;
    }
  } catch (const std::domain_error&) {
    throw std::domain_error(
        "ph_moment: singular sub-generator, some phase never absorbs");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += ph.initial[i] * x[i];
  return factorial * dot;
}

double ph_cdf(const PhaseTypeSpec& ph, double t) {
  ph.validate();
  if (t < 0.0) throw std::invalid_argument("ph_cdf: t must be >= 0");
  if (t == 0.0) return 0.0;
  const std::size_t n = ph.phases;
  std::vector<double> at(ph.subgen);
  for (auto& v : at) v *= t;
  const auto e = detail::expm(std::move(at), n);
  double surv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      surv += ph.initial[i] * e[i * n + j];
    }
  }
  return 1.0 - surv;
}

double ph_pdf(const PhaseTypeSpec& ph, double t) {
  ph.validate();
  if (t < 0.0) throw std::invalid_argument("ph_pdf: t must be >= 0");
  const std::size_t n = ph.phases;
  std::vector<double> at(ph.subgen);
  for (auto& v : at) v *= t;
  const auto e = detail::expm(std::move(at), n);
  double pdf = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      pdf += ph.initial[i] * e[i * n + j] * ph.exit_rate(j);
    }
  }
  return pdf;
}

double sample(const PhaseTypeSpec& ph, RngStream& rng) {
  const std::size_t n = ph.phases;
  int phase = rng.categorical(ph.initial, static_cast<int>(n));
  double t = 0.0;
  while (true) {
    const std::size_t i = static_cast<std::size_t>(phase);
    const double hold = -ph.rate(i, i);  // total outflow incl. absorption
    if (hold <= 0.0) {
      throw std::domain_error("phase-type sample: phase with no outflow");
    }
    t += rng.exponential(hold);
    double u = rng.uniform01() * hold;
    bool jumped = false;
    for (std::size_t j = 0; j < n && !jumped; ++j) {
      if (j == i) continue;
      u -= ph.rate(i, j);
      if (u <= 0.0) {
        phase = static_cast<int>(j);
        jumped = true;
      }
    }
    if (!jumped) {
      return t;  // absorbed
    }
  }
}

}  // namespace raidph
