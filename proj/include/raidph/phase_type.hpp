#ifndef RAIDPH_PHASE_TYPE_HPP
#define RAIDPH_PHASE_TYPE_HPP

#include <cstddef>
#include <vector>

#include "raidph/rng.hpp"

namespace raidph {

// Absorbing-chain representation of a fitted distribution: an initial
// probability vector over p transient phases and the p x p sub-generator
// (per-hour rates). The exit rate of phase i is -sum of row i.
struct PhaseTypeSpec {
  std::vector<double> initial;
  std::vector<double> subgen;  // row-major p x p
  std::size_t phases = 0;

  double rate(std::size_t i, std::size_t j) const {
    return subgen[i * phases + j];
  }
  double& rate(std::size_t i, std::size_t j) { return subgen[i * phases + j]; }
  double exit_rate(std::size_t i) const;

  void validate() const;
};

// Raw k-th moment, k in 1..3:  k! * initial * (-subgen)^(-k) * 1.
// Throws std::domain_error if the sub-generator is singular (a phase
// that never reaches absorption).
double ph_moment(const PhaseTypeSpec& ph, int k);

double ph_cdf(const PhaseTypeSpec& ph, double t);
double ph_pdf(const PhaseTypeSpec& ph, double t);

// Absorption time sampled by walking the phase process.
double sample(const PhaseTypeSpec& ph, RngStream& rng);

}  // namespace raidph

#endif
