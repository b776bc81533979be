#ifndef RAIDPH_UNIFORMIZATION_HPP
#define RAIDPH_UNIFORMIZATION_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "raidph/ddf_series.hpp"
#include "raidph/lumped_chain.hpp"

namespace raidph {

struct UniformizationOverflow : std::runtime_error {
  explicit UniformizationOverflow(double qt);
  double qt;
};

// Transient distribution pi(t) = sum_k Poisson(qt; k) * pi0 * P^k with
// P = I + Q/q, computed with two-sided truncation of the Poisson weights
// so the discarded mass stays below epsilon. The result is renormalized,
// keeping the L1 error within epsilon.
//
// Throws UniformizationOverflow when q*t exceeds 1e10; split such a call
// into time steps instead.
std::vector<double> transient_vector(const CsrMatrix& generator,
                                     std::vector<double> pi0, double t,
                                     double epsilon);

struct TransientResult {
  std::vector<double> times_hours;
  std::vector<std::vector<double>> distributions;  // kept only on request
  std::vector<double> loss_probability;
  double epsilon = 0.0;
};

TransientResult uniformize(const LumpedChain& chain, double t, double epsilon);

// Solves the grid sequentially (each point continues from the previous
// distribution); epsilon is the total truncation budget for the grid.
TransientResult uniformize_grid(const LumpedChain& chain,
                                std::span<const double> times_hours,
                                double epsilon, bool keep_distributions = false);

// LOSS-state probability at each grid time, scaled by group_multiplier.
DdfSeries loss_probability(const LumpedChain& chain,
                           std::span<const double> times_hours,
                           double group_multiplier, double epsilon);

}  // namespace raidph

#endif
