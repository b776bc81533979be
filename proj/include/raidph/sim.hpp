#ifndef RAIDPH_SIM_HPP
#define RAIDPH_SIM_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "raidph/ddf_series.hpp"
#include "raidph/raid.hpp"
#include "raidph/rng.hpp"

namespace raidph {

enum class RebuildSemantics {
  replace,          // rebuilt disk is new: age resets to zero
  repair_in_place,  // same disk continues; failure clock conditioned on age
};

struct SimOptions {
  std::uint64_t replications = 10000;
  std::uint64_t seed = 1;
  RebuildSemantics rebuild = RebuildSemantics::replace;
  double confidence = 0.95;
};

struct SimEstimate {
  double estimate = 0.0;  // probability x group multiplier
  double ci_low = 0.0;
  double ci_high = 0.0;
  double half_width = 0.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  bool exact_ci = false;  // Clopper-Pearson used (loss count < 30)
};

struct SimSeries {
  DdfSeries ddf;
  std::vector<SimEstimate> estimates;
};

// One replication with true Weibull clocks. Disk ages persist across other
// disks' events: every clock is an absolute presampled time, never
// resampled on unrelated transitions. Returns the first data-loss time, or
// nullopt if the group survives the horizon.
std::optional<double> simulate_group(const SystemConfig& cfg, double horizon,
                                     RngStream& rng,
                                     RebuildSemantics rebuild =
                                         RebuildSemantics::replace);

// Same event structure driven by the fitted phase-type clocks; isolates
// the fitting error from the solver error when compared against the
// analytic chain.
std::optional<double> simulate_group_phasetype(const SystemConfig& cfg,
                                               const FittedDiskClocks& clocks,
                                               double horizon, RngStream& rng);

// Replication k uses the counter-based substream (seed, k), so results are
// reproducible bit-for-bit and independent of execution order.
SimSeries estimate_ddf(const SystemConfig& cfg,
                       std::span<const double> times_hours,
                       double group_multiplier, const SimOptions& options);

SimSeries estimate_ddf_phasetype(const SystemConfig& cfg,
                                 const FittedDiskClocks& clocks,
                                 std::span<const double> times_hours,
                                 double group_multiplier,
                                 const SimOptions& options);

}  // namespace raidph

#endif
