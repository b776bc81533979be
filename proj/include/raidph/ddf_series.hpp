#ifndef RAIDPH_DDF_SERIES_HPP
#define RAIDPH_DDF_SERIES_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace raidph {

// Time series of DDF(t) values: data-loss probability scaled by a group
// multiplier (1000 groups, 10^6 groups...). Produced by both the analytic
// solver and the Monte Carlo estimator; the confidence-interval columns
// are populated only by the latter.
struct DdfSeries {
  std::vector<double> times_hours;
  std::vector<double> value;    // probability x group_multiplier
  std::vector<double> ci_low;   // empty for analytic series
  std::vector<double> ci_high;  // empty for analytic series
  double group_multiplier = 1.0;
  std::uint64_t replications = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;                // analytic truncation epsilon
  std::vector<std::string> flags;      // e.g. "repaired_fit", "exact_ci"
};

}  // namespace raidph

#endif
