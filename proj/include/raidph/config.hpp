#ifndef RAIDPH_CONFIG_HPP
#define RAIDPH_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "raidph/raid.hpp"

namespace raidph {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AnalysisSettings {
  std::vector<double> grid_years = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  double epsilon = 1e-8;
  double group_multiplier = 1.0;
};

struct SimulationSettings {
  std::uint64_t reps = 10000;
  std::uint64_t seed = 1;
};

struct SweepSettings {
  std::string parameter;  // only "ttop.shape" is supported
  std::vector<double> values;
};

// One reproducible run: a system plus analysis/simulation/sweep settings.
// Parsed strictly; unknown keys are rejected with a diagnostic naming the
// offending key.
struct RunConfig {
  SystemConfig system;
  AnalysisSettings analysis;
  SimulationSettings simulation;
  std::optional<SweepSettings> sweep;

  static RunConfig load(const std::string& path);
  static RunConfig parse(const std::string& json_text);

  std::vector<double> grid_hours() const;
};

}  // namespace raidph

#endif
