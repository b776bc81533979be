#ifndef RAIDPH_RAID_HPP
#define RAIDPH_RAID_HPP

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "raidph/ddf_series.hpp"
#include "raidph/disk_model.hpp"
#include "raidph/fit.hpp"
#include "raidph/lumped_chain.hpp"
#include "raidph/weibull.hpp"

namespace raidph {

enum class FitMethod {
  three_state,
  four_state,
  erlang,
  exact_exponential,
};

struct FitPlanEntry {
  FitMethod method = FitMethod::erlang;
  int stages = 3;  // used by the erlang method
};

// A full MDS(n, k) group description: n disks, k of them data
// (fault tolerance m = n - k), the four lifetime distributions and the
// per-distribution fit plan. ttld and ttscr may be absent: no latent
// defects / defects that are never scrubbed.
struct SystemConfig {
  int n = 0;
  int k = 0;
  WeibullSpec ttop;                 // time to operational failure
  std::optional<WeibullSpec> ttld;  // time to latent defect (shape 1 only)
  WeibullSpec ttr;                  // time to restore (rebuild)
  std::optional<WeibullSpec> ttscr; // time to scrub
  FitPlanEntry ttop_fit{FitMethod::three_state, 3};
  FitPlanEntry ttr_fit{FitMethod::erlang, 3};
  FitPlanEntry ttscr_fit{FitMethod::erlang, 3};
  bool allow_repair = false;
  // hazard-fit window and grid for the four-state method
  double four_state_horizon = 87600.0;
  int four_state_grid = 200;

  int fault_tolerance() const { return n - k; }
  void validate() const;
};

// Phase chain with per-phase advance and absorption-exit rates; the
// common shape of every fitted model here (three-state, four-state,
// Erlang-k and plain exponential all reduce to it).
struct CoxianChain {
  std::vector<double> advance;  // size phases - 1
  std::vector<double> exit;     // size phases

  std::size_t phases() const { return exit.size(); }
  void validate() const;
};

PhaseTypeSpec to_phase_type(const CoxianChain& chain);

// Outcome of running one entry of the fit plan.
struct FittedDistribution {
  CoxianChain chain;
  FitMethod method = FitMethod::erlang;
  bool repaired = false;
};

// Runs the fit plan entry against a target distribution. Infeasible
// moment matches are repaired when allow_repair is set and rejected with
// FitInfeasible otherwise.
struct FitInfeasible : std::runtime_error {
  FitInfeasible(const std::string& what, FitErrorKind kind);
  FitErrorKind kind;
};

FittedDistribution fit_distribution(const FitPlanEntry& plan,
                                    const WeibullSpec& target,
                                    bool allow_repair);

// All fitted inputs of the disk model.
struct FittedDiskClocks {
  FittedDistribution failure;  // ttop
  FittedDistribution rebuild;  // ttr
  std::optional<FittedDistribution> scrub;  // ttscr
  double defect_rate = 0.0;    // 1/mean(ttld); 0 disables latent defects

  bool any_repaired() const;
};

FittedDiskClocks fit_system_clocks(const SystemConfig& cfg);

// Per-disk CTMC: failure phases (clean or carrying a latent defect under
// scrub) plus the rebuild chain. A latent defect starts its scrub clock on
// arrival; scrub completion clears it. Rebuild completion puts a fresh
// disk into the initial failure phase.
DiskLocalModel build_disk_model(const SystemConfig& cfg,
                                const FittedDiskClocks& clocks);
DiskLocalModel build_disk_model(const SystemConfig& cfg);

// loss <=> #failed > m, or #failed = m with a latent defect on an
// operational disk.
LossPredicate mds_loss_predicate(const SystemConfig& cfg);

struct AnalysisResult {
  DdfSeries series;
  std::size_t chain_states = 0;
  bool repaired_fit = false;
};

// fit -> build -> lump -> uniformize in one call.
AnalysisResult analyze_ddf(const SystemConfig& cfg,
                           std::span<const double> times_hours,
                           double group_multiplier, double epsilon,
                           std::size_t state_cap = 5'000'000);

struct SweepPoint {
  double shape = 0.0;
  double dataloss_probability = 0.0;
  std::size_t chain_states = 0;
  bool repaired = false;
};

// Failure-shape sensitivity: for each shape the ttop scale is rescaled so
// the mean time to failure is preserved, then the full analytic pipeline
// runs. Infeasible fits are repaired and flagged.
std::vector<SweepPoint> shape_sensitivity_sweep(const SystemConfig& cfg,
                                                std::span<const double> shapes,
                                                double t_hours,
                                                double epsilon);

}  // namespace raidph

#endif
