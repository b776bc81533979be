#include "raidph/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "raidph/math_util.hpp"
#include "raidph/phase_type.hpp"

namespace raidph {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DiskState {
  double fail_at = kInf;       // absolute
  double rebuild_done = kInf;  // absolute, finite only while failed
  double defect_arrival = kInf;
  double defect_clear = kInf;
  double install = 0.0;
  bool failed = false;
};

// Clock samplers; either true Weibull draws or fitted phase-type draws.
struct Clocks {
  virtual ~Clocks() = default;
  virtual double time_to_failure(RngStream& rng) const = 0;
  virtual double conditional_time_to_failure(double age,
                                             RngStream& rng) const = 0;
  virtual double time_to_rebuild(RngStream& rng) const = 0;
  virtual double time_to_scrub(RngStream& rng) const = 0;  // kInf if no scrub
  double defect_rate = 0.0;  // 0 disables latent defects
};

struct WeibullClocks final : Clocks {
  const SystemConfig* cfg = nullptr;
  double time_to_failure(RngStream& rng) const override {
    return sample(cfg->ttop, rng);
  }
  double conditional_time_to_failure(double age,
                                     RngStream& rng) const override {
    return sample_conditional(cfg->ttop, age, rng);
  }
  double time_to_rebuild(RngStream& rng) const override {
    return sample(cfg->ttr, rng);
  }
  double time_to_scrub(RngStream& rng) const override {
    return cfg->ttscr ? sample(*cfg->ttscr, rng) : kInf;
  }
};

struct PhaseTypeClocks final : Clocks {
  PhaseTypeSpec failure, rebuild;
  std::optional<PhaseTypeSpec> scrub;
  double time_to_failure(RngStream& rng) const override {
    return sample(failure, rng);
  }
  double conditional_time_to_failure(double /*age*/,
                                     RngStream& rng) const override {
    // mirrors the chain: a rebuilt disk restarts in the initial phase
    return sample(failure, rng);
  }
  double time_to_rebuild(RngStream& rng) const override {
    return sample(rebuild, rng);
  }
  double time_to_scrub(RngStream& rng) const override {
    return scrub ? sample(*scrub, rng) : kInf;
  }
};

void start_defect_episode(DiskState& d, double now, const Clocks& clocks,
                          RngStream& rng) {
  if (clocks.defect_rate > 0.0) {
    d.defect_arrival = now + rng.exponential(clocks.defect_rate);
    d.defect_clear = d.defect_arrival + clocks.time_to_scrub(rng);
  } else {
    d.defect_arrival = kInf;
    d.defect_clear = kInf;
  }
}

// Advance the scrub/defect renewal of one disk up to time t and report
// whether a latent defect is present at t.
bool defect_present(DiskState& d, double t, const Clocks& clocks,
                    RngStream& rng) {
  if (clocks.defect_rate <= 0.0) return false;
  while (d.defect_clear <= t) {
    d.defect_arrival = d.defect_clear + rng.exponential(clocks.defect_rate);
    d.defect_clear = d.defect_arrival + clocks.time_to_scrub(rng);
  }
  return d.defect_arrival <= t;
}

std::optional<double> run_group(const SystemConfig& cfg, const Clocks& clocks,
                                double horizon, RngStream& rng,
                                RebuildSemantics rebuild) {
  const int n = cfg.n;
  const int m = cfg.fault_tolerance();
  std::vector<DiskState> disks(n);
  for (DiskState& d : disks) {
    d.install = 0.0;
    d.fail_at = clocks.time_to_failure(rng);
    start_defect_episode(d, 0.0, clocks, rng);
  }
  int failed_count = 0;
  while (true) {
    double t_next = kInf;
    int who = -1;
    bool is_failure = false;
    for (int i = 0; i < n; ++i) {
      const DiskState& d = disks[i];
      const double cand = d.failed ? d.rebuild_done : d.fail_at;
      if (cand < t_next) {
        t_next = cand;
        who = i;
        is_failure = !d.failed;
      }
    }
    if (who < 0 || t_next > horizon) {
      return std::nullopt;  // survived
    }
    DiskState& d = disks[who];
    if (is_failure) {
      d.failed = true;
      d.rebuild_done = t_next + clocks.time_to_rebuild(rng);
      failed_count += 1;
      if (failed_count > m) {
        return t_next;
      }
      if (failed_count == m) {
        for (int j = 0; j < n; ++j) {
          if (disks[j].failed) continue;
          if (defect_present(disks[j], t_next, clocks, rng)) {
            return t_next;
          }
        }
      }
    } else {
      // rebuild completes; the disk rejoins clean
      d.failed = false;
      d.rebuild_done = kInf;
      failed_count -= 1;
      if (rebuild == RebuildSemantics::replace) {
        d.install = t_next;
        d.fail_at = t_next + clocks.time_to_failure(rng);
      } else {
        const double age = t_next - d.install;
        d.fail_at = t_next + clocks.conditional_time_to_failure(age, rng);
      }
      start_defect_episode(d, t_next, clocks, rng);
    }
  }
}

SimSeries estimate_impl(const SystemConfig& cfg, const Clocks& clocks,
                        std::span<const double> times_hours,
                        double group_multiplier, const SimOptions& options) {
  cfg.validate();
  if (options.replications < 100) {
    throw std::invalid_argument("estimate_ddf: need at least 100 replications");
  }
  if (times_hours.empty()) {
    throw std::invalid_argument("estimate_ddf: empty time grid");
  }
  for (std::size_t i = 0; i + 1 < times_hours.size(); ++i) {
    if (times_hours[i + 1] < times_hours[i]) {
      throw std::invalid_argument("estimate_ddf: times must be ascending");
    }
  }
  const double horizon = times_hours.back();
  std::vector<std::uint64_t> counts(times_hours.size(), 0);
  for (std::uint64_t rep = 0; rep < options.replications; ++rep) {
    RngStream rng = RngStream::substream(options.seed, rep);
    const std::optional<double> loss =
        run_group(cfg, clocks, horizon, rng, options.rebuild);
    if (loss) {
      for (std::size_t g = 0; g < times_hours.size(); ++g) {
        if (*loss <= times_hours[g]) counts[g] += 1;
      }
    }
  }

  SimSeries out;
  out.ddf.times_hours.assign(times_hours.begin(), times_hours.end());
  out.ddf.group_multiplier = group_multiplier;
  out.ddf.replications = options.replications;
  out.ddf.seed = options.seed;
  const double reps = static_cast<double>(options.replications);
  bool any_exact = false;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    SimEstimate est;
    est.replications = options.replications;
    est.seed = options.seed;
    const double p = counts[g] / reps;
    est.estimate = p * group_multiplier;
    if (counts[g] < 30) {
      const BinomialInterval ci =
          clopper_pearson(counts[g], options.replications, options.confidence);
      est.ci_low = ci.lower * group_multiplier;
      est.ci_high = ci.upper * group_multiplier;
      est.exact_ci = true;
      any_exact = true;
    } else {
      const double z = kNormalQuantile975;
      const double hw = z * std::sqrt(p * (1.0 - p) / reps);
      est.ci_low = std::max(0.0, p - hw) * group_multiplier;
      est.ci_high = std::min(1.0, p + hw) * group_multiplier;
    }
    est.half_width = 0.5 * (est.ci_high - est.ci_low);
    out.ddf.value.push_back(est.estimate);
    out.ddf.ci_low.push_back(est.ci_low);
    out.ddf.ci_high.push_back(est.ci_high);
    out.estimates.push_back(est);
  }
  if (any_exact) out.ddf.flags.push_back("exact_ci");
  return out;
}

}  // namespace

std::optional<double> simulate_group(const SystemConfig& cfg, double horizon,
                                     RngStream& rng,
                                     RebuildSemantics rebuild) {
  cfg.validate();
  WeibullClocks clocks;
  clocks.cfg = &cfg;
  clocks.defect_rate = cfg.ttld ? 1.0 / weibull_moments(*cfg.ttld).mu1 : 0.0;
  return run_group(cfg, clocks, horizon, rng, rebuild);
}

std::optional<double> simulate_group_phasetype(const SystemConfig& cfg,
                                               const FittedDiskClocks& fitted,
                                               double horizon,
                                               RngStream& rng) {
  cfg.validate();
  PhaseTypeClocks clocks;
  clocks.failure = to_phase_type(fitted.failure.chain);
  clocks.rebuild = to_phase_type(fitted.rebuild.chain);
  if (fitted.scrub) clocks.scrub = to_phase_type(fitted.scrub->chain);
  clocks.defect_rate = fitted.defect_rate;
  return run_group(cfg, clocks, horizon, rng, RebuildSemantics::replace);
}

SimSeries estimate_ddf(const SystemConfig& cfg,
                       std::span<const double> times_hours,
                       double group_multiplier, const SimOptions& options) {
  WeibullClocks clocks;
  clocks.cfg = &cfg;
  clocks.defect_rate = cfg.ttld ? 1.0 / weibull_moments(*cfg.ttld).mu1 : 0.0;
  return estimate_impl(cfg, clocks, times_hours, group_multiplier, options);
}

SimSeries estimate_ddf_phasetype(const SystemConfig& cfg,
                                 const FittedDiskClocks& fitted,
                                 std::span<const double> times_hours,
                                 double group_multiplier,
                                 const SimOptions& options) {
  PhaseTypeClocks clocks;
  clocks.failure = to_phase_type(fitted.failure.chain);
  clocks.rebuild = to_phase_type(fitted.rebuild.chain);
  if (fitted.scrub) clocks.scrub = to_phase_type(fitted.scrub->chain);
  clocks.defect_rate = fitted.defect_rate;
  SimSeries out =
      estimate_impl(cfg, clocks, times_hours, group_multiplier, options);
  if (fitted.any_repaired()) out.ddf.flags.push_back("repaired_fit");
  return out;
}

}  // namespace raidph
