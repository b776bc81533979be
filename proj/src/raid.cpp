#include "raidph/raid.hpp"

#include <cmath>

#include "raidph/math_util.hpp"
#include "raidph/uniformization.hpp"

namespace raidph {

void SystemConfig::validate() const {
  // k == n is the degenerate zero-fault-tolerance group: loss at the
  // first operational failure.
  if (k < 1 || k > n) {
    throw std::invalid_argument("SystemConfig: need 1 <= k <= n");
  }
  ttop.validate();
  ttr.validate();
  if (ttld) {
    ttld->validate();
    if (ttld->shape != 1.0 || ttld->offset != 0.0) {
      throw std::invalid_argument(
          "SystemConfig: ttld must be exponential (shape 1, offset 0)");
    }
  }
  if (ttscr) ttscr->validate();
}

void CoxianChain::validate() const {
  if (exit.empty() || advance.size() + 1 != exit.size()) {
    throw std::invalid_argument("CoxianChain: inconsistent sizes");
  }
  for (double a : advance) {
    if (!(a > 0.0)) throw std::invalid_argument("CoxianChain: advance <= 0");
  }
  for (std::size_t i = 0; i < exit.size(); ++i) {
    if (exit[i] < 0.0 || (i + 1 == exit.size() && !(exit[i] > 0.0))) {
      throw std::invalid_argument("CoxianChain: bad exit rates");
    }
  }
}

PhaseTypeSpec to_phase_type(const CoxianChain& chain) {
  chain.validate();
  const std::size_t p = chain.phases();
  PhaseTypeSpec ph;
  ph.phases = p;
  ph.initial.assign(p, 0.0);
  ph.initial[0] = 1.0;
  ph.subgen.assign(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    double out = chain.exit[i];
    if (i + 1 < p) {
      out += chain.advance[i];
      ph.rate(i, i + 1) = chain.advance[i];
    }
    ph.rate(i, i) = -out;
  }
  return ph;
}

FitInfeasible::FitInfeasible(const std::string& what, FitErrorKind kind_)
    : std::runtime_error(what), kind(kind_) {}

namespace {

CoxianChain three_state_to_coxian(const ThreeStateParams& p) {
  return CoxianChain{{p.sigma}, {p.alpha, p.beta}};
}

}  // namespace

FittedDistribution fit_distribution(const FitPlanEntry& plan,
                                    const WeibullSpec& target,
                                    bool allow_repair) {
  target.validate();
  FittedDistribution out;
  out.method = plan.method;
  switch (plan.method) {
    case FitMethod::three_state: {
      const MomentTriple m = weibull_moments(target);
      const ThreeStateFitResult result = fit_three_state(m);
      if (std::holds_alternative<ThreeStateFit>(result)) {
        out.chain = three_state_to_coxian(std::get<ThreeStateFit>(result).plus);
      } else {
        const FitError& err = std::get<FitError>(result);
        if (!allow_repair) {
          throw FitInfeasible(
              std::string("three-state moment match infeasible (") +
                  err.kind_name() + "); pass allow_repair to continue",
              err.kind);
        }
        out.chain = three_state_to_coxian(repair_infeasible_fit(err, m));
        out.repaired = true;
      }
      break;
    }
    case FitMethod::four_state: {
      // the hazard window parameters travel with the caller via defaults
      const FourStateParams p = fit_four_state(target, 87600.0, 200);
      out.chain = CoxianChain{{p.advance1, p.advance2},
                              {p.fail1, p.fail2, p.fail3}};
      break;
    }
    case FitMethod::erlang: {
      const ErlangSpec e = fit_erlang(plan.stages, target);
      CoxianChain chain;
      chain.advance.assign(e.stages - 1, e.rate);
      chain.exit.assign(e.stages, 0.0);
      chain.exit.back() = e.rate;
      out.chain = chain;
      break;
    }
    case FitMethod::exact_exponential: {
      const MomentTriple m = weibull_moments(target);
      out.chain = CoxianChain{{}, {1.0 / m.mu1}};
      break;
    }
  }
  out.chain.validate();
  return out;
}

bool FittedDiskClocks::any_repaired() const {
  return failure.repaired || rebuild.repaired ||
         (scrub && scrub->repaired);
}

FittedDiskClocks fit_system_clocks(const SystemConfig& cfg) {
  cfg.validate();
  FittedDiskClocks clocks;
  if (cfg.ttop_fit.method == FitMethod::four_state) {
    const FourStateParams p = fit_four_state(cfg.ttop, cfg.four_state_horizon,
                                             cfg.four_state_grid);
    clocks.failure.chain = CoxianChain{{p.advance1, p.advance2},
                                       {p.fail1, p.fail2, p.fail3}};
    clocks.failure.method = FitMethod::four_state;
  } else {
    clocks.failure = fit_distribution(cfg.ttop_fit, cfg.ttop, cfg.allow_repair);
  }
  clocks.rebuild = fit_distribution(cfg.ttr_fit, cfg.ttr, cfg.allow_repair);
  if (cfg.ttscr) {
    clocks.scrub = fit_distribution(cfg.ttscr_fit, *cfg.ttscr, cfg.allow_repair);
  }
  if (cfg.ttld) {
    clocks.defect_rate = 1.0 / weibull_moments(*cfg.ttld).mu1;
  }
  return clocks;
}

DiskLocalModel build_disk_model(const SystemConfig& cfg,
                                const FittedDiskClocks& clocks) {
  cfg.validate();
  clocks.failure.chain.validate();
  clocks.rebuild.chain.validate();
  const bool defects = clocks.defect_rate > 0.0;
  const std::size_t phases = clocks.failure.chain.phases();
  const std::size_t scrub_stages =
      (defects && clocks.scrub) ? clocks.scrub->chain.phases() : (defects ? 1 : 0);
  const std::size_t rebuild_stages = clocks.rebuild.chain.phases();

  DiskLocalModel model;
  // operational states: per failure phase one clean state plus, when
  // latent defects are modeled, one state per scrub stage
  const std::size_t per_phase = 1 + scrub_stages;
  const auto op_clean = [&](std::size_t p) { return p * per_phase; };
  const auto op_defect = [&](std::size_t p, std::size_t s) {
    return p * per_phase + 1 + s;
  };
  const std::size_t rebuild_base = phases * per_phase;
  const auto fail_state = [&](std::size_t r) { return rebuild_base + r; };

  model.states.resize(rebuild_base + rebuild_stages);
  for (std::size_t p = 0; p < phases; ++p) {
    LocalStateLabel clean;
    clean.operational = true;
    clean.burn_in = (p == 0 && phases > 1);
    clean.failure_phase = static_cast<int>(p);
    clean.name = "op phase " + std::to_string(p) + " clean";
    model.states[op_clean(p)] = clean;
    for (std::size_t s = 0; s < scrub_stages; ++s) {
      LocalStateLabel defect = clean;
      defect.latent_defect = true;
      defect.scrub_stage = clocks.scrub ? static_cast<int>(s) : -1;
      defect.name = "op phase " + std::to_string(p) + " defect scrub " +
                    std::to_string(s);
      model.states[op_defect(p, s)] = defect;
    }
  }
  for (std::size_t r = 0; r < rebuild_stages; ++r) {
    LocalStateLabel fail;
    fail.failed = true;
    fail.rebuild_stage = static_cast<int>(r);
    fail.name = "rebuild stage " + std::to_string(r);
    model.states[fail_state(r)] = fail;
  }
  model.initial_state = static_cast<int>(op_clean(0));

  const auto add = [&](std::size_t from, std::size_t to, double rate,
                       bool is_failure) {
    if (rate > 0.0) {
      model.transitions.push_back({static_cast<int>(from),
                                   static_cast<int>(to), rate, is_failure});
    }
  };

  const CoxianChain& fc = clocks.failure.chain;
  for (std::size_t p = 0; p < phases; ++p) {
    const std::size_t n_defect_states = defects ? scrub_stages : 0;
    // aging and failure, identical with or without a defect present
    add(op_clean(p), fail_state(0), fc.exit[p], true);
    if (p + 1 < phases) add(op_clean(p), op_clean(p + 1), fc.advance[p], false);
    for (std::size_t s = 0; s < n_defect_states; ++s) {
      add(op_defect(p, s), fail_state(0), fc.exit[p], true);
      if (p + 1 < phases) {
        add(op_defect(p, s), op_defect(p + 1, s), fc.advance[p], false);
      }
    }
    if (defects) {
      // defect arrival starts the scrub clock at its first stage
      add(op_clean(p), op_defect(p, 0), clocks.defect_rate, false);
      if (clocks.scrub) {
        const CoxianChain& sc = clocks.scrub->chain;
        for (std::size_t s = 0; s < scrub_stages; ++s) {
          if (s + 1 < scrub_stages) {
            add(op_defect(p, s), op_defect(p, s + 1), sc.advance[s], false);
          }
          // scrub completion clears the defect
          add(op_defect(p, s), op_clean(p), sc.exit[s], false);
        }
      }
      // no scrub model: the defect stays until the disk fails
    }
  }
  const CoxianChain& rc = clocks.rebuild.chain;
  for (std::size_t r = 0; r < rebuild_stages; ++r) {
    if (r + 1 < rebuild_stages) {
      add(fail_state(r), fail_state(r + 1), rc.advance[r], false);
    }
    // rebuild completion: a fresh disk enters the initial failure phase
    add(fail_state(r), op_clean(0), rc.exit[r], false);
  }
  model.validate();
  return model;
}

DiskLocalModel build_disk_model(const SystemConfig& cfg) {
  return build_disk_model(cfg, fit_system_clocks(cfg));
}

LossPredicate mds_loss_predicate(const SystemConfig& cfg) {
  cfg.validate();
  return LossPredicate{cfg.fault_tolerance()};
}

AnalysisResult analyze_ddf(const SystemConfig& cfg,
                           std::span<const double> times_hours,
                           double group_multiplier, double epsilon,
                           std::size_t state_cap) {
  const FittedDiskClocks clocks = fit_system_clocks(cfg);
  const DiskLocalModel disk = build_disk_model(cfg, clocks);
  const LumpedChain chain =
      build_lumped_chain(disk, cfg.n, mds_loss_predicate(cfg), state_cap);
  AnalysisResult result;
  result.series =
      loss_probability(chain, times_hours, group_multiplier, epsilon);
  result.chain_states = chain.size();
  result.repaired_fit = clocks.any_repaired();
  if (result.repaired_fit) result.series.flags.push_back("repaired_fit");
  return result;
}

std::vector<SweepPoint> shape_sensitivity_sweep(const SystemConfig& cfg,
                                                std::span<const double> shapes,
                                                double t_hours,
                                                double epsilon) {
  cfg.validate();
  const double mean_ttop = weibull_moments(cfg.ttop).mu1;
  std::vector<SweepPoint> points;
  points.reserve(shapes.size());
  for (double shape : shapes) {
    if (!(shape > 0.0)) {
      throw std::invalid_argument("shape_sensitivity_sweep: shape must be > 0");
    }
    SystemConfig point_cfg = cfg;
    point_cfg.allow_repair = true;  // infeasible fits are repaired and flagged
    point_cfg.ttop.shape = shape;
    point_cfg.ttop.scale =
        (mean_ttop - cfg.ttop.offset) / gamma_fn(1.0 + 1.0 / shape);
    const FittedDiskClocks clocks = fit_system_clocks(point_cfg);
    const DiskLocalModel disk = build_disk_model(point_cfg, clocks);
    const LumpedChain chain =
        build_lumped_chain(disk, point_cfg.n, mds_loss_predicate(point_cfg));
    const double grid[1] = {t_hours};
    const DdfSeries series = loss_probability(chain, grid, 1.0, epsilon);
    points.push_back(SweepPoint{shape, series.value.at(0), chain.size(),
                                clocks.any_repaired()});
  }
  return points;
}

}  // namespace raidph
