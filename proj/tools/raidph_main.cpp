// raidph: phase-type approximations of disk lifetime models, symmetry-
// reduced CTMC transient analysis of RAID/MDS groups, and a Monte Carlo
// cross-check of the analytic results.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "raidph/config.hpp"
#include "raidph/math_util.hpp"
#include "raidph/sim.hpp"
#include "raidph/uniformization.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfigError = 2;
constexpr int kExitFitInfeasible = 3;
constexpr int kExitStateCap = 4;

std::string num6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

struct OutputTarget {
  std::ostream* stream = nullptr;
  std::unique_ptr<std::ofstream> file;

  static OutputTarget make(const std::string& path) {
    OutputTarget target;
    if (path.empty() || path == "-") {
      target.stream = &std::cout;
    } else {
      target.file = std::make_unique<std::ofstream>(path);
      if (!*target.file) {
        throw std::runtime_error("cannot open output file '" + path + "'");
      }
      target.stream = target.file.get();
    }
    return target;
  }
};

struct CommonFlags {
  std::string config_path;
  std::string out_path;
  std::string export_generator_path;
  std::uint64_t reps = 0;
  bool reps_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double epsilon = 0.0;
  bool epsilon_set = false;
  int states = 0;  // 3 or 4, overrides the ttop fit plan
  int erlang_stages = 0;
  bool allow_repair = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration file")
      ->required();
  cmd->add_option("--out", flags.out_path, "output file (default stdout)");
  cmd->add_option("--reps", flags.reps, "simulation replications")
      ->each([&](const std::string&) { flags.reps_set = true; });
  cmd->add_option("--seed", flags.seed, "master random seed")
      ->each([&](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--epsilon", flags.epsilon,
                  "uniformization truncation epsilon")
      ->each([&](const std::string&) { flags.epsilon_set = true; });
  cmd->add_option("--states", flags.states,
                  "disk failure model: 3 (three-state) or 4 (four-state)")
      ->check(CLI::IsMember({3, 4}));
  cmd->add_option("--erlang-stages", flags.erlang_stages,
                  "stage count for Erlang repair/scrub fits");
  cmd->add_flag("--allow-repair", flags.allow_repair,
                "repair infeasible moment matches instead of failing");
  cmd->add_option("--export-generator", flags.export_generator_path,
                  "write the lumped generator as sparse triplets (analyze)");
}

raidph::RunConfig load_config(const CommonFlags& flags) {
  raidph::RunConfig cfg = raidph::RunConfig::load(flags.config_path);
  if (flags.reps_set) cfg.simulation.reps = flags.reps;
  if (flags.seed_set) cfg.simulation.seed = flags.seed;
  if (flags.epsilon_set) {
    if (!(flags.epsilon > 0.0) || flags.epsilon >= 1.0) {
      throw raidph::ConfigError("--epsilon must be in (0, 1)");
    }
    cfg.analysis.epsilon = flags.epsilon;
  }
  if (flags.states == 3) {
    cfg.system.ttop_fit = {raidph::FitMethod::three_state, 3};
  } else if (flags.states == 4) {
    cfg.system.ttop_fit = {raidph::FitMethod::four_state, 3};
  }
  if (flags.erlang_stages > 0) {
    if (cfg.system.ttr_fit.method == raidph::FitMethod::erlang) {
      cfg.system.ttr_fit.stages = flags.erlang_stages;
    }
    if (cfg.system.ttscr_fit.method == raidph::FitMethod::erlang) {
      cfg.system.ttscr_fit.stages = flags.erlang_stages;
    }
  }
  if (flags.allow_repair) cfg.system.allow_repair = true;
  return cfg;
}

void write_meta(std::ostream& out, const raidph::RunConfig& cfg,
                const CommonFlags& flags, bool with_sim) {
  out << "# raidph " << kVersion << "\n";
  out << "# config " << flags.config_path << "\n";
  out << "# epsilon " << num6(cfg.analysis.epsilon) << "\n";
  if (with_sim) {
    out << "# reps " << cfg.simulation.reps << " seed " << cfg.simulation.seed
        << "\n";
  }
}

// ---------------------------------------------------------------------------
// fit

nlohmann::json weibull_json(const raidph::WeibullSpec& w) {
  return {{"shape", w.shape}, {"scale", w.scale}, {"offset", w.offset}};
}

nlohmann::json report_json(const raidph::FitReport& report) {
  using namespace raidph;
  nlohmann::json j;
  j["target"] = weibull_json(report.target);
  j["repaired"] = report.repaired;
  j["hazard_limit"] = report.hazard_limit;
  if (std::holds_alternative<ThreeStateParams>(report.params)) {
    const auto& p = std::get<ThreeStateParams>(report.params);
    j["method"] = "three-state";
    j[report.minus_branch ? "branch_plus" : "params"] = {
        {"alpha", p.alpha}, {"sigma", p.sigma}, {"beta", p.beta}};
    if (report.minus_branch) {
      j["branch_minus"] = {{"alpha", report.minus_branch->alpha},
                           {"sigma", report.minus_branch->sigma},
                           {"beta", report.minus_branch->beta}};
    }
    j["max_cdf_excess"] = report.max_cdf_excess;
    j["min_cdf_deficit"] = report.min_cdf_deficit;
  } else if (std::holds_alternative<FourStateParams>(report.params)) {
    const auto& p = std::get<FourStateParams>(report.params);
    j["method"] = "four-state";
    j["params"] = {{"advance1", p.advance1},
                   {"advance2", p.advance2},
                   {"fail1", p.fail1},
                   {"fail2", p.fail2},
                   {"fail3", p.fail3}};
    j["max_cdf_excess"] = report.max_cdf_excess;
    j["min_cdf_deficit"] = report.min_cdf_deficit;
  } else {
    const auto& e = std::get<raidph::ErlangSpec>(report.params);
    j["method"] = "erlang";
    j["stages"] = e.stages;
    j["rate"] = e.rate;
  }
  return j;
}

void print_report(const std::string& name, const raidph::FitReport& report) {
  using namespace raidph;
  if (std::holds_alternative<ThreeStateParams>(report.params)) {
    const auto& p = std::get<ThreeStateParams>(report.params);
    if (report.minus_branch) {
      std::cout << "  three-state branch +: alpha=" << num6(p.alpha)
                << " sigma=" << num6(p.sigma) << " beta=" << num6(p.beta)
                << "\n";
      std::cout << "  three-state branch -: alpha="
                << num6(report.minus_branch->alpha)
                << " sigma=" << num6(report.minus_branch->sigma)
                << " beta=" << num6(report.minus_branch->beta) << "\n";
    } else {
      std::cout << "  repaired three-state: alpha=" << num6(p.alpha)
                << " sigma=" << num6(p.sigma) << " beta=" << num6(p.beta)
                << "\n";
    }
    std::cout << "  cdf deviation over 10 yr: max excess "
              << num6(report.max_cdf_excess) << ", min deficit "
              << num6(report.min_cdf_deficit) << "\n";
    std::cout << "  hazard limit: " << num6(report.hazard_limit)
              << " per hour\n";
  } else if (std::holds_alternative<FourStateParams>(report.params)) {
    const auto& p = std::get<FourStateParams>(report.params);
    std::cout << "  four-state: advance=(" << num6(p.advance1) << ", "
              << num6(p.advance2) << ") fail=(" << num6(p.fail1) << ", "
              << num6(p.fail2) << ", " << num6(p.fail3) << ")\n";
    std::cout << "  fitted mean: " << num6(four_state_mu1(p)) << " h (target "
              << num6(weibull_moments(report.target).mu1) << " h)\n";
    std::cout << "  cdf deviation over 10 yr: max excess "
              << num6(report.max_cdf_excess) << ", min deficit "
              << num6(report.min_cdf_deficit) << "\n";
  } else {
    const auto& e = std::get<ErlangSpec>(report.params);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", e.rate);
    std::cout << "  erlang-" << e.stages << ": rate=" << buf
              << " per hour (mean " << num6(e.mean()) << " h)\n";
  }
  (void)name;
}

int run_fit(const CommonFlags& flags) {
  using namespace raidph;
  RunConfig cfg = load_config(flags);
  const SystemConfig& sys = cfg.system;

  nlohmann::json out_doc;

  struct Entry {
    const char* name;
    const WeibullSpec* target;
    FitPlanEntry plan;
  };
  std::vector<Entry> entries;
  entries.push_back({"ttop", &sys.ttop, sys.ttop_fit});
  entries.push_back({"ttr", &sys.ttr, sys.ttr_fit});
  if (sys.ttscr) entries.push_back({"ttscr", &*sys.ttscr, sys.ttscr_fit});

  for (const Entry& e : entries) {
    std::cout << e.name << ": weibull(shape=" << num6(e.target->shape)
              << ", scale=" << num6(e.target->scale)
              << ", offset=" << num6(e.target->offset) << ")\n";
    FitReport report;
    switch (e.plan.method) {
      case FitMethod::three_state: {
        const auto result =
            three_state_fit_report(*e.target, sys.allow_repair);
        if (std::holds_alternative<FitError>(result)) {
          std::cerr << "error: " << e.name
                    << " three-state moment match infeasible ("
                    << std::get<FitError>(result).kind_name()
                    << "); rerun with --allow-repair to continue\n";
          return kExitFitInfeasible;
        }
        report = std::get<FitReport>(result);
        if (report.repaired) {
          std::cerr << "warning: " << e.name
                    << " moment match infeasible; repaired fit in use\n";
        }
        break;
      }
      case FitMethod::four_state:
        report = four_state_fit_report(*e.target, sys.four_state_horizon,
                                       sys.four_state_grid);
        break;
      case FitMethod::erlang:
        report = erlang_fit_report(e.plan.stages, *e.target);
        break;
      case FitMethod::exact_exponential:
        report = erlang_fit_report(1, *e.target);
        break;
    }
    print_report(e.name, report);
    out_doc[e.name] = report_json(report);
  }
  if (!flags.out_path.empty()) {
    OutputTarget target = OutputTarget::make(flags.out_path);
    *target.stream << out_doc.dump(2) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// analyze / simulate / compare / sweep

int run_analyze(const CommonFlags& flags) {
  using namespace raidph;
  RunConfig cfg = load_config(flags);
  const std::vector<double> grid = cfg.grid_hours();
  const FittedDiskClocks clocks = fit_system_clocks(cfg.system);
  if (clocks.any_repaired()) {
    std::cerr << "warning: repaired fit in use\n";
  }
  const DiskLocalModel disk = build_disk_model(cfg.system, clocks);
  const LumpedChain chain =
      build_lumped_chain(disk, cfg.system.n, mds_loss_predicate(cfg.system));
  if (!flags.export_generator_path.empty()) {
    std::ofstream gen_out(flags.export_generator_path);
    if (!gen_out) {
      throw std::runtime_error("cannot open generator export file '" +
                               flags.export_generator_path + "'");
    }
    export_triplets(chain, gen_out);
  }
  DdfSeries series = loss_probability(chain, grid,
                                      cfg.analysis.group_multiplier,
                                      cfg.analysis.epsilon);
  if (clocks.any_repaired()) series.flags.push_back("repaired_fit");
  OutputTarget target = OutputTarget::make(flags.out_path);
  std::ostream& out = *target.stream;
  write_meta(out, cfg, flags, false);
  out << "t_years,ddf_analytic,states,epsilon,flags\n";
  const std::string flag_text = join_flags(series.flags);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << num6(cfg.analysis.grid_years[i]) << ',' << num6(series.value[i])
        << ',' << chain.size() << ',' << num6(cfg.analysis.epsilon) << ','
        << flag_text << "\n";
  }
  return 0;
}

int run_simulate(const CommonFlags& flags) {
  using namespace raidph;
  RunConfig cfg = load_config(flags);
  const std::vector<double> grid = cfg.grid_hours();
  SimOptions options;
  options.replications = cfg.simulation.reps;
  options.seed = cfg.simulation.seed;
  const SimSeries sim = estimate_ddf(cfg.system, grid,
                                     cfg.analysis.group_multiplier, options);
  for (const std::string& f : sim.ddf.flags) {
    if (f == "exact_ci") {
      std::cerr << "warning: low loss counts; exact Clopper-Pearson bounds "
                   "in use\n";
    }
  }
  OutputTarget target = OutputTarget::make(flags.out_path);
  std::ostream& out = *target.stream;
  write_meta(out, cfg, flags, true);
  out << "t_years,ddf_sim,ci_low,ci_high,reps,seed,flags\n";
  const std::string flag_text = join_flags(sim.ddf.flags);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << num6(cfg.analysis.grid_years[i]) << ',' << num6(sim.ddf.value[i])
        << ',' << num6(sim.ddf.ci_low[i]) << ',' << num6(sim.ddf.ci_high[i])
        << ',' << cfg.simulation.reps << ',' << cfg.simulation.seed << ','
        << flag_text << "\n";
  }
  return 0;
}

int run_compare(const CommonFlags& flags) {
  using namespace raidph;
  RunConfig cfg = load_config(flags);
  const std::vector<double> grid = cfg.grid_hours();
  const AnalysisResult analytic =
      analyze_ddf(cfg.system, grid, cfg.analysis.group_multiplier,
                  cfg.analysis.epsilon);
  SimOptions options;
  options.replications = cfg.simulation.reps;
  options.seed = cfg.simulation.seed;
  const SimSeries sim = estimate_ddf(cfg.system, grid,
                                     cfg.analysis.group_multiplier, options);
  for (const std::string& f : sim.ddf.flags) {
    if (f == "exact_ci") {
      std::cerr << "warning: low loss counts; exact Clopper-Pearson bounds "
                   "in use\n";
    }
  }
  if (analytic.repaired_fit) {
    std::cerr << "warning: repaired fit in use\n";
  }
  OutputTarget target = OutputTarget::make(flags.out_path);
  std::ostream& out = *target.stream;
  write_meta(out, cfg, flags, true);
  out << "t_years,ddf_analytic,ddf_sim,ci_low,ci_high,sdev_pct,flags\n";
  std::vector<std::string> flags_union = analytic.series.flags;
  for (const auto& f : sim.ddf.flags) flags_union.push_back(f);
  const std::string flag_text = join_flags(flags_union);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = analytic.series.value[i];
    const double s = sim.ddf.value[i];
    const double sdev = s != 0.0 ? (a - s) / s * 100.0 : 0.0;
    out << num6(cfg.analysis.grid_years[i]) << ',' << num6(a) << ',' << num6(s)
        << ',' << num6(sim.ddf.ci_low[i]) << ',' << num6(sim.ddf.ci_high[i])
        << ',' << num6(sdev) << ',' << flag_text << "\n";
  }
  return 0;
}

int run_sweep(const CommonFlags& flags) {
  using namespace raidph;
  RunConfig cfg = load_config(flags);
  if (!cfg.sweep) {
    throw ConfigError("sweep: config has no 'sweep' section");
  }
  const double t_hours = cfg.grid_hours().back();
  const std::vector<SweepPoint> points = shape_sensitivity_sweep(
      cfg.system, cfg.sweep->values, t_hours, cfg.analysis.epsilon);
  OutputTarget target = OutputTarget::make(flags.out_path);
  std::ostream& out = *target.stream;
  write_meta(out, cfg, flags, false);
  out << "shape,dataloss_probability,states,flags\n";
  for (const SweepPoint& p : points) {
    if (p.repaired) {
      std::cerr << "warning: shape " << num6(p.shape)
                << " used a repaired fit\n";
    }
    out << num6(p.shape) << ',' << num6(p.dataloss_probability) << ','
        << p.chain_states << ',' << (p.repaired ? "repaired_fit" : "") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-type RAID reliability models, analytic and simulated"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonFlags fit_flags, analyze_flags, simulate_flags, compare_flags,
      sweep_flags;
  CLI::App* cmd_fit =
      app.add_subcommand("fit", "fit phase-type models to the configured "
                                "lifetime distributions");
  add_common_flags(cmd_fit, fit_flags);
  CLI::App* cmd_analyze = app.add_subcommand(
      "analyze", "analytic DDF(t) series via the lumped CTMC");
  add_common_flags(cmd_analyze, analyze_flags);
  CLI::App* cmd_simulate = app.add_subcommand(
      "simulate", "Monte Carlo DDF(t) series with Weibull clocks");
  add_common_flags(cmd_simulate, simulate_flags);
  CLI::App* cmd_compare = app.add_subcommand(
      "compare", "analytic vs simulated DDF(t) with deviation column");
  add_common_flags(cmd_compare, compare_flags);
  CLI::App* cmd_sweep = app.add_subcommand(
      "sweep", "failure-shape sensitivity sweep of data-loss probability");
  add_common_flags(cmd_sweep, sweep_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_fit->parsed()) return run_fit(fit_flags);
    if (cmd_analyze->parsed()) return run_analyze(analyze_flags);
    if (cmd_simulate->parsed()) return run_simulate(simulate_flags);
    if (cmd_compare->parsed()) return run_compare(compare_flags);
    if (cmd_sweep->parsed()) return run_sweep(sweep_flags);
  } catch (const raidph::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const raidph::FitInfeasible& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFitInfeasible;
  } catch (const raidph::StateCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStateCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
