#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <variant>

#include "raidph/config.hpp"
#include "raidph/sim.hpp"
#include "raidph/uniformization.hpp"

namespace py = pybind11;
using namespace raidph;

namespace {

WhichCurve curve_from_string(const std::string& which) {
  if (which == "pdf") return WhichCurve::pdf;
  if (which == "cdf") return WhichCurve::cdf;
  if (which == "hazard") return WhichCurve::hazard;
  throw py::value_error("which must be 'pdf', 'cdf' or 'hazard'");
}

py::dict three_state_dict(const ThreeStateParams& p) {
  py::dict d;
  d["alpha"] = p.alpha;
  d["sigma"] = p.sigma;
  d["beta"] = p.beta;
  return d;
}

}  // namespace

PYBIND11_MODULE(_raidph, m) {
  m.doc() = "Phase-type RAID reliability models: fits, lumped CTMC "
            "transient analysis, Monte Carlo cross-check";

  py::class_<WeibullSpec>(m, "WeibullSpec")
      .def(py::init([](double shape, double scale, double offset) {
             WeibullSpec w{shape, scale, offset};
             w.validate();
             return w;
           }),
           py::arg("shape"), py::arg("scale"), py::arg("offset") = 0.0)
      .def_readonly("shape", &WeibullSpec::shape)
      .def_readonly("scale", &WeibullSpec::scale)
      .def_readonly("offset", &WeibullSpec::offset)
      .def("pdf",
           [](const WeibullSpec& w, double t) {
             return weibull_eval(w, t, WhichCurve::pdf);
           })
      .def("cdf",
           [](const WeibullSpec& w, double t) {
             return weibull_eval(w, t, WhichCurve::cdf);
           })
      .def("hazard",
           [](const WeibullSpec& w, double t) {
             return weibull_eval(w, t, WhichCurve::hazard);
           })
      .def("moments",
           [](const WeibullSpec& w) {
             const MomentTriple m3 = weibull_moments(w);
             return py::make_tuple(m3.mu1, m3.mu2, m3.mu3);
           })
      .def("__repr__", [](const WeibullSpec& w) {
        return "WeibullSpec(shape=" + std::to_string(w.shape) +
               ", scale=" + std::to_string(w.scale) +
               ", offset=" + std::to_string(w.offset) + ")";
      });

  m.def("weibull_eval",
        [](const WeibullSpec& w, double t, const std::string& which) {
          return weibull_eval(w, t, curve_from_string(which));
        },
        py::arg("spec"), py::arg("t"), py::arg("which"));

  m.def("fit_three_state",
        [](double mu1, double mu2, double mu3) {
          const ThreeStateFitResult result =
              fit_three_state(MomentTriple{mu1, mu2, mu3});
          py::dict out;
          if (std::holds_alternative<ThreeStateFit>(result)) {
            const auto& fit = std::get<ThreeStateFit>(result);
            out["ok"] = true;
            out["plus"] = three_state_dict(fit.plus);
            out["minus"] = three_state_dict(fit.minus);
          } else {
            const auto& err = std::get<FitError>(result);
            out["ok"] = false;
            out["error"] = err.kind_name();
            const ThreeStateParams repaired =
                repair_infeasible_fit(err, MomentTriple{mu1, mu2, mu3});
            out["repaired"] = three_state_dict(repaired);
          }
          return out;
        },
        py::arg("mu1"), py::arg("mu2"), py::arg("mu3"),
        "Closed-form three-state moment match; returns both branches or the "
        "repaired parameters when the match is infeasible.");

  m.def("fit_erlang",
        [](int stages, const WeibullSpec& target) {
          const ErlangSpec e = fit_erlang(stages, target);
          return py::make_tuple(e.stages, e.rate);
        },
        py::arg("stages"), py::arg("target"));

  m.def("fit_four_state",
        [](const WeibullSpec& target, double horizon, int grid) {
          const FourStateParams p = fit_four_state(target, horizon, grid);
          py::dict d;
          d["advance1"] = p.advance1;
          d["advance2"] = p.advance2;
          d["fail1"] = p.fail1;
          d["fail2"] = p.fail2;
          d["fail3"] = p.fail3;
          return d;
        },
        py::arg("target"), py::arg("horizon") = 87600.0,
        py::arg("grid") = 200);

  m.def("analyze_ddf",
        [](const std::string& config_json, std::vector<double> grid_years,
           double epsilon) {
          RunConfig cfg = RunConfig::parse(config_json);
          if (!grid_years.empty()) cfg.analysis.grid_years = grid_years;
          if (epsilon > 0.0) cfg.analysis.epsilon = epsilon;
          const AnalysisResult result =
              analyze_ddf(cfg.system, cfg.grid_hours(),
                          cfg.analysis.group_multiplier, cfg.analysis.epsilon);
          py::dict out;
          out["t_years"] = cfg.analysis.grid_years;
          out["ddf"] = result.series.value;
          out["states"] = result.chain_states;
          out["repaired_fit"] = result.repaired_fit;
          return out;
        },
        py::arg("config_json"), py::arg("grid_years") = std::vector<double>{},
        py::arg("epsilon") = 0.0,
        "Analytic DDF(t) from a JSON run configuration.");

  m.def("simulate_ddf",
        [](const std::string& config_json, std::uint64_t reps,
           std::uint64_t seed) {
          RunConfig cfg = RunConfig::parse(config_json);
          if (reps > 0) cfg.simulation.reps = reps;
          if (seed > 0) cfg.simulation.seed = seed;
          SimOptions options;
          options.replications = cfg.simulation.reps;
          options.seed = cfg.simulation.seed;
          const SimSeries sim =
              estimate_ddf(cfg.system, cfg.grid_hours(),
                           cfg.analysis.group_multiplier, options);
          py::dict out;
          out["t_years"] = cfg.analysis.grid_years;
          out["ddf"] = sim.ddf.value;
          out["ci_low"] = sim.ddf.ci_low;
          out["ci_high"] = sim.ddf.ci_high;
          out["reps"] = sim.ddf.replications;
          out["seed"] = sim.ddf.seed;
          return out;
        },
        py::arg("config_json"), py::arg("reps") = 0, py::arg("seed") = 0,
        "Monte Carlo DDF(t) with Weibull clocks from a JSON run "
        "configuration.");

  m.def("shape_sweep",
        [](const std::string& config_json) {
          RunConfig cfg = RunConfig::parse(config_json);
          if (!cfg.sweep) {
            throw py::value_error("config has no sweep section");
          }
          const std::vector<SweepPoint> points = shape_sensitivity_sweep(
              cfg.system, cfg.sweep->values, cfg.grid_hours().back(),
              cfg.analysis.epsilon);
          py::list out;
          for (const SweepPoint& p : points) {
            py::dict d;
            d["shape"] = p.shape;
            d["dataloss_probability"] = p.dataloss_probability;
            d["states"] = p.chain_states;
            d["repaired"] = p.repaired;
            out.append(d);
          }
          return out;
        },
        py::arg("config_json"));

  m.attr("__version__") = "0.1.0";
}
