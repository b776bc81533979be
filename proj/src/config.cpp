#include "raidph/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "raidph/math_util.hpp"

namespace raidph {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (std::string_view a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double require_number(const json& obj, const std::string& where,
                      const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ConfigError(where + ": missing or non-numeric '" + key + "'");
  }
  return obj[key].get<double>();
}

std::optional<WeibullSpec> parse_distribution(const json& obj,
                                              const std::string& where,
                                              bool none_allowed) {
  if (!obj.is_object()) {
    throw ConfigError(where + ": expected an object");
  }
  check_keys(obj, where, {"family", "shape", "scale", "offset"});
  const std::string family =
      obj.contains("family") ? obj["family"].get<std::string>() : "weibull";
  if (family == "none") {
    if (!none_allowed) {
      throw ConfigError(where + ": family 'none' is not allowed here");
    }
    check_keys(obj, where, {"family"});
    return std::nullopt;
  }
  WeibullSpec spec;
  spec.scale = require_number(obj, where, "scale");
  if (family == "exponential") {
    check_keys(obj, where, {"family", "scale"});
    spec.shape = 1.0;
    spec.offset = 0.0;
  } else if (family == "weibull") {
    spec.shape = require_number(obj, where, "shape");
    spec.offset = obj.contains("offset") ? obj["offset"].get<double>() : 0.0;
  } else {
    throw ConfigError(where + ": unknown family '" + family + "'");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

FitPlanEntry parse_fit_plan(const std::string& text, const std::string& where) {
  FitPlanEntry entry;
  if (text == "three-state") {
    entry.method = FitMethod::three_state;
  } else if (text == "four-state") {
    entry.method = FitMethod::four_state;
  } else if (text == "exact-exponential") {
    entry.method = FitMethod::exact_exponential;
  } else if (text.rfind("erlang:", 0) == 0) {
    entry.method = FitMethod::erlang;
    try {
      entry.stages = std::stoi(text.substr(7));
    } catch (...) {
      throw ConfigError(where + ": bad erlang stage count in '" + text + "'");
    }
    if (entry.stages < 1) {
      throw ConfigError(where + ": erlang stages must be >= 1");
    }
  } else {
    throw ConfigError(where + ": unknown fit method '" + text + "'");
  }
  return entry;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config root must be an object");
  }
  check_keys(doc, "config",
             {"system", "distributions", "fit", "analysis", "simulation",
              "sweep"});

  RunConfig cfg;

  if (!doc.contains("system") || !doc["system"].is_object()) {
    throw ConfigError("config: missing 'system' section");
  }
  const json& system = doc["system"];
  check_keys(system, "system", {"n", "k"});
  cfg.system.n = static_cast<int>(require_number(system, "system", "n"));
  cfg.system.k = static_cast<int>(require_number(system, "system", "k"));

  if (!doc.contains("distributions") || !doc["distributions"].is_object()) {
    throw ConfigError("config: missing 'distributions' section");
  }
  const json& dists = doc["distributions"];
  check_keys(dists, "distributions", {"ttop", "ttld", "ttr", "ttscr"});
  if (!dists.contains("ttop") || !dists.contains("ttr")) {
    throw ConfigError("distributions: 'ttop' and 'ttr' are required");
  }
  cfg.system.ttop =
      parse_distribution(dists["ttop"], "distributions.ttop", false).value();
  cfg.system.ttr =
      parse_distribution(dists["ttr"], "distributions.ttr", false).value();
  if (dists.contains("ttld")) {
    cfg.system.ttld = parse_distribution(dists["ttld"], "distributions.ttld",
                                         true);
    if (cfg.system.ttld && cfg.system.ttld->shape != 1.0) {
      throw ConfigError("distributions.ttld: must be exponential (shape 1)");
    }
  }
  if (dists.contains("ttscr")) {
    cfg.system.ttscr =
        parse_distribution(dists["ttscr"], "distributions.ttscr", true);
  }

  if (doc.contains("fit")) {
    const json& fit = doc["fit"];
    check_keys(fit, "fit", {"ttop", "ttr", "ttscr", "ttld", "allow_repair"});
    if (fit.contains("ttop")) {
      cfg.system.ttop_fit =
          parse_fit_plan(fit["ttop"].get<std::string>(), "fit.ttop");
    }
    if (fit.contains("ttr")) {
      cfg.system.ttr_fit =
          parse_fit_plan(fit["ttr"].get<std::string>(), "fit.ttr");
    }
    if (fit.contains("ttscr")) {
      cfg.system.ttscr_fit =
          parse_fit_plan(fit["ttscr"].get<std::string>(), "fit.ttscr");
    }
    if (fit.contains("ttld")) {
      const FitPlanEntry ttld_plan =
          parse_fit_plan(fit["ttld"].get<std::string>(), "fit.ttld");
      if (ttld_plan.method != FitMethod::exact_exponential) {
        throw ConfigError("fit.ttld: only 'exact-exponential' is supported");
      }
    }
    if (fit.contains("allow_repair")) {
      if (!fit["allow_repair"].is_boolean()) {
        throw ConfigError("fit.allow_repair: expected a boolean");
      }
      cfg.system.allow_repair = fit["allow_repair"].get<bool>();
    }
  }

  if (doc.contains("analysis")) {
    const json& analysis = doc["analysis"];
    check_keys(analysis, "analysis",
               {"grid_years", "epsilon", "group_multiplier"});
    if (analysis.contains("grid_years")) {
      if (!analysis["grid_years"].is_array()) {
        throw ConfigError("analysis.grid_years: expected an array");
      }
      cfg.analysis.grid_years.clear();
      for (const auto& v : analysis["grid_years"]) {
        if (!v.is_number()) {
          throw ConfigError("analysis.grid_years: non-numeric entry");
        }
        cfg.analysis.grid_years.push_back(v.get<double>());
      }
      if (cfg.analysis.grid_years.empty()) {
        throw ConfigError("analysis.grid_years: empty grid");
      }
    }
    if (analysis.contains("epsilon")) {
      cfg.analysis.epsilon = require_number(analysis, "analysis", "epsilon");
      if (!(cfg.analysis.epsilon > 0.0) || cfg.analysis.epsilon >= 1.0) {
        throw ConfigError("analysis.epsilon: must be in (0, 1)");
      }
    }
    if (analysis.contains("group_multiplier")) {
      cfg.analysis.group_multiplier =
          require_number(analysis, "analysis", "group_multiplier");
    }
  }

  if (doc.contains("simulation")) {
    const json& sim = doc["simulation"];
    check_keys(sim, "simulation", {"reps", "seed"});
    if (sim.contains("reps")) {
      cfg.simulation.reps = sim["reps"].get<std::uint64_t>();
    }
    if (sim.contains("seed")) {
      cfg.simulation.seed = sim["seed"].get<std::uint64_t>();
    }
  }

  if (doc.contains("sweep")) {
    const json& sweep = doc["sweep"];
    check_keys(sweep, "sweep", {"parameter", "values"});
    SweepSettings s;
    if (!sweep.contains("parameter") || !sweep["parameter"].is_string()) {
      throw ConfigError("sweep: missing 'parameter'");
    }
    s.parameter = sweep["parameter"].get<std::string>();
    if (s.parameter != "ttop.shape") {
      throw ConfigError("sweep.parameter: only 'ttop.shape' is supported");
    }
    if (!sweep.contains("values") || !sweep["values"].is_array() ||
        sweep["values"].empty()) {
      throw ConfigError("sweep: missing or empty 'values'");
    }
    for (const auto& v : sweep["values"]) {
      if (!v.is_number() || !(v.get<double>() > 0.0)) {
        throw ConfigError("sweep.values: entries must be positive numbers");
      }
      s.values.push_back(v.get<double>());
    }
    cfg.sweep = std::move(s);
  }

  try {
    cfg.system.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("system: ") + e.what());
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<double> RunConfig::grid_hours() const {
  std::vector<double> hours;
  hours.reserve(analysis.grid_years.size());
  for (double y : analysis.grid_years) {
    hours.push_back(y * kHoursPerYear);
  }
  return hours;
}

}  // namespace raidph
