#include "ris/config_io.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>

namespace ris {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double number(const json& j, const char* key) {
  if (!j.is_number()) throw InvalidArgument(std::string("expected a number for ") + key);
  return j.get<double>();
}

int integer(const json& j, const char* key) {
  if (!j.is_number_integer()) throw InvalidArgument(std::string("expected an integer for ") + key);
  return j.get<int>();
}

Point2 point(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) throw InvalidArgument(std::string(key) + " must be [x, y]");
  return {number(j[0], key), number(j[1], key)};
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* where) {
  if (!j.is_object()) throw InvalidArgument(std::string(where) + " must be an object");
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw InvalidArgument(std::string(where) + ": unknown field '" + item.key() + "'");
}

PhaseMethod phase_method(const std::string& s) {
  if (s == "gradient") return PhaseMethod::gradient;
  if (s == "sfp") return PhaseMethod::sfp;
  throw InvalidArgument("algorithm must be gradient or sfp");
}

Objective objective(const std::string& s) {
  if (s == "ee") return Objective::ee;
  if (s == "se") return Objective::sum_rate;
  throw InvalidArgument("objective must be ee or se");
}

}  // namespace

double parse_power(const std::string& text) {
  const std::string s = trim(text);
  char* end = nullptr;
  const double value = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw InvalidArgument("power: no number in '" + text + "'");
  const std::string unit = trim(std::string(end));
  if (unit.empty() || unit == "W") return value;
  if (unit == "mW") return value * 1e-3;
  if (unit == "dBW") return dbw_to_watts(value);
  if (unit == "dBm") return dbm_to_watts(value);
  throw InvalidArgument("power: unknown unit '" + unit + "'");
}

double parse_power(const json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_power(value.get<std::string>());
  throw InvalidArgument("power must be a number (watts) or a string with a unit");
}

SystemConfig parse_scenario(const json& j, SystemConfig c) {
  reject_unknown(j,
                 {"M", "K", "N", "P_max", "sigma2", "xi", "P_BS", "P_UE", "P_n", "b", "BW", "R_min",
                  "bs_pos", "ris_pos", "user_region", "pathloss_ref", "pathloss_exp", "min_distance",
                  "epsilon", "xi_AF", "P_R", "P_R_max", "sigma2_R", "general_regime"},
                 "scenario");
  if (j.contains("M")) c.bs_antennas = integer(j["M"], "M");
  if (j.contains("K")) c.users = integer(j["K"], "K");
  if (j.contains("N")) c.ris_elements = integer(j["N"], "N");
  if (j.contains("P_max")) c.max_tx_power = parse_power(j["P_max"]);
  if (j.contains("sigma2")) c.noise_power = parse_power(j["sigma2"]);
  if (j.contains("xi")) c.amplifier_inefficiency = number(j["xi"], "xi");
  if (j.contains("P_BS")) c.bs_static_power = parse_power(j["P_BS"]);
  if (j.contains("P_UE")) c.ue_static_power = parse_power(j["P_UE"]);
  if (j.contains("P_n")) c.element_power = parse_power(j["P_n"]);
  if (j.contains("b")) c.phase_bits = integer(j["b"], "b");
  if (j.contains("BW")) c.bandwidth = number(j["BW"], "BW");
  if (j.contains("R_min")) {
    const auto& r = j["R_min"];
    c.min_rates.clear();
    if (r.is_array()) {
      for (const auto& v : r) c.min_rates.push_back(number(v, "R_min"));
    } else {
      c.min_rates.push_back(number(r, "R_min"));
    }
  }
  if (j.contains("bs_pos")) c.bs_pos = point(j["bs_pos"], "bs_pos");
  if (j.contains("ris_pos")) c.ris_pos = point(j["ris_pos"], "ris_pos");
  if (j.contains("user_region")) {
    const auto& r = j["user_region"];
    if (!r.is_array() || r.size() != 4)
      throw InvalidArgument("user_region must be [x_min, x_max, y_min, y_max]");
    c.user_region = {number(r[0], "user_region"), number(r[1], "user_region"),
                     number(r[2], "user_region"), number(r[3], "user_region")};
  }
  if (j.contains("pathloss_ref")) c.pathloss_ref = number(j["pathloss_ref"], "pathloss_ref");
  if (j.contains("pathloss_exp")) c.pathloss_exp = number(j["pathloss_exp"], "pathloss_exp");
  if (j.contains("min_distance")) c.min_distance = number(j["min_distance"], "min_distance");
  if (j.contains("epsilon")) c.epsilon = number(j["epsilon"], "epsilon");
  if (j.contains("xi_AF")) c.relay_amplifier_inefficiency = number(j["xi_AF"], "xi_AF");
  if (j.contains("P_R")) c.relay_antenna_power = parse_power(j["P_R"]);
  if (j.contains("P_R_max")) c.relay_max_power = parse_power(j["P_R_max"]);
  if (j.contains("sigma2_R")) c.relay_noise_power = parse_power(j["sigma2_R"]);
  if (j.contains("general_regime")) c.general_regime = j["general_regime"].get<bool>();
  c.validate();
  return c;
}

SolverEntry parse_solver(const json& j) {
  reject_unknown(j,
                 {"id", "kind", "algorithm", "objective", "epsilon", "phase_epsilon", "power_epsilon",
                  "max_outer_iters", "max_phase_iters", "qos_policy", "stop_rule", "magnitude_levels",
                  "phase_levels", "max_elements", "noise_form", "points_per_angle",
                  "points_per_power", "max_dim", "budget"},
                 "solver");
  SolverEntry s;
  const std::string kind = j.value("kind", "alternating");
  if (kind == "alternating") {
    s.kind = SolverKind::alternating;
  } else if (kind == "relay") {
    s.kind = SolverKind::relay;
  } else if (kind == "oracle") {
    s.kind = SolverKind::oracle;
  } else {
    throw InvalidArgument("solver kind must be alternating, relay or oracle");
  }
  if (j.contains("algorithm")) s.spec.phase_method = phase_method(j["algorithm"].get<std::string>());
  if (j.contains("objective")) {
    s.spec.objective = objective(j["objective"].get<std::string>());
    s.oracle_objective = s.spec.objective;
  }
  if (j.contains("epsilon")) s.spec.epsilon = number(j["epsilon"], "epsilon");
  if (j.contains("phase_epsilon")) s.spec.phase_epsilon = number(j["phase_epsilon"], "phase_epsilon");
  if (j.contains("power_epsilon")) s.spec.power_epsilon = number(j["power_epsilon"], "power_epsilon");
  if (j.contains("max_outer_iters")) s.spec.max_outer_iters = integer(j["max_outer_iters"], "max_outer_iters");
  if (j.contains("max_phase_iters")) s.spec.max_phase_iters = integer(j["max_phase_iters"], "max_phase_iters");
  if (j.contains("qos_policy")) {
    const auto p = j["qos_policy"].get<std::string>();
    if (p == "strict") {
      s.spec.qos_policy = QosPolicy::strict;
    } else if (p == "relax") {
      s.spec.qos_policy = QosPolicy::relax_on_infeasible;
    } else {
      throw InvalidArgument("qos_policy must be strict or relax");
    }
  }
  if (j.contains("stop_rule")) {
    const auto r = j["stop_rule"].get<std::string>();
    if (r == "relative") {
      s.spec.stop_rule = StopRule::relative;
    } else if (r == "squared_change") {
      s.spec.stop_rule = StopRule::squared_change;
    } else {
      throw InvalidArgument("stop_rule must be relative or squared_change");
    }
  }
  if (j.contains("magnitude_levels")) s.relay_grid.magnitude_levels = integer(j["magnitude_levels"], "magnitude_levels");
  if (j.contains("phase_levels")) s.relay_grid.phase_levels = integer(j["phase_levels"], "phase_levels");
  if (j.contains("max_elements")) s.relay_grid.max_elements = integer(j["max_elements"], "max_elements");
  if (j.contains("noise_form")) {
    const auto f = j["noise_form"].get<std::string>();
    if (f == "squared") {
      s.relay_noise_form = NoiseAmplification::squared;
    } else if (f == "linear") {
      s.relay_noise_form = NoiseAmplification::linear;
    } else {
      throw InvalidArgument("noise_form must be squared or linear");
    }
  }
  if (j.contains("points_per_angle")) s.oracle_grid.points_per_angle = integer(j["points_per_angle"], "points_per_angle");
  if (j.contains("points_per_power")) s.oracle_grid.points_per_power = integer(j["points_per_power"], "points_per_power");
  if (j.contains("max_dim")) s.oracle_grid.max_dim = integer(j["max_dim"], "max_dim");
  if (j.contains("budget")) s.oracle_grid.budget = number(j["budget"], "budget");

  if (j.contains("id")) {
    s.id = j["id"].get<std::string>();
  } else if (s.kind == SolverKind::alternating) {
    s.id = s.spec.phase_method == PhaseMethod::sfp ? "sfp" : "gradient";
    if (s.spec.objective == Objective::sum_rate) s.id += "_se";
  } else {
    s.id = kind;
  }
  s.spec.validate();
  return s;
}

ExperimentPlan parse_plan(const json& j) {
  reject_unknown(j,
                 {"scenario", "sweep", "trials", "base_seed", "solvers", "output_path", "workers",
                  "record_wall_time"},
                 "plan");
  ExperimentPlan plan;
  if (j.contains("scenario")) plan.scenario = parse_scenario(j["scenario"]);
  if (!j.contains("sweep")) throw InvalidArgument("plan: sweep is required");
  const auto& sw = j["sweep"];
  reject_unknown(sw, {"kind", "values"}, "sweep");
  const std::string kind = sw.value("kind", "P_max");
  if (!sw.contains("values") || !sw["values"].is_array())
    throw InvalidArgument("sweep: values must be a list");
  for (const auto& v : sw["values"]) {
    if (kind == "P_max") {
      plan.sweep.values.push_back(parse_power(v));
    } else {
      plan.sweep.values.push_back(number(v, "sweep value"));
    }
  }
  if (kind == "P_max") {
    plan.sweep.kind = SweepKind::p_max;
  } else if (kind == "N") {
    plan.sweep.kind = SweepKind::elements;
  } else if (kind == "qos_fraction") {
    plan.sweep.kind = SweepKind::qos_fraction;
  } else if (kind == "snr_db") {
    plan.sweep.kind = SweepKind::snr_db;
  } else {
    throw InvalidArgument("sweep kind must be P_max, N, qos_fraction or snr_db");
  }
  if (j.contains("trials")) plan.trials = integer(j["trials"], "trials");
  if (j.contains("base_seed")) plan.base_seed = j["base_seed"].get<std::uint64_t>();
  if (j.contains("workers")) plan.workers = integer(j["workers"], "workers");
  if (j.contains("record_wall_time")) plan.record_wall_time = j["record_wall_time"].get<bool>();
  if (j.contains("output_path")) plan.output_path = j["output_path"].get<std::string>();
  if (j.contains("solvers")) {
    for (const auto& s : j["solvers"]) plan.solvers.push_back(parse_solver(s));
  } else {
    plan.solvers.push_back(parse_solver(json{{"algorithm", "gradient"}}));
    plan.solvers.push_back(parse_solver(json{{"algorithm", "sfp"}}));
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open plan file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("plan file: ") + e.what());
  }
  return parse_plan(j);
}

}  // namespace ris
