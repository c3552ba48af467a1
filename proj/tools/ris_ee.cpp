// Command-line front end: single solves, baselines and Monte-Carlo sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ris/channel.hpp"
#include "ris/config_io.hpp"
#include "ris/csv.hpp"
#include "ris/experiment.hpp"

namespace {

using nlohmann::json;

struct Common {
  std::string config_path;
  std::uint64_t seed = 1;
  std::vector<double> pmax_dbm;
  std::optional<double> qos_fraction;
  std::string algorithm = "sfp";
  std::string objective = "ee";
};

ris::SystemConfig load_scenario(const Common& c) {
  ris::SystemConfig config;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ris::IoFailure("cannot open " + c.config_path);
    config = ris::parse_scenario(json::parse(in));
  }
  if (!c.pmax_dbm.empty()) config.max_tx_power = ris::dbm_to_watts(c.pmax_dbm.front());
  if (c.qos_fraction) config.min_rates = {*c.qos_fraction * ris::genie_rate(config)};
  config.validate();
  return config;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

json outcome_json(const ris::SolveOutcome<double>& out) {
  json j;
  j["se"] = num(out.se);
  j["ee"] = num(out.ee);
  j["total_power"] = num(out.total_power);
  j["bs_tx_power"] = num(out.bs_tx_power);
  j["outer_iterations"] = out.outer_iterations;
  j["feasible"] = out.feasible;
  j["qos_relaxed"] = out.qos_relaxed;
  j["converged"] = out.converged;
  j["theta"] = std::vector<double>(out.phases.theta().data(), out.phases.theta().data() + out.phases.size());
  j["powers"] = std::vector<double>(out.powers.p.data(), out.powers.p.data() + out.powers.size());
  return j;
}

void add_common(CLI::App* app, Common& c, bool list_pmax) {
  app->add_option("--config", c.config_path, "Scenario JSON file");
  app->add_option("--seed", c.seed, "Channel seed (base seed for sweeps)");
  if (list_pmax) {
    app->add_option("--pmax-dbm", c.pmax_dbm, "P_max sweep values in dBm (replaces the plan sweep)");
  } else {
    app->add_option("--pmax-dbm", c.pmax_dbm, "P_max in dBm")->expected(1);
  }
  app->add_option("--qos-fraction", c.qos_fraction, "R_min as a fraction of the genie rate");
  app->add_option("--algorithm", c.algorithm, "Phase method")->check(CLI::IsMember({"gradient", "sfp"}));
  app->add_option("--objective", c.objective, "Objective")->check(CLI::IsMember({"ee", "se"}));
}

ris::SolverEntry solver_from(const Common& c) {
  return ris::parse_solver(json{{"algorithm", c.algorithm}, {"objective", c.objective}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient RIS-assisted multi-user MISO downlink solver"};
  app.require_subcommand(1);

  Common solve_opts, oracle_opts, relay_opts, sweep_opts;
  auto* solve = app.add_subcommand("solve", "Solve one channel realization");
  add_common(solve, solve_opts, false);

  auto* oracle = app.add_subcommand("oracle", "Joint phase and power grid search");
  add_common(oracle, oracle_opts, false);
  ris::GridSpec grid;
  oracle->add_option("--points-per-angle", grid.points_per_angle);
  oracle->add_option("--points-per-power", grid.points_per_power);
  oracle->add_option("--budget", grid.budget);

  auto* relay = app.add_subcommand("relay", "AF relay benchmark on one realization");
  add_common(relay, relay_opts, false);
  ris::RelayGridSpec relay_grid;
  relay->add_option("--magnitude-levels", relay_grid.magnitude_levels);
  relay->add_option("--phase-levels", relay_grid.phase_levels);

  auto* sweep = app.add_subcommand("sweep", "Run an experiment plan");
  std::string plan_path;
  std::string out_path;
  std::optional<int> trials;
  std::optional<int> workers;
  sweep->add_option("plan", plan_path, "Experiment plan JSON")->required();
  add_common(sweep, sweep_opts, true);
  sweep->add_option("--trials", trials, "Monte-Carlo trials per sweep point");
  sweep->add_option("--out", out_path, "Per-trial CSV path (aggregate written alongside)");
  sweep->add_option("--workers", workers, "Worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const auto config = load_scenario(solve_opts);
      const auto ch = ris::generate_channels(config, solve_opts.seed);
      const auto entry = solver_from(solve_opts);
      const auto out = ris::maximize(ch, config, entry.spec);
      json j = outcome_json(out);
      j["seed"] = solve_opts.seed;
      j["channel_hash"] = ris::channel_hash(ch);
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*oracle) {
      const auto config = load_scenario(oracle_opts);
      const auto ch = ris::generate_channels(config, oracle_opts.seed);
      const auto obj = oracle_opts.objective == "se" ? ris::Objective::sum_rate : ris::Objective::ee;
      const auto out = ris::joint_grid_max(ch, config, obj, grid);
      json j = outcome_json(out);
      j["seed"] = oracle_opts.seed;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*relay) {
      const auto config = load_scenario(relay_opts);
      const auto ch = ris::generate_channels(config, relay_opts.seed);
      const auto out = ris::optimize_relay(ch, config, relay_grid);
      json j;
      j["se"] = num(out.se);
      j["ee"] = num(out.ee);
      j["total_power"] = num(out.total_power);
      j["bs_tx_power"] = num(out.bs_tx_power);
      j["relay_tx_power"] = num(out.relay_tx_power);
      j["outer_iterations"] = out.outer_iterations;
      j["feasible"] = out.feasible;
      j["grid_points"] = out.grid_points;
      j["max_elements"] = relay_grid.max_elements;
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    auto plan = ris::load_plan(plan_path);
    if (!sweep_opts.config_path.empty()) plan.scenario = load_scenario(sweep_opts);
    if (sweep->count("--seed")) plan.base_seed = sweep_opts.seed;
    if (trials) plan.trials = *trials;
    if (workers) plan.workers = *workers;
    if (!out_path.empty()) plan.output_path = out_path;
    if (!sweep_opts.pmax_dbm.empty()) {
      plan.sweep.kind = ris::SweepKind::p_max;
      plan.sweep.values.clear();
      for (double dbm : sweep_opts.pmax_dbm) plan.sweep.values.push_back(ris::dbm_to_watts(dbm));
    }
    if (sweep_opts.qos_fraction)
      plan.scenario.min_rates = {*sweep_opts.qos_fraction * ris::genie_rate(plan.scenario)};
    if (sweep->count("--algorithm") || sweep->count("--objective")) plan.solvers = {solver_from(sweep_opts)};
    if (plan.output_path.empty()) throw ris::InvalidArgument("sweep: no output path (use --out)");

    const auto result = ris::run_experiment(plan, &std::cerr);
    ris::emit_csv(result, plan.output_path);
    std::cerr << "wrote " << plan.output_path << " and " << ris::aggregate_path(plan.output_path)
              << " (" << result.errors << " errored rows)\n";
    return result.errors == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
