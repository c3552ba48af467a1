#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ris/alternating.hpp"
#include "ris/model.hpp"
#include "ris/oracle.hpp"
#include "ris/relay.hpp"
#include "ris/system_config.hpp"

namespace ris {

enum class SweepKind {
  p_max,         // values in watts
  elements,      // N (and K = N unless the scenario is in the general regime)
  qos_fraction,  // R_min = value * genie rate
  snr_db,        // sigma^2 = P_max / 10^(value / 10)
};

struct Sweep {
  SweepKind kind = SweepKind::p_max;
  std::vector<double> values;
};

enum class SolverKind { alternating, relay, oracle };

struct SolverEntry {
  std::string id;
  SolverKind kind = SolverKind::alternating;
  SolverSpec spec;                    // alternating
  RelayGridSpec relay_grid;           // relay
  NoiseAmplification relay_noise_form = NoiseAmplification::squared;
  GridSpec oracle_grid;               // oracle
  Objective oracle_objective = Objective::ee;
};

struct ExperimentPlan {
  SystemConfig scenario;
  Sweep sweep;
  int trials = 100;
  std::uint64_t base_seed = 1;
  std::vector<SolverEntry> solvers;
  std::string output_path;
  int workers = 1;
  bool record_wall_time = false;  // off by default so reruns are bitwise identical

  // Throws InvalidArgument.
  void validate() const;
};

struct TrialRecord {
  double sweep_value = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::uint64_t channel_hash = 0;
  std::string solver;
  double se = 0;
  double ee = 0;
  double total_power = 0;
  double bs_power = 0;
  int iterations = 0;
  bool feasible = false;
  bool qos_relaxed = false;
  bool converged = false;
  double wall_time = 0;  // seconds, 0 unless timing is recorded
  std::string error;     // empty on success
};

struct AggregateRecord {
  double sweep_value = 0;
  std::string solver;
  int trials = 0;
  int errors = 0;
  double se_mean = 0;
  double se_stderr = 0;
  double ee_mean = 0;
  double ee_stderr = 0;
  double total_power_mean = 0;
  double bs_power_mean = 0;
  double iterations_mean = 0;
  double feasibility_rate = 0;  // feasible without relaxing the QoS targets
  double relaxed_rate = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;  // sweep-point major, then trial, then solver
  std::vector<AggregateRecord> aggregates;
  int errors = 0;
};

// Scenario at one sweep point.
SystemConfig config_at(const ExperimentPlan& plan, double sweep_value);

// Channel of a trial at a sweep point. Element sweeps draw once at the
// largest N and keep the leading sub-blocks, so the channels are nested.
ChannelRealization<double> trial_channel(const ExperimentPlan& plan, const SystemConfig& config,
                                         int trial);

TrialRecord run_solver(const SolverEntry& solver, const ChannelRealization<double>& ch,
                       const SystemConfig& config, bool record_wall_time);

// Runs every sweep point x trial x solver. Trial t uses seed base_seed + t.
// Per-trial errors are recorded, never thrown. Progress goes to `progress`
// when it is non-null.
ExperimentResult run_experiment(const ExperimentPlan& plan, std::ostream* progress = nullptr);

// Mean and standard error per (sweep value, solver), over error-free trials.
std::vector<AggregateRecord> aggregate(const std::vector<TrialRecord>& trials);

}  // namespace ris
