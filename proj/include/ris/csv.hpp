#pragma once

#include <string>
#include <vector>

#include "ris/experiment.hpp"

namespace ris {

// Column order of the per-trial file.
inline constexpr const char* kTrialHeader =
    "sweep_value,trial,seed,channel_hash,solver,se,ee,total_power,bs_power,iterations,feasible,"
    "qos_relaxed,converged,wall_time,error";

// Column order of the aggregate file.
inline constexpr const char* kAggregateHeader =
    "sweep_value,solver,trials,errors,se_mean,se_stderr,ee_mean,ee_stderr,total_power_mean,"
    "bs_power_mean,iterations_mean,feasibility_rate,relaxed_rate";

// "out.csv" -> "out_aggregate.csv".
std::string aggregate_path(const std::string& trials_path);

void write_trials_csv(const std::vector<TrialRecord>& rows, const std::string& path);
void write_aggregate_csv(const std::vector<AggregateRecord>& rows, const std::string& path);

// Writes the per-trial file at `path` and the aggregate next to it.
void emit_csv(const ExperimentResult& result, const std::string& path);

std::vector<TrialRecord> read_trials_csv(const std::string& path);
std::vector<AggregateRecord> read_aggregate_csv(const std::string& path);

// One RFC 4180 record split into fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace ris
