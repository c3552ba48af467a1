#pragma once

#include <string>

#include <json.hpp>

#include "ris/experiment.hpp"
#include "ris/system_config.hpp"

namespace ris {

// "20dBW", "30 dBm", "500mW", "2W" or a bare number of watts.
double parse_power(const std::string& text);
double parse_power(const nlohmann::json& value);

// Scenario fields use the short names M, K, N, P_max, sigma2, xi, P_BS, P_UE,
// P_n, b, BW, R_min, bs_pos, ris_pos, user_region, pathloss_ref, pathloss_exp,
// min_distance, epsilon, xi_AF, P_R, P_R_max, sigma2_R, general_regime.
// Missing fields keep their defaults; unknown fields are rejected.
SystemConfig parse_scenario(const nlohmann::json& j, SystemConfig base = {});

SolverEntry parse_solver(const nlohmann::json& j);

ExperimentPlan parse_plan(const nlohmann::json& j);
ExperimentPlan load_plan(const std::string& path);  // IoFailure, InvalidArgument

}  // namespace ris
