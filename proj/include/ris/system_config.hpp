#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace ris {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }
inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Thermal noise floor (-174 dBm/Hz) integrated over the bandwidth, in watts.
inline double thermal_noise_watts(double bandwidth_hz) {
  return dbm_to_watts(-174.0 + 10.0 * std::log10(bandwidth_hz));
}

// Scenario scalars shared by every solver. All powers in watts.
//
// The default-constructed value is the desk-scale scenario (M = 8, K = N = 4)
// with the default outdoor hardware dissipation figures.
struct SystemConfig {
  int bs_antennas = 8;   // M
  int users = 4;         // K
  int ris_elements = 4;  // N

  double max_tx_power = dbw_to_watts(20.0);  // P_max
  double noise_power = thermal_noise_watts(180e3);
  double amplifier_inefficiency = 1.2;  // xi = 1/nu
  double bs_static_power = dbw_to_watts(9.0);
  double ue_static_power = dbm_to_watts(10.0);  // per user
  double element_power = dbm_to_watts(10.0);    // per RIS phase shifter
  int phase_bits = 4;                           // metadata only
  double bandwidth = 180e3;
  std::vector<double> min_rates;  // per user, bits/s/Hz; empty means all zero

  Point2 bs_pos{0.0, 0.0};
  Point2 ris_pos{100.0, 100.0};
  Rect user_region{100.0, 200.0, 0.0, 100.0};
  double pathloss_ref = std::pow(10.0, -3.53);
  double pathloss_exp = 3.76;
  double min_distance = 1.0;  // distances are clamped below at this value, meters

  double epsilon = 1e-3;

  // AF relay benchmark parameters.
  double relay_amplifier_inefficiency = 1.2;        // xi_AF
  double relay_antenna_power = dbm_to_watts(10.0);  // P_R per relay antenna
  std::optional<double> relay_max_power;            // defaults to max_tx_power
  std::optional<double> relay_noise_power;          // defaults to noise_power

  // Opt into the general M >= K, K <= N regime (runtime rank checks only).
  bool general_regime = false;

  double relay_max() const { return relay_max_power.value_or(max_tx_power); }
  double relay_noise() const { return relay_noise_power.value_or(noise_power); }

  // Per-user minimum rates, expanded to length K.
  std::vector<double> rate_targets() const;

  // Throws InvalidArgument describing the first violated invariant.
  void validate() const;
};

// Reference-distance path-loss law: gain = pathloss_ref / d^pathloss_exp,
// with d clamped to config.min_distance.
double pathloss(const SystemConfig& config, double distance);

}  // namespace ris
