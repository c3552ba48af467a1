#include "ris/system_config.hpp"

#include <algorithm>
#include <string>

#include "ris/types.hpp"

namespace ris {

std::vector<double> SystemConfig::rate_targets() const {
  if (min_rates.empty()) return std::vector<double>(static_cast<size_t>(users), 0.0);
  if (min_rates.size() == 1) return std::vector<double>(static_cast<size_t>(users), min_rates[0]);
  return min_rates;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("SystemConfig: " + what); };

  if (bs_antennas < 1 || users < 1 || ris_elements < 1) fail("M, K, N must be positive");
  if (general_regime) {
    if (bs_antennas < users) fail("general regime requires M >= K");
    if (users > ris_elements) fail("general regime requires K <= N");
  } else {
    if (users != ris_elements) fail("K must equal N (set general_regime to relax)");
    if (bs_antennas < ris_elements) fail("M must be at least N");
  }

  const double powers[] = {max_tx_power, noise_power, bs_static_power, ue_static_power,
                           element_power, bandwidth};
  for (double p : powers) {
    if (!(p > 0.0) || !std::isfinite(p)) fail("power, noise and bandwidth fields must be > 0");
  }
  if (!(amplifier_inefficiency >= 0.0)) fail("xi must be >= 0");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(pathloss_ref > 0.0)) fail("pathloss_ref must be > 0");
  if (!(min_distance > 0.0)) fail("min_distance must be > 0");
  if (!min_rates.empty() && min_rates.size() != 1 &&
      min_rates.size() != static_cast<size_t>(users)) {
    fail("R_min must be a scalar or have K entries");
  }
  if (std::any_of(min_rates.begin(), min_rates.end(), [](double r) { return !(r >= 0.0); })) {
    fail("R_min entries must be >= 0");
  }
  if (user_region.x_max < user_region.x_min || user_region.y_max < user_region.y_min) {
    fail("user_region is empty");
  }
  if (relay_max_power && !(*relay_max_power > 0.0)) fail("P_R_max must be > 0");
  if (relay_noise_power && !(*relay_noise_power > 0.0)) fail("relay noise power must be > 0");
}

double pathloss(const SystemConfig& config, double distance) {
  const double d = std::max(distance, config.min_distance);
  return config.pathloss_ref / std::pow(d, config.pathloss_exp);
}

}  // namespace ris
