#include "cfmimo/system_config.hpp"

#include <cmath>
#include <string>

namespace cfmimo {

double SystemConfig::noise_power_mw() const {
  const double dbm =
      noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
  return std::pow(10.0, dbm / 10.0);
}

std::vector<std::vector<int>> SystemConfig::serving_lists() const {
  if (!serving_aps_per_user.empty()) return serving_aps_per_user;
  std::vector<std::vector<int>> lists(static_cast<std::size_t>(num_users));
  for (auto& l : lists) {
    l.resize(static_cast<std::size_t>(num_aps));
    for (int m = 0; m < num_aps; ++m) l[static_cast<std::size_t>(m)] = m;
  }
  return lists;
}

void SystemConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("system config: " + msg); };
  if (area_side_m <= 0) fail("area_side_m must be positive");
  if (num_aps < 1) fail("num_aps must be >= 1");
  if (num_users < 1) fail("num_users must be >= 1");
  if (antennas_per_ap < 1) fail("antennas_per_ap must be >= 1");
  if (bandwidth_hz <= 0) fail("bandwidth_hz must be positive");
  if (carrier_hz <= 0) fail("carrier_hz must be positive");
  if (tau_p < 1) fail("tau_p must be >= 1");
  if (tau_c <= tau_p) fail("tau_c must exceed tau_p");
  if ((tau_c - tau_p) % 2 != 0) fail("tau_c - tau_p must be even so tau_u is exact");
  if (pilot_power_mw <= 0) fail("pilot_power_mw must be positive");
  if (p_max_ul_mw <= 0) fail("p_max_ul_mw must be positive");
  if (!p_max_per_user_mw.empty()) {
    if (static_cast<int>(p_max_per_user_mw.size()) != num_users)
      fail("p_max_per_user_mw must have one entry per user");
    for (double p : p_max_per_user_mw)
      if (p <= 0) fail("per-user power caps must be positive");
  }
  if (shadow_std_db < 0) fail("shadow_std_db must be non-negative");
  if (!serving_aps_per_user.empty()) {
    if (static_cast<int>(serving_aps_per_user.size()) != num_users)
      fail("serving_aps_per_user must have one list per user");
    for (const auto& l : serving_aps_per_user) {
      if (l.empty()) fail("every user needs at least one serving AP");
      for (int m : l)
        if (m < 0 || m >= num_aps) fail("serving AP index out of range");
    }
  }
}

}  // namespace cfmimo
