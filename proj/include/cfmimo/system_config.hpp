#pragma once

#include <vector>

#include "cfmimo/errors.hpp"

namespace cfmimo {

// Physical and protocol constants of the simulated network. Powers are in
// milliwatt throughout; large-scale coefficients are linear scale.
struct SystemConfig {
  double area_side_m = 500.0;       // D, wrap-around square side
  int num_aps = 30;                 // M
  int num_users = 5;                // K
  int antennas_per_ap = 4;          // N_AP
  double bandwidth_hz = 2.0e7;      // W
  double carrier_hz = 1.9e9;        // f0
  double ap_height_m = 15.0;
  double user_height_m = 1.65;
  double noise_psd_dbm_hz = -174.0;
  double noise_figure_db = 9.0;
  int tau_c = 200;                  // coherence interval, samples
  int tau_p = 8;                    // training phase, samples
  double pilot_power_mw = 100.0;    // p_k, per pilot symbol
  double shadow_std_db = 8.0;       // sigma_sh

  // Per-user uplink cap. Scalar default applies to every user; a non-empty
  // vector overrides per user.
  double p_max_ul_mw = 100.0;
  std::vector<double> p_max_per_user_mw;

  // Serving APs per user (M_k). Empty means pure cell-free: every AP serves
  // every user.
  std::vector<std::vector<int>> serving_aps_per_user;

  int tau_u() const { return (tau_c - tau_p) / 2; }

  /// Training energy eta_k = tau_p * p_k, mW (same for every user).
  double train_energy_mw() const { return static_cast<double>(tau_p) * pilot_power_mw; }

  /// Thermal noise power over the full bandwidth, mW.
  double noise_power_mw() const;

  /// (tau_u / tau_c) * W, the bit/s factor in front of log2(1 + SINR).
  double rate_prefactor() const {
    return (static_cast<double>(tau_u()) / tau_c) * bandwidth_hz;
  }

  double p_max_of(int user) const {
    return p_max_per_user_mw.empty() ? p_max_ul_mw
                                     : p_max_per_user_mw[static_cast<std::size_t>(user)];
  }

  /// Serving AP index list for each user; expands the pure cell-free default.
  std::vector<std::vector<int>> serving_lists() const;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

}  // namespace cfmimo
