#pragma once

#include <vector>

#include "cfmimo/channel.hpp"

namespace cfmimo {

// Affine-fractional reduction of the per-user uplink SINR:
//
//   SINR_k(eta) = eta_k * a_k / (sum_j eta_j * b_kj + c_k)
//
// a_k = (sum_m gamma_km)^2, c_k = sigma_w^2 * sum_m gamma_km, and b_kj the
// interference couplings including the pilot-contamination square term for
// j != k. All sums run over the serving set M_k.
struct SinrCoefficients {
  std::vector<double> a;  // K
  Matrix b;               // K x K
  std::vector<double> c;  // K

  int num_users() const { return static_cast<int>(a.size()); }
};

SinrCoefficients sinr_coefficients(const NetworkRealization& net,
                                   const SystemConfig& cfg);

std::vector<double> sinr_values(const std::vector<double>& eta_mw,
                                const SinrCoefficients& co);

/// Per-user achievable rates (tau_u/tau_c) * W * log2(1 + SINR_k), bit/s.
std::vector<double> uplink_rates(const std::vector<double>& eta_mw,
                                 const SinrCoefficients& co,
                                 const SystemConfig& cfg);

double sum_rate_bps(const std::vector<double>& eta_mw, const SinrCoefficients& co,
                    const SystemConfig& cfg);
double min_rate_bps(const std::vector<double>& eta_mw, const SinrCoefficients& co,
                    const SystemConfig& cfg);

}  // namespace cfmimo
