#include "cfmimo/sinr.hpp"

#include <algorithm>
#include <cmath>

namespace cfmimo {

SinrCoefficients sinr_coefficients(const NetworkRealization& net,
                                   const SystemConfig& cfg) {
  const int k_users = cfg.num_users;
  const double noise = cfg.noise_power_mw();
  const auto serving = cfg.serving_lists();

  SinrCoefficients co;
  co.a.resize(static_cast<std::size_t>(k_users));
  co.c.resize(static_cast<std::size_t>(k_users));
  co.b = Matrix(static_cast<std::size_t>(k_users), static_cast<std::size_t>(k_users));

  for (int k = 0; k < k_users; ++k) {
    const auto& aps = serving[static_cast<std::size_t>(k)];
    double gamma_sum = 0.0;
    for (int m : aps) gamma_sum += net.gamma(k, static_cast<std::size_t>(m));
    co.a[static_cast<std::size_t>(k)] = gamma_sum * gamma_sum;
    co.c[static_cast<std::size_t>(k)] = noise * gamma_sum;

    for (int j = 0; j < k_users; ++j) {
      double beta_gamma = 0.0;
      for (int m : aps)
        beta_gamma += net.beta(static_cast<std::size_t>(j), static_cast<std::size_t>(m)) *
                      net.gamma(static_cast<std::size_t>(k), static_cast<std::size_t>(m));
      double b_kj = beta_gamma;
      if (j != k) {
        const double corr = net.gram(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
        if (corr != 0.0) {
          double ratio_sum = 0.0;
          for (int m : aps)
            ratio_sum += net.gamma(static_cast<std::size_t>(k), static_cast<std::size_t>(m)) *
                         net.beta(static_cast<std::size_t>(j), static_cast<std::size_t>(m)) /
                         net.beta(static_cast<std::size_t>(k), static_cast<std::size_t>(m));
          b_kj += ratio_sum * ratio_sum * corr * corr;
        }
      }
      co.b(static_cast<std::size_t>(k), static_cast<std::size_t>(j)) = b_kj;
    }
  }
  return co;
}

std::vector<double> sinr_values(const std::vector<double>& eta_mw,
                                const SinrCoefficients& co) {
  const int k_users = co.num_users();
  std::vector<double> out(static_cast<std::size_t>(k_users));
  for (int k = 0; k < k_users; ++k) {
    double denom = co.c[static_cast<std::size_t>(k)];
    const double* row = co.b.row(static_cast<std::size_t>(k));
    for (int j = 0; j < k_users; ++j) denom += eta_mw[static_cast<std::size_t>(j)] * row[j];
    out[static_cast<std::size_t>(k)] =
        eta_mw[static_cast<std::size_t>(k)] * co.a[static_cast<std::size_t>(k)] / denom;
  }
  return out;
}

std::vector<double> uplink_rates(const std::vector<double>& eta_mw,
                                 const SinrCoefficients& co, const SystemConfig& cfg) {
  auto rates = sinr_values(eta_mw, co);
  const double pref = cfg.rate_prefactor();
  for (double& r : rates) r = pref * std::log2(1.0 + r);
  return rates;
}

double sum_rate_bps(const std::vector<double>& eta_mw, const SinrCoefficients& co,
                    const SystemConfig& cfg) {
  const auto rates = uplink_rates(eta_mw, co, cfg);
  double total = 0.0;
  for (double r : rates) total += r;
  return total;
}

double min_rate_bps(const std::vector<double>& eta_mw, const SinrCoefficients& co,
                    const SystemConfig& cfg) {
  const auto rates = uplink_rates(eta_mw, co, cfg);
  return *std::min_element(rates.begin(), rates.end());
}

}  // namespace cfmimo
