#include "cfmimo/channel.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace cfmimo {

namespace {

// Three-slope breakpoints, km.
constexpr double kBreakNearKm = 0.01;
constexpr double kBreakFarKm = 0.05;

}  // namespace

Scenario scenario_from_string(const std::string& s) {
  if (s == "S1" || s == "s1") return Scenario::S1;
  if (s == "S2" || s == "s2") return Scenario::S2;
  if (s == "S3" || s == "s3") return Scenario::S3;
  throw ConfigError("unknown scenario '" + s + "' (expected S1, S2 or S3)");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::S1: return "S1";
    case Scenario::S2: return "S2";
    case Scenario::S3: return "S3";
  }
  return "S?";
}

bool scenario_has_shadowing(Scenario s) { return s == Scenario::S3; }

bool scenario_has_orthogonal_pilots(Scenario s) { return s != Scenario::S2; }

double wrap_distance(double x1, double y1, double x2, double y2,
                     const SystemConfig& cfg) {
  const double d = cfg.area_side_m;
  double dx = std::fabs(x1 - x2);
  double dy = std::fabs(y1 - y2);
  dx = std::min(dx, d - dx);
  dy = std::min(dy, d - dy);
  const double dh = cfg.ap_height_m - cfg.user_height_m;
  return std::sqrt(dx * dx + dy * dy + dh * dh);
}

double hata_cost231_offset_db(const SystemConfig& cfg) {
  const double f_mhz = cfg.carrier_hz / 1.0e6;
  const double lf = std::log10(f_mhz);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(cfg.ap_height_m) -
         (1.1 * lf - 0.7) * cfg.user_height_m + (1.56 * lf - 0.8);
}

double path_loss_db(double distance_m, const SystemConfig& cfg) {
  if (!(distance_m > 0.0))
    throw std::invalid_argument("path_loss_db: distance must be positive");
  const double big_l = hata_cost231_offset_db(cfg);
  const double d_km = distance_m / 1000.0;
  if (d_km > kBreakFarKm) return -big_l - 35.0 * std::log10(d_km);
  if (d_km > kBreakNearKm)
    return -big_l - 15.0 * std::log10(kBreakFarKm) - 20.0 * std::log10(d_km);
  return -big_l - 15.0 * std::log10(kBreakFarKm) - 20.0 * std::log10(kBreakNearKm);
}

Matrix large_scale_coefficients(const Matrix& user_pos, const Matrix& ap_pos,
                                const Matrix& shadow_z, const SystemConfig& cfg) {
  const std::size_t k_users = user_pos.rows();
  const std::size_t m_aps = ap_pos.rows();
  Matrix beta(k_users, m_aps);
  for (std::size_t k = 0; k < k_users; ++k) {
    for (std::size_t m = 0; m < m_aps; ++m) {
      const double dist = wrap_distance(user_pos(k, 0), user_pos(k, 1), ap_pos(m, 0),
                                        ap_pos(m, 1), cfg);
      const double pl_db = path_loss_db(dist, cfg);
      const double sh_db = cfg.shadow_std_db * shadow_z(k, m);
      beta(k, m) = std::pow(10.0, pl_db / 10.0) * std::pow(10.0, sh_db / 10.0);
    }
  }
  return beta;
}

namespace {

// Slot-multiplexed pilots: user k trains in sample slot k. Exactly
// orthonormal in floating point, which keeps the contamination term of the
// rate bound identically zero under S1/S3.
Matrix canonical_pilots(int tau_p, int num_users) {
  Matrix phi(static_cast<std::size_t>(tau_p), static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k)
    phi(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) = 1.0;
  return phi;
}

// Length-7 m-sequence from x^3 + x + 1, state (1,0,0).
std::array<int, 7> msequence7() {
  std::array<int, 7> seq{};
  int s0 = 1, s1 = 0, s2 = 0;
  for (int i = 0; i < 7; ++i) {
    seq[static_cast<std::size_t>(i)] = s0;
    const int next = s0 ^ s1;  // taps of x^3 + x + 1
    s0 = s1;
    s1 = s2;
    s2 = next;
  }
  return seq;
}

// User k gets the k-th cyclic shift of the m-sequence; for tau_p = 8 the
// shifted sequence's first chip is repeated at the end. Chips map
// 0 -> +1, 1 -> -1, columns normalized to unit norm.
Matrix pn_pilots(int tau_p, int num_users) {
  if (tau_p != 7 && tau_p != 8)
    throw ConfigError("S2 pseudo-noise pilots are defined for tau_p of 7 or 8");
  if (num_users > 8)
    throw ConfigError("S2 pseudo-noise pilots support at most 8 users");
  const auto base = msequence7();
  Matrix phi(static_cast<std::size_t>(tau_p), static_cast<std::size_t>(num_users));
  const double scale = 1.0 / std::sqrt(static_cast<double>(tau_p));
  for (int k = 0; k < num_users; ++k) {
    std::array<int, 8> chips{};
    for (int s = 0; s < 7; ++s) chips[static_cast<std::size_t>(s)] = base[static_cast<std::size_t>((s + k) % 7)];
    chips[7] = chips[0];
    for (int s = 0; s < tau_p; ++s)
      phi(static_cast<std::size_t>(s), static_cast<std::size_t>(k)) =
          chips[static_cast<std::size_t>(s)] == 0 ? scale : -scale;
  }
  return phi;
}

}  // namespace

Matrix generate_pilots(Scenario scenario, int tau_p, int num_users) {
  if (scenario_has_orthogonal_pilots(scenario)) {
    if (num_users > tau_p)
      throw ConfigError("orthogonal pilots need num_users <= tau_p (got " +
                        std::to_string(num_users) + " > " + std::to_string(tau_p) + ")");
    return canonical_pilots(tau_p, num_users);
  }
  return pn_pilots(tau_p, num_users);
}

Matrix pilot_gram(const Matrix& pilots) {
  const std::size_t k_users = pilots.cols();
  const std::size_t tau_p = pilots.rows();
  Matrix g(k_users, k_users);
  for (std::size_t i = 0; i < k_users; ++i)
    for (std::size_t k = 0; k < k_users; ++k) {
      double acc = 0.0;
      for (std::size_t s = 0; s < tau_p; ++s) acc += pilots(s, i) * pilots(s, k);
      g(i, k) = acc;
    }
  return g;
}

Matrix lmmse_alpha(const Matrix& beta, const Matrix& gram, const SystemConfig& cfg) {
  const std::size_t k_users = beta.rows();
  const std::size_t m_aps = beta.cols();
  const double energy = cfg.train_energy_mw();
  const double noise = cfg.noise_power_mw();
  const double sqrt_energy = std::sqrt(energy);
  Matrix alpha(k_users, m_aps);
  for (std::size_t k = 0; k < k_users; ++k) {
    for (std::size_t m = 0; m < m_aps; ++m) {
      double denom = noise;
      for (std::size_t i = 0; i < k_users; ++i) {
        const double corr = gram(i, k);
        denom += energy * beta(i, m) * corr * corr;
      }
      alpha(k, m) = sqrt_energy * beta(k, m) / denom;
    }
  }
  return alpha;
}

Matrix gamma_matrix(const Matrix& alpha, const Matrix& beta, const SystemConfig& cfg) {
  const double scale = std::sqrt(cfg.train_energy_mw()) * cfg.antennas_per_ap;
  Matrix gamma(alpha.rows(), alpha.cols());
  for (std::size_t i = 0; i < gamma.size(); ++i)
    gamma.data()[i] = scale * alpha.data()[i] * beta.data()[i];
  return gamma;
}

NetworkRealization make_realization(Matrix ap_pos, Matrix user_pos, Matrix shadow_z,
                                    Scenario scenario, const SystemConfig& cfg) {
  NetworkRealization net;
  net.ap_positions = std::move(ap_pos);
  net.user_positions = std::move(user_pos);
  net.shadow_z = std::move(shadow_z);
  net.beta = large_scale_coefficients(net.user_positions, net.ap_positions,
                                      net.shadow_z, cfg);
  net.pilots = generate_pilots(scenario, cfg.tau_p, cfg.num_users);
  net.gram = pilot_gram(net.pilots);
  net.alpha = lmmse_alpha(net.beta, net.gram, cfg);
  net.gamma = gamma_matrix(net.alpha, net.beta, cfg);
  return net;
}

Matrix draw_positions(int n, double area_side, Rng& rng) {
  Matrix pos(static_cast<std::size_t>(n), 2);
  for (int i = 0; i < n; ++i) {
    pos(static_cast<std::size_t>(i), 0) = rng.uniform() * area_side;
    pos(static_cast<std::size_t>(i), 1) = rng.uniform() * area_side;
  }
  return pos;
}

}  // namespace cfmimo
