#include "cfmimo/monte_carlo.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "cfmimo/rng.hpp"

namespace cfmimo {

namespace {

using cplx = std::complex<double>;

constexpr std::uint64_t kTrialsPerBlock = 1024;
constexpr std::uint64_t kMonteCarloStream = 3;  // matches SeedStream::kSeedStreamMonteCarlo

struct BlockAccum {
  std::vector<cplx> sum_inner;      // K*M
  std::vector<double> sum_norm;     // K*M
  std::vector<cplx> sum_desired;    // K
  std::vector<double> sum_desired_sq;  // K
  std::vector<double> sum_cross_sq;    // K*K (j != k)
  std::vector<double> sum_noise_sq;    // K

  explicit BlockAccum(std::size_t k_users, std::size_t m_aps)
      : sum_inner(k_users * m_aps),
        sum_norm(k_users * m_aps, 0.0),
        sum_desired(k_users),
        sum_desired_sq(k_users, 0.0),
        sum_cross_sq(k_users * k_users, 0.0),
        sum_noise_sq(k_users, 0.0) {}
};

}  // namespace

MonteCarloReport monte_carlo_validate(const NetworkRealization& net,
                                      const SystemConfig& cfg,
                                      const std::vector<double>& eta_ul_mw,
                                      std::uint64_t n_trials, std::uint64_t seed,
                                      Exec exec) {
  const std::size_t k_users = static_cast<std::size_t>(cfg.num_users);
  const std::size_t m_aps = static_cast<std::size_t>(cfg.num_aps);
  const std::size_t n_ant = static_cast<std::size_t>(cfg.antennas_per_ap);
  const std::size_t tau_p = static_cast<std::size_t>(cfg.tau_p);
  const double noise = cfg.noise_power_mw();
  const double sqrt_energy = std::sqrt(cfg.train_energy_mw());
  const auto serving = cfg.serving_lists();

  // Membership mask so serving-set sums cost one lookup.
  std::vector<char> serves(k_users * m_aps, 0);
  for (std::size_t k = 0; k < k_users; ++k)
    for (int m : serving[k]) serves[k * m_aps + static_cast<std::size_t>(m)] = 1;

  // sqrt(eta) * (phi_i . phi_k), the training-phase mixing weights.
  Matrix coef(k_users, k_users);
  for (std::size_t i = 0; i < k_users; ++i)
    for (std::size_t k = 0; k < k_users; ++k) coef(i, k) = sqrt_energy * net.gram(i, k);

  const std::uint64_t n_blocks = (n_trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  std::vector<BlockAccum> blocks(n_blocks, BlockAccum(k_users, m_aps));

  const bool parallel = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long long bi = 0; bi < static_cast<long long>(n_blocks); ++bi) {
    const std::uint64_t b = static_cast<std::uint64_t>(bi);
    Rng rng(child_seed(seed, kMonteCarloStream, b));
    BlockAccum& acc = blocks[b];

    const std::uint64_t lo = b * kTrialsPerBlock;
    const std::uint64_t hi = std::min(n_trials, lo + kTrialsPerBlock);

    std::vector<cplx> g(k_users * n_ant);           // channels at one AP
    std::vector<cplx> pilot_noise(n_ant * tau_p);
    std::vector<cplx> data_noise(n_ant);
    std::vector<cplx> ghat(n_ant);
    std::vector<cplx> desired(k_users);
    std::vector<cplx> cross(k_users * k_users);
    std::vector<cplx> noise_term(k_users);

    for (std::uint64_t trial = lo; trial < hi; ++trial) {
      std::fill(desired.begin(), desired.end(), cplx{});
      std::fill(cross.begin(), cross.end(), cplx{});
      std::fill(noise_term.begin(), noise_term.end(), cplx{});

      for (std::size_t m = 0; m < m_aps; ++m) {
        for (std::size_t i = 0; i < k_users; ++i) {
          const double amp = std::sqrt(net.beta(i, m));
          for (std::size_t n = 0; n < n_ant; ++n)
            g[i * n_ant + n] = amp * rng.complex_normal(1.0);
        }
        for (auto& w : pilot_noise) w = rng.complex_normal(noise);
        for (auto& w : data_noise) w = rng.complex_normal(noise);

        for (std::size_t k = 0; k < k_users; ++k) {
          if (!serves[k * m_aps + m]) continue;
          const double alpha = net.alpha(k, m);
          for (std::size_t n = 0; n < n_ant; ++n) {
            cplx y{};
            for (std::size_t i = 0; i < k_users; ++i)
              y += coef(i, k) * g[i * n_ant + n];
            for (std::size_t s = 0; s < tau_p; ++s)
              y += pilot_noise[n * tau_p + s] * net.pilots(s, k);
            ghat[n] = alpha * y;
          }

          double norm_sq = 0.0;
          for (std::size_t n = 0; n < n_ant; ++n) norm_sq += std::norm(ghat[n]);
          acc.sum_norm[k * m_aps + m] += norm_sq;

          for (std::size_t j = 0; j < k_users; ++j) {
            cplx inner{};
            for (std::size_t n = 0; n < n_ant; ++n)
              inner += std::conj(ghat[n]) * g[j * n_ant + n];
            if (j == k) {
              acc.sum_inner[k * m_aps + m] += inner;
              desired[k] += inner;
            } else {
              cross[k * k_users + j] += inner;
            }
          }
          cplx noise_inner{};
          for (std::size_t n = 0; n < n_ant; ++n)
            noise_inner += std::conj(ghat[n]) * data_noise[n];
          noise_term[k] += noise_inner;
        }
      }

      for (std::size_t k = 0; k < k_users; ++k) {
        acc.sum_desired[k] += desired[k];
        acc.sum_desired_sq[k] += std::norm(desired[k]);
        for (std::size_t j = 0; j < k_users; ++j)
          if (j != k) acc.sum_cross_sq[k * k_users + j] += std::norm(cross[k * k_users + j]);
        acc.sum_noise_sq[k] += std::norm(noise_term[k]);
      }
    }
  }

  // Ordered merge keeps the result independent of scheduling.
  BlockAccum total(k_users, m_aps);
  for (const auto& acc : blocks) {
    for (std::size_t i = 0; i < total.sum_inner.size(); ++i) {
      total.sum_inner[i] += acc.sum_inner[i];
      total.sum_norm[i] += acc.sum_norm[i];
    }
    for (std::size_t k = 0; k < k_users; ++k) {
      total.sum_desired[k] += acc.sum_desired[k];
      total.sum_desired_sq[k] += acc.sum_desired_sq[k];
      total.sum_noise_sq[k] += acc.sum_noise_sq[k];
    }
    for (std::size_t i = 0; i < total.sum_cross_sq.size(); ++i)
      total.sum_cross_sq[i] += acc.sum_cross_sq[i];
  }

  const double inv_n = 1.0 / static_cast<double>(n_trials);
  MonteCarloReport rep;
  rep.trials = n_trials;
  rep.gamma_inner = Matrix(k_users, m_aps);
  rep.gamma_inner_imag = Matrix(k_users, m_aps);
  rep.gamma_norm = Matrix(k_users, m_aps);
  for (std::size_t k = 0; k < k_users; ++k)
    for (std::size_t m = 0; m < m_aps; ++m) {
      rep.gamma_inner(k, m) = total.sum_inner[k * m_aps + m].real() * inv_n;
      rep.gamma_inner_imag(k, m) = total.sum_inner[k * m_aps + m].imag() * inv_n;
      rep.gamma_norm(k, m) = total.sum_norm[k * m_aps + m] * inv_n;
    }

  rep.a.resize(k_users);
  rep.c.resize(k_users);
  rep.b = Matrix(k_users, k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    const cplx mean_desired = total.sum_desired[k] * inv_n;
    rep.a[k] = std::norm(mean_desired);
    rep.b(k, k) = total.sum_desired_sq[k] * inv_n - std::norm(mean_desired);
    for (std::size_t j = 0; j < k_users; ++j)
      if (j != k) rep.b(k, j) = total.sum_cross_sq[k * k_users + j] * inv_n;
    rep.c[k] = total.sum_noise_sq[k] * inv_n;
  }

  rep.numerator.resize(k_users);
  rep.denominator.resize(k_users);
  for (std::size_t k = 0; k < k_users; ++k) {
    rep.numerator[k] = eta_ul_mw[k] * rep.a[k];
    double denom = rep.c[k];
    for (std::size_t j = 0; j < k_users; ++j) denom += eta_ul_mw[j] * rep.b(k, j);
    rep.denominator[k] = denom;
  }
  return rep;
}

}  // namespace cfmimo
