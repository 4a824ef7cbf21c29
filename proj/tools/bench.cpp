// Benchmarks the OpenMP kernels against their serial reference paths and
// compares one SCA solve against amortized batched inference.

#include <chrono>
#include <cstdio>
#include <vector>

#include "cfmimo/dataset.hpp"
#include "cfmimo/evaluation.hpp"
#include "cfmimo/mlp.hpp"
#include "cfmimo/monte_carlo.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

using namespace cfmimo;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <typename F>
double time_once(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return seconds_since(t0);
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
  std::printf("%-28s serial %8.3f s   openmp %8.3f s   speedup %5.2fx   %s\n", name,
              serial_s, parallel_s, serial_s / parallel_s,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#if defined(_OPENMP)
  std::printf("openmp enabled, max threads %d\n\n", omp_get_max_threads());
#else
  std::printf("openmp disabled; both columns run serial code\n\n");
#endif

  ScenarioConfig cfg;
  cfg.scenario = Scenario::S3;
  cfg.objective = Objective::SumRate;
  cfg.n_train = 256;
  cfg.n_val = 32;
  cfg.n_test = 32;
  cfg.master_seed = 99;

  // Dataset generation: one solver run per sample index.
  Dataset ds_serial, ds_parallel;
  const double gen_serial = time_once([&] { ds_serial = build_dataset(cfg, Exec::Serial); });
  const double gen_parallel =
      time_once([&] { ds_parallel = build_dataset(cfg, Exec::Parallel); });
  const bool gen_same = ds_serial.train.inputs == ds_parallel.train.inputs &&
                        ds_serial.train.targets == ds_parallel.train.targets &&
                        ds_serial.test.targets == ds_parallel.test.targets;
  report("dataset generation (320)", gen_serial, gen_parallel, gen_same);

  // Monte-Carlo channel statistics.
  const auto net = sample_realization(cfg, 0);
  const auto eta = uniform_allocation(cfg.system);
  MonteCarloReport mc_serial, mc_parallel;
  const double mc_s = time_once(
      [&] { mc_serial = monte_carlo_validate(net, cfg.system, eta, 20000, 7, Exec::Serial); });
  const double mc_p = time_once([&] {
    mc_parallel = monte_carlo_validate(net, cfg.system, eta, 20000, 7, Exec::Parallel);
  });
  report("monte-carlo (2e4 trials)", mc_s, mc_p,
         mc_serial.gamma_inner == mc_parallel.gamma_inner &&
             mc_serial.gamma_norm == mc_parallel.gamma_norm &&
             mc_serial.b == mc_parallel.b);

  // Batched inference.
  const auto layout = MlpLayout::ann3(ds_serial.manifest.input_dim,
                                      ds_serial.manifest.target_dim);
  const auto model = init_mlp(layout, 11);
  Matrix inputs(1000, ds_serial.manifest.input_dim);
  {
    Rng rng(5);
    for (auto& v : inputs.data()) v = rng.normal();
  }
  Matrix out_serial, out_parallel;
  const double fw_s =
      time_once([&] { out_serial = forward_batch(model, inputs, Exec::Serial); });
  const double fw_p =
      time_once([&] { out_parallel = forward_batch(model, inputs, Exec::Parallel); });
  report("ann3 forward (1000 inputs)", fw_s, fw_p, out_serial == out_parallel);

  // Online cost: amortized forward pass vs one solver run.
  std::vector<SinrCoefficients> coeffs;
  for (int i = 0; i < 32; ++i)
    coeffs.push_back(sinr_coefficients(sample_realization(cfg, static_cast<std::uint64_t>(i)),
                                       cfg.system));
  const double sca_total = time_once([&] {
    for (const auto& co : coeffs) solve_sumrate_sca(co, cfg.system, cfg.solver);
  });
  const double sca_mean = sca_total / static_cast<double>(coeffs.size());
  const double fw_amortized = fw_p / static_cast<double>(inputs.rows());
  std::printf("\none SCA solve          %10.3f ms\n", sca_mean * 1e3);
  std::printf("amortized ann3 forward %10.6f ms\n", fw_amortized * 1e3);
  std::printf("forward is %.0fx faster\n", sca_mean / fw_amortized);
  return 0;
}
