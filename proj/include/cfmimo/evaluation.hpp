#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cfmimo/dataset.hpp"
#include "cfmimo/mlp.hpp"

namespace cfmimo {

struct PolicyEvaluation {
  std::string method;
  std::vector<double> per_user_rates_bps;      // pooled, K * n_test values
  std::vector<double> per_instance_sum_bps;    // n_test
  std::vector<double> per_instance_min_bps;    // n_test
  double mean_bps = 0.0;
  double median_bps = 0.0;
  double p5_bps = 0.0;
};

/// SINR coefficients of the regenerated test instances, aligned with the
/// test split rows.
std::vector<SinrCoefficients> regenerate_test_coefficients(const Dataset& ds,
                                                           Exec exec = Exec::Parallel);

/// Rates under the true coefficients of each instance for the given powers.
PolicyEvaluation evaluate_policy(const std::string& method,
                                 const std::vector<std::vector<double>>& powers_mw,
                                 const std::vector<SinrCoefficients>& coeffs,
                                 const SystemConfig& cfg);

// Power providers for the three method families.
std::vector<std::vector<double>> powers_from_targets(const DatasetSplit& split,
                                                     const SystemConfig& cfg);
std::vector<std::vector<double>> powers_from_model(const MlpModel& model,
                                                   const DatasetSplit& split,
                                                   const SystemConfig& cfg,
                                                   Exec exec = Exec::Parallel);
std::vector<std::vector<double>> powers_uniform(std::size_t n, const SystemConfig& cfg);

/// Right-continuous empirical CDF on the sorted unique values. Throws on
/// empty input.
std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);

/// CSV: method, rate_bps, cdf.
void write_cdf_csv(const std::filesystem::path& path,
                   const std::vector<PolicyEvaluation>& evals);

/// CSV: method, n, mean/median/p5 in Mbit/s.
void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<PolicyEvaluation>& evals);

/// Table-style MSE report at epochs {1,5,10,...,40}: one train/val column
/// pair per labeled run. Throws if a requested epoch is missing.
std::string mse_report_csv(
    const std::vector<std::pair<std::string, std::vector<EpochStats>>>& runs);

void write_epoch_log_csv(const std::filesystem::path& path,
                         const std::vector<EpochStats>& log);
std::vector<EpochStats> read_epoch_log_csv(const std::filesystem::path& path);

}  // namespace cfmimo
