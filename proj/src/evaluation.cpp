#include "cfmimo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cfmimo/errors.hpp"

namespace cfmimo {

namespace {

// Shortest round-trip formatting so emitted CSVs are byte-stable.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double nearest_rank_percentile(const std::vector<double>& sorted, double pct) {
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
  if (rank == 0) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

}  // namespace

std::vector<SinrCoefficients> regenerate_test_coefficients(const Dataset& ds, Exec exec) {
  const auto& cfg = ds.manifest.config;
  const std::size_t n = ds.test.size();
  std::vector<SinrCoefficients> coeffs(n);
  const bool parallel = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    const auto net = sample_realization(cfg, ds.test.indices[static_cast<std::size_t>(i)]);
    coeffs[static_cast<std::size_t>(i)] = sinr_coefficients(net, cfg.system);
  }
  return coeffs;
}

PolicyEvaluation evaluate_policy(const std::string& method,
                                 const std::vector<std::vector<double>>& powers_mw,
                                 const std::vector<SinrCoefficients>& coeffs,
                                 const SystemConfig& cfg) {
  if (powers_mw.size() != coeffs.size())
    throw ConfigError("evaluate_policy: powers/instances size mismatch");

  PolicyEvaluation ev;
  ev.method = method;
  ev.per_user_rates_bps.reserve(coeffs.size() * static_cast<std::size_t>(cfg.num_users));
  ev.per_instance_sum_bps.reserve(coeffs.size());
  ev.per_instance_min_bps.reserve(coeffs.size());

  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const auto rates = uplink_rates(powers_mw[i], coeffs[i], cfg);
    double total = 0.0;
    double mn = rates.empty() ? 0.0 : rates[0];
    for (double r : rates) {
      ev.per_user_rates_bps.push_back(r);
      total += r;
      mn = std::min(mn, r);
    }
    ev.per_instance_sum_bps.push_back(total);
    ev.per_instance_min_bps.push_back(mn);
  }

  auto sorted = ev.per_user_rates_bps;
  std::sort(sorted.begin(), sorted.end());
  double acc = 0.0;
  for (double r : sorted) acc += r;
  ev.mean_bps = sorted.empty() ? 0.0 : acc / static_cast<double>(sorted.size());
  if (!sorted.empty()) {
    ev.median_bps = nearest_rank_percentile(sorted, 50.0);
    ev.p5_bps = nearest_rank_percentile(sorted, 5.0);
  }
  return ev;
}

std::vector<std::vector<double>> powers_from_targets(const DatasetSplit& split,
                                                     const SystemConfig& cfg) {
  std::vector<std::vector<double>> out(split.size());
  for (std::size_t r = 0; r < split.size(); ++r) {
    out[r].resize(split.targets.cols());
    for (std::size_t k = 0; k < split.targets.cols(); ++k)
      out[r][k] = split.targets(r, k) * cfg.p_max_of(static_cast<int>(k));
  }
  return out;
}

std::vector<std::vector<double>> powers_from_model(const MlpModel& model,
                                                   const DatasetSplit& split,
                                                   const SystemConfig& cfg, Exec exec) {
  const Matrix raw = forward_batch(model, split.inputs, exec);
  std::vector<std::vector<double>> out(split.size());
  for (std::size_t r = 0; r < split.size(); ++r) {
    out[r].resize(raw.cols());
    for (std::size_t k = 0; k < raw.cols(); ++k)
      out[r][k] = std::clamp(raw(r, k), 0.0, 1.0) * cfg.p_max_of(static_cast<int>(k));
  }
  return out;
}

std::vector<std::vector<double>> powers_uniform(std::size_t n, const SystemConfig& cfg) {
  std::vector<double> caps(static_cast<std::size_t>(cfg.num_users));
  for (int k = 0; k < cfg.num_users; ++k) caps[static_cast<std::size_t>(k)] = cfg.p_max_of(k);
  return std::vector<std::vector<double>>(n, caps);
}

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw ConfigError("empirical_cdf: empty input");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  std::vector<std::pair<double, double>> cdf;
  for (std::size_t i = 0; i < values.size(); ++i) {
    // last occurrence of each unique value carries the cumulative count
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    cdf.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

void write_cdf_csv(const std::filesystem::path& path,
                   const std::vector<PolicyEvaluation>& evals) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "method,rate_bps,cdf\n";
  for (const auto& ev : evals)
    for (const auto& [v, p] : empirical_cdf(ev.per_user_rates_bps))
      out << ev.method << ',' << fmt(v) << ',' << fmt(p) << '\n';
}

void write_summary_csv(const std::filesystem::path& path,
                       const std::vector<PolicyEvaluation>& evals) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "method,n_rates,mean_mbps,median_mbps,p5_mbps\n";
  for (const auto& ev : evals)
    out << ev.method << ',' << ev.per_user_rates_bps.size() << ','
        << fmt(ev.mean_bps / 1e6) << ',' << fmt(ev.median_bps / 1e6) << ','
        << fmt(ev.p5_bps / 1e6) << '\n';
}

std::string mse_report_csv(
    const std::vector<std::pair<std::string, std::vector<EpochStats>>>& runs) {
  static constexpr int kEpochs[] = {1, 5, 10, 15, 20, 25, 30, 35, 40};
  std::ostringstream out;
  out << "epoch";
  for (const auto& [label, log] : runs)
    out << ',' << label << "_train," << label << "_val";
  out << '\n';
  for (int e : kEpochs) {
    out << e;
    for (const auto& [label, log] : runs) {
      const auto it = std::find_if(log.begin(), log.end(),
                                   [e](const EpochStats& s) { return s.epoch == e; });
      if (it == log.end())
        throw ConfigError("mse report: run '" + label + "' has no epoch " +
                          std::to_string(e));
      out << ',' << fmt(it->train_mse) << ',' << fmt(it->val_mse);
    }
    out << '\n';
  }
  return out.str();
}

void write_epoch_log_csv(const std::filesystem::path& path,
                         const std::vector<EpochStats>& log) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "epoch,train_mse,val_mse\n";
  for (const auto& s : log)
    out << s.epoch << ',' << fmt(s.train_mse) << ',' << fmt(s.val_mse) << '\n';
}

std::vector<EpochStats> read_epoch_log_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing epoch log: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "epoch,train_mse,val_mse")
    throw DataError("bad epoch log header in " + path.string());
  std::vector<EpochStats> log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    EpochStats s;
    char* end = nullptr;
    s.epoch = static_cast<int>(std::strtol(line.c_str(), &end, 10));
    if (!end || *end != ',') throw DataError("bad epoch log row: " + line);
    s.train_mse = std::strtod(end + 1, &end);
    if (!end || *end != ',') throw DataError("bad epoch log row: " + line);
    s.val_mse = std::strtod(end + 1, nullptr);
    log.push_back(s);
  }
  return log;
}

}  // namespace cfmimo
