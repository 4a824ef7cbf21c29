#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/exec.hpp"
#include "cfmimo/solvers.hpp"

namespace cfmimo {

enum class Objective { SumRate, MaxMin };

Objective objective_from_string(const std::string& s);
std::string to_string(Objective o);

struct ScenarioConfig {
  Scenario scenario = Scenario::S1;
  Objective objective = Objective::SumRate;
  SystemConfig system;
  int n_train = 18000;
  int n_val = 2000;
  int n_test = 1000;
  std::uint64_t master_seed = 1;
  bool resample_aps = false;  // default: one AP layout per dataset
  SolverOptions solver;

  int total_samples() const { return n_train + n_val + n_test; }
  void validate() const;
};

/// Input vector length: 2K normalized positions for S1/S2, K*M beta values
/// for S3.
int input_dim(const ScenarioConfig& cfg);

/// Child-seed streams (documented so samples can be regenerated anywhere).
enum SeedStream : std::uint64_t {
  kSeedStreamAps = 0,
  kSeedStreamUsers = 1,
  kSeedStreamShadow = 2,
  kSeedStreamMonteCarlo = 3,
};

/// AP layout for sample `index` (fixed per dataset unless resample_aps).
Matrix dataset_ap_positions(const ScenarioConfig& cfg, std::uint64_t index);

/// Deterministic realization for a global sample index.
NetworkRealization sample_realization(const ScenarioConfig& cfg, std::uint64_t index);

struct DatasetSplit {
  Matrix inputs;                             // n x L
  Matrix targets;                            // n x K, eta*/P_max in [0,1]
  std::vector<std::uint64_t> indices;        // global sample indices
  std::vector<std::uint64_t> instance_seeds;

  std::size_t size() const { return inputs.rows(); }
};

struct DroppedSample {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
};

struct DatasetManifest {
  ScenarioConfig config;
  int input_dim = 0;
  int target_dim = 0;
  // Per-feature beta-dB standardization, computed from the training split
  // only (empty unless S3).
  std::vector<double> standardize_mean;
  std::vector<double> standardize_std;
  std::vector<DroppedSample> dropped;
  // FNV-1a 64 of each split file, keyed by file name.
  std::uint64_t hash_train = 0;
  std::uint64_t hash_val = 0;
  std::uint64_t hash_test = 0;
};

struct Dataset {
  DatasetManifest manifest;
  DatasetSplit train;
  DatasetSplit val;
  DatasetSplit test;
};

/// Samples realizations, solves the configured objective per sample and
/// assembles the splits. Parallel over sample indices; records are merged
/// in index order so the output is byte-identical to the serial path.
/// Throws if more than 1% of samples fail to converge.
Dataset build_dataset(const ScenarioConfig& cfg, Exec exec = Exec::Parallel);

/// manifest.json + train.bin / val.bin / test.bin (flat little-endian
/// float64 records [input || target]).
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

/// Verifies content hashes and dimensional consistency; throws DataError.
Dataset load_dataset(const std::filesystem::path& dir);

std::uint64_t fnv1a64(const void* data, std::size_t nbytes);

}  // namespace cfmimo
