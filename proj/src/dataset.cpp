#include "cfmimo/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "cfmimo/errors.hpp"
#include "cfmimo/json_io.hpp"

namespace cfmimo {

Objective objective_from_string(const std::string& s) {
  if (s == "sum-rate" || s == "sumrate" || s == "sr") return Objective::SumRate;
  if (s == "max-min" || s == "maxmin" || s == "mr") return Objective::MaxMin;
  throw ConfigError("unknown objective '" + s + "' (expected sum-rate or max-min)");
}

std::string to_string(Objective o) {
  return o == Objective::SumRate ? "sum-rate" : "max-min";
}

void ScenarioConfig::validate() const {
  system.validate();
  if (n_train < 0 || n_val < 0 || n_test < 0)
    throw ConfigError("scenario: split sizes must be non-negative");
  if (total_samples() < 1) throw ConfigError("scenario: dataset would be empty");
  // Surface the pilot precondition early rather than at the first sample.
  generate_pilots(scenario, system.tau_p, system.num_users);
}

int input_dim(const ScenarioConfig& cfg) {
  return cfg.scenario == Scenario::S3 ? cfg.system.num_users * cfg.system.num_aps
                                      : 2 * cfg.system.num_users;
}

Matrix dataset_ap_positions(const ScenarioConfig& cfg, std::uint64_t index) {
  const std::uint64_t ap_index = cfg.resample_aps ? index : 0;
  Rng rng(child_seed(cfg.master_seed, kSeedStreamAps, ap_index));
  return draw_positions(cfg.system.num_aps, cfg.system.area_side_m, rng);
}

NetworkRealization sample_realization(const ScenarioConfig& cfg, std::uint64_t index) {
  const auto& sys = cfg.system;
  Matrix ap_pos = dataset_ap_positions(cfg, index);

  const std::uint64_t user_seed = child_seed(cfg.master_seed, kSeedStreamUsers, index);
  Rng user_rng(user_seed);
  Matrix user_pos = draw_positions(sys.num_users, sys.area_side_m, user_rng);

  Matrix shadow(static_cast<std::size_t>(sys.num_users),
                static_cast<std::size_t>(sys.num_aps), 0.0);
  if (scenario_has_shadowing(cfg.scenario)) {
    Rng shadow_rng(child_seed(cfg.master_seed, kSeedStreamShadow, index));
    for (auto& z : shadow.data()) z = shadow_rng.normal();
  }

  auto net = make_realization(std::move(ap_pos), std::move(user_pos), std::move(shadow),
                              cfg.scenario, sys);
  net.instance_seed = user_seed;
  return net;
}

namespace {

struct RawSample {
  std::vector<double> input;   // un-standardized features
  std::vector<double> target;  // eta*/cap in [0,1]
  bool converged = false;
  std::uint64_t seed = 0;
};

RawSample generate_sample(const ScenarioConfig& cfg, std::uint64_t index) {
  const auto net = sample_realization(cfg, index);
  const auto co = sinr_coefficients(net, cfg.system);

  SolverReport report = cfg.objective == Objective::SumRate
                            ? solve_sumrate_sca(co, cfg.system, cfg.solver)
                            : solve_maxmin(co, cfg.system, cfg.solver);

  RawSample s;
  s.seed = net.instance_seed;
  s.converged = report.converged;
  if (!s.converged) return s;

  const auto& sys = cfg.system;
  if (cfg.scenario == Scenario::S3) {
    s.input.resize(net.beta.size());
    for (std::size_t i = 0; i < net.beta.size(); ++i)
      s.input[i] = 10.0 * std::log10(net.beta.data()[i]);
  } else {
    s.input.resize(2 * static_cast<std::size_t>(sys.num_users));
    for (int k = 0; k < sys.num_users; ++k) {
      s.input[2 * static_cast<std::size_t>(k)] =
          net.user_positions(static_cast<std::size_t>(k), 0) / sys.area_side_m;
      s.input[2 * static_cast<std::size_t>(k) + 1] =
          net.user_positions(static_cast<std::size_t>(k), 1) / sys.area_side_m;
    }
  }

  s.target.resize(static_cast<std::size_t>(sys.num_users));
  for (int k = 0; k < sys.num_users; ++k)
    s.target[static_cast<std::size_t>(k)] =
        report.powers_mw[static_cast<std::size_t>(k)] / sys.p_max_of(k);
  return s;
}

DatasetSplit assemble_split(const std::vector<RawSample>& samples,
                            std::uint64_t index_lo, std::uint64_t index_hi,
                            int in_dim, int out_dim) {
  std::size_t kept = 0;
  for (std::uint64_t i = index_lo; i < index_hi; ++i)
    if (samples[i].converged) ++kept;

  DatasetSplit split;
  split.inputs = Matrix(kept, static_cast<std::size_t>(in_dim));
  split.targets = Matrix(kept, static_cast<std::size_t>(out_dim));
  split.indices.reserve(kept);
  split.instance_seeds.reserve(kept);

  std::size_t row = 0;
  for (std::uint64_t i = index_lo; i < index_hi; ++i) {
    const auto& s = samples[i];
    if (!s.converged) continue;
    std::memcpy(split.inputs.row(row), s.input.data(), s.input.size() * sizeof(double));
    std::memcpy(split.targets.row(row), s.target.data(), s.target.size() * sizeof(double));
    split.indices.push_back(i);
    split.instance_seeds.push_back(s.seed);
    ++row;
  }
  return split;
}

}  // namespace

Dataset build_dataset(const ScenarioConfig& cfg, Exec exec) {
  cfg.validate();
  const int total = cfg.total_samples();
  const int in_dim = input_dim(cfg);
  const int out_dim = cfg.system.num_users;

  std::vector<RawSample> samples(static_cast<std::size_t>(total));
  const bool parallel = exec == Exec::Parallel;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (long long i = 0; i < static_cast<long long>(total); ++i)
    samples[static_cast<std::size_t>(i)] =
        generate_sample(cfg, static_cast<std::uint64_t>(i));

  Dataset ds;
  ds.manifest.config = cfg;
  ds.manifest.input_dim = in_dim;
  ds.manifest.target_dim = out_dim;
  for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(total); ++i)
    if (!samples[i].converged)
      ds.manifest.dropped.push_back({i, samples[i].seed});

  if (ds.manifest.dropped.size() * 100 >= static_cast<std::size_t>(total))
    throw DataError("dataset build: " + std::to_string(ds.manifest.dropped.size()) +
                    " of " + std::to_string(total) +
                    " samples failed to converge (>= 1%)");

  const auto n_train = static_cast<std::uint64_t>(cfg.n_train);
  const auto n_val = static_cast<std::uint64_t>(cfg.n_val);
  ds.train = assemble_split(samples, 0, n_train, in_dim, out_dim);
  ds.val = assemble_split(samples, n_train, n_train + n_val, in_dim, out_dim);
  ds.test = assemble_split(samples, n_train + n_val, static_cast<std::uint64_t>(total),
                           in_dim, out_dim);

  if (cfg.scenario == Scenario::S3) {
    // Standardize beta features using training-split statistics only.
    const std::size_t n = ds.train.size();
    if (n < 2) throw DataError("dataset build: S3 needs at least 2 training samples");
    auto& mean = ds.manifest.standardize_mean;
    auto& std_dev = ds.manifest.standardize_std;
    mean.assign(static_cast<std::size_t>(in_dim), 0.0);
    std_dev.assign(static_cast<std::size_t>(in_dim), 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = ds.train.inputs.row(r);
      for (int f = 0; f < in_dim; ++f) mean[static_cast<std::size_t>(f)] += row[f];
    }
    for (auto& v : mean) v /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      const double* row = ds.train.inputs.row(r);
      for (int f = 0; f < in_dim; ++f) {
        const double d = row[f] - mean[static_cast<std::size_t>(f)];
        std_dev[static_cast<std::size_t>(f)] += d * d;
      }
    }
    for (auto& v : std_dev) {
      v = std::sqrt(v / static_cast<double>(n));
      if (v < 1e-12) v = 1.0;
    }
    for (DatasetSplit* split : {&ds.train, &ds.val, &ds.test})
      for (std::size_t r = 0; r < split->size(); ++r) {
        double* row = split->inputs.row(r);
        for (int f = 0; f < in_dim; ++f) {
          const auto fu = static_cast<std::size_t>(f);
          row[f] = (row[f] - mean[fu]) / std_dev[fu];
        }
      }
  }
  return ds;
}

namespace {

std::vector<char> split_bytes(const DatasetSplit& split) {
  const std::size_t n = split.size();
  const std::size_t in_dim = split.inputs.cols();
  const std::size_t out_dim = split.targets.cols();
  std::vector<char> bytes(n * (in_dim + out_dim) * sizeof(double));
  char* p = bytes.data();
  for (std::size_t r = 0; r < n; ++r) {
    std::memcpy(p, split.inputs.row(r), in_dim * sizeof(double));
    p += in_dim * sizeof(double);
    std::memcpy(p, split.targets.row(r), out_dim * sizeof(double));
    p += out_dim * sizeof(double);
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write on " + path.string());
}

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw DataError("missing file: " + path.string());
  const auto size = in.tellg();
  in.seekg(0);
  std::vector<char> bytes(static_cast<std::size_t>(size));
  in.read(bytes.data(), size);
  if (!in) throw DataError("failed reading " + path.string());
  return bytes;
}

DatasetSplit parse_split(const std::vector<char>& bytes, int in_dim, int out_dim,
                         const std::vector<std::uint64_t>& indices,
                         const ScenarioConfig& cfg, const std::string& name) {
  const std::size_t rec_bytes =
      (static_cast<std::size_t>(in_dim) + static_cast<std::size_t>(out_dim)) * sizeof(double);
  if (bytes.size() % rec_bytes != 0)
    throw DataError(name + ": file size is not a whole number of records (record dims " +
                    std::to_string(in_dim) + "+" + std::to_string(out_dim) + ")");
  const std::size_t n = bytes.size() / rec_bytes;
  if (n != indices.size())
    throw DataError(name + ": manifest lists " + std::to_string(indices.size()) +
                    " records, file holds " + std::to_string(n));

  DatasetSplit split;
  split.inputs = Matrix(n, static_cast<std::size_t>(in_dim));
  split.targets = Matrix(n, static_cast<std::size_t>(out_dim));
  split.indices = indices;
  split.instance_seeds.reserve(n);
  for (std::uint64_t idx : indices)
    split.instance_seeds.push_back(child_seed(cfg.master_seed, kSeedStreamUsers, idx));

  const char* p = bytes.data();
  for (std::size_t r = 0; r < n; ++r) {
    std::memcpy(split.inputs.row(r), p, static_cast<std::size_t>(in_dim) * sizeof(double));
    p += static_cast<std::size_t>(in_dim) * sizeof(double);
    std::memcpy(split.targets.row(r), p, static_cast<std::size_t>(out_dim) * sizeof(double));
    p += static_cast<std::size_t>(out_dim) * sizeof(double);
  }
  return split;
}

}  // namespace

std::uint64_t fnv1a64(const void* data, std::size_t nbytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < nbytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  DatasetManifest manifest = ds.manifest;
  const auto train_bytes = split_bytes(ds.train);
  const auto val_bytes = split_bytes(ds.val);
  const auto test_bytes = split_bytes(ds.test);
  manifest.hash_train = fnv1a64(train_bytes.data(), train_bytes.size());
  manifest.hash_val = fnv1a64(val_bytes.data(), val_bytes.size());
  manifest.hash_test = fnv1a64(test_bytes.data(), test_bytes.size());

  write_file(dir / "train.bin", train_bytes);
  write_file(dir / "val.bin", val_bytes);
  write_file(dir / "test.bin", test_bytes);

  nlohmann::json j = manifest_to_json(manifest);
  j["indices"] = {{"train", ds.train.indices},
                  {"val", ds.val.indices},
                  {"test", ds.test.indices}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw DataError("missing manifest: " + (dir / "manifest.json").string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad manifest: ") + e.what());
  }

  Dataset ds;
  ds.manifest = manifest_from_json(j);
  const int in_dim = ds.manifest.input_dim;
  const int out_dim = ds.manifest.target_dim;
  if (out_dim != ds.manifest.config.system.num_users)
    throw DataError("manifest: target dimension disagrees with num_users");
  if (in_dim != input_dim(ds.manifest.config))
    throw DataError("manifest: input dimension disagrees with scenario");

  const auto& idx = j.at("indices");
  const auto train_bytes = read_file(dir / "train.bin");
  const auto val_bytes = read_file(dir / "val.bin");
  const auto test_bytes = read_file(dir / "test.bin");

  if (fnv1a64(train_bytes.data(), train_bytes.size()) != ds.manifest.hash_train)
    throw DataError("train.bin content hash mismatch");
  if (fnv1a64(val_bytes.data(), val_bytes.size()) != ds.manifest.hash_val)
    throw DataError("val.bin content hash mismatch");
  if (fnv1a64(test_bytes.data(), test_bytes.size()) != ds.manifest.hash_test)
    throw DataError("test.bin content hash mismatch");

  ds.train = parse_split(train_bytes, in_dim, out_dim,
                         idx.at("train").get<std::vector<std::uint64_t>>(),
                         ds.manifest.config, "train.bin");
  ds.val = parse_split(val_bytes, in_dim, out_dim,
                       idx.at("val").get<std::vector<std::uint64_t>>(),
                       ds.manifest.config, "val.bin");
  ds.test = parse_split(test_bytes, in_dim, out_dim,
                        idx.at("test").get<std::vector<std::uint64_t>>(),
                        ds.manifest.config, "test.bin");
  return ds;
}

}  // namespace cfmimo
