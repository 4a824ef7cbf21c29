// Command-line front end: gen / solve / train / eval.
//
// Exit codes: 0 success, 1 numerical or convergence failure, 2 usage or
// configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cfmimo/evaluation.hpp"
#include "cfmimo/json_io.hpp"
#include "cfmimo/monte_carlo.hpp"

namespace fs = std::filesystem;
using namespace cfmimo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitUsage = 2;

fs::path resolve_out(const std::string& flag, const RunConfig& rc,
                     const std::string& fallback_name) {
  if (!flag.empty()) return flag;
  if (!rc.output_dir.empty()) return rc.output_dir;
  if (const char* root = std::getenv("CFMIMO_OUT_ROOT"))
    return fs::path(root) / fallback_name;
  return fs::path("out") / fallback_name;
}

void copy_config_into(const fs::path& config_path, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  fs::copy_file(config_path, out_dir / "config.json",
                fs::copy_options::overwrite_existing);
}

std::string run_name(const RunConfig& rc) {
  return to_string(rc.scenario.scenario) + "_" + to_string(rc.scenario.objective);
}

int cmd_gen(const fs::path& config_path, const std::string& out_flag) {
  const RunConfig rc = load_run_config(config_path);
  const fs::path out = resolve_out(out_flag, rc, run_name(rc) + "_data");
  fs::create_directories(out);

  const Dataset ds = build_dataset(rc.scenario);
  save_dataset(ds, out);
  copy_config_into(config_path, out);

  std::cout << "dataset: " << out.string() << "\n"
            << "scenario " << to_string(rc.scenario.scenario) << ", objective "
            << to_string(rc.scenario.objective) << "\n"
            << "records: train " << ds.train.size() << ", val " << ds.val.size()
            << ", test " << ds.test.size() << " (dropped "
            << ds.manifest.dropped.size() << ")\n"
            << "input_dim " << ds.manifest.input_dim << ", target_dim "
            << ds.manifest.target_dim << "\n";
  return kExitOk;
}

int cmd_solve(const fs::path& config_path, std::uint64_t instance_seed,
              const std::string& out_flag, bool dump_realization) {
  RunConfig rc = load_run_config(config_path);
  rc.scenario.master_seed = instance_seed;

  const auto net = sample_realization(rc.scenario, 0);
  const auto co = sinr_coefficients(net, rc.scenario.system);
  const SolverReport report =
      rc.scenario.objective == Objective::SumRate
          ? solve_sumrate_sca(co, rc.scenario.system, rc.scenario.solver)
          : solve_maxmin(co, rc.scenario.system, rc.scenario.solver);

  nlohmann::json j = to_json(report);
  j["objective"] = to_string(rc.scenario.objective);
  j["scenario"] = to_string(rc.scenario.scenario);
  j["instance_seed"] = instance_seed;
  if (dump_realization) j["realization"] = to_json(net);

  const std::string text = j.dump(2) + "\n";
  if (!out_flag.empty()) {
    std::ofstream out(out_flag);
    if (!out) throw ConfigError("cannot write " + out_flag);
    out << text;
  }
  std::cout << text;
  return report.converged ? kExitOk : kExitNumerical;
}

MlpLayout pick_layout(const DatasetManifest& m, const std::string& override_name) {
  const int in_dim = m.input_dim;
  const int out_dim = m.target_dim;
  if (!override_name.empty()) {
    MlpLayout layout;
    if (override_name == "ann1")
      layout = MlpLayout::ann1();
    else if (override_name == "ann2")
      layout = MlpLayout::ann2();
    else if (override_name == "ann3")
      layout = MlpLayout::ann3();
    else
      throw ConfigError("unknown layout '" + override_name + "'");
    if (layout.input_dim != in_dim)
      throw ConfigError("layout " + override_name + " expects input dimension " +
                        std::to_string(layout.input_dim) + ", dataset provides " +
                        std::to_string(in_dim));
    if (layout.output_dim != out_dim)
      throw ConfigError("layout " + override_name + " expects output dimension " +
                        std::to_string(layout.output_dim) + ", dataset provides " +
                        std::to_string(out_dim));
    return layout;
  }
  // ANN1 imitates the sum-rate solver and ANN2 the max-min solver on
  // position inputs; ANN3 handles the beta inputs under shadowing.
  if (m.config.scenario == Scenario::S3) return MlpLayout::ann3(in_dim, out_dim);
  return m.config.objective == Objective::SumRate ? MlpLayout::ann1(in_dim, out_dim)
                                                  : MlpLayout::ann2(in_dim, out_dim);
}

int cmd_train(const fs::path& config_path, const fs::path& data_dir,
              const std::string& out_flag, const std::string& layout_override) {
  const RunConfig rc = load_run_config(config_path);
  const Dataset ds = load_dataset(data_dir);
  const fs::path out = resolve_out(out_flag, rc, run_name(rc) + "_model");
  fs::create_directories(out);

  const MlpLayout layout = pick_layout(ds.manifest, layout_override);
  MlpModel model = init_mlp(layout, rc.init_seed);
  const auto log = train(model, ds.train.inputs, ds.train.targets, ds.val.inputs,
                         ds.val.targets, rc.schedule, rc.shuffle_seed);

  save_checkpoint(out / "model.ckpt", model, rc.schedule, rc.schedule.total_epochs());
  write_epoch_log_csv(out / "epoch_log.csv", log);
  {
    const std::string label =
        to_string(ds.manifest.config.scenario) + "-" +
        (ds.manifest.config.objective == Objective::SumRate ? "SR" : "MR");
    std::ofstream tbl(out / "mse_table.csv");
    if (!tbl) throw DataError("cannot write mse_table.csv");
    tbl << mse_report_csv({{label, log}});
  }
  copy_config_into(config_path, out);

  std::cout << "model: " << (out / "model.ckpt").string() << "\n"
            << "layout " << (layout_override.empty() ? "auto" : layout_override)
            << ", parameters " << layout.parameter_count() << "\n"
            << "final train/val mse: " << log.back().train_mse << " / "
            << log.back().val_mse << "\n";
  return kExitOk;
}

struct EvalPair {
  Dataset dataset;
  MlpModel model;
  bool has_model = false;
};

EvalPair load_pair(const fs::path& data_dir, const std::string& model_path) {
  EvalPair p{load_dataset(data_dir), {}, false};
  if (!model_path.empty()) {
    if (!fs::exists(model_path))
      throw ConfigError("missing checkpoint: " + model_path);
    p.model = load_checkpoint(model_path);
    if (p.model.layout.input_dim != p.dataset.manifest.input_dim)
      throw ConfigError("checkpoint input dimension does not match dataset");
    p.has_model = true;
  }
  return p;
}

int cmd_eval(const fs::path& config_path, const fs::path& data_dir,
             const std::string& model_path, const std::string& data2_dir,
             const std::string& model2_path, const std::string& out_flag) {
  const RunConfig rc = load_run_config(config_path);
  const fs::path out = resolve_out(out_flag, rc, run_name(rc) + "_eval");
  fs::create_directories(out);

  std::vector<EvalPair> pairs;
  pairs.push_back(load_pair(data_dir, model_path));
  if (!data2_dir.empty()) {
    pairs.push_back(load_pair(data2_dir, model2_path));
    const auto& a = pairs[0].dataset.manifest.config;
    const auto& b = pairs[1].dataset.manifest.config;
    if (a.scenario != b.scenario || a.master_seed != b.master_seed ||
        a.n_train != b.n_train || a.n_val != b.n_val || a.n_test != b.n_test ||
        pairs[0].dataset.test.indices != pairs[1].dataset.test.indices)
      throw ConfigError("eval: the two datasets cover different test instances");
  }

  const auto coeffs = regenerate_test_coefficients(pairs[0].dataset);
  const auto& sys = pairs[0].dataset.manifest.config.system;

  std::vector<PolicyEvaluation> evals;
  for (const auto& p : pairs) {
    const bool sr = p.dataset.manifest.config.objective == Objective::SumRate;
    const std::string opt_label = sr ? "SR Max" : "MR Max";
    evals.push_back(evaluate_policy(opt_label, powers_from_targets(p.dataset.test, sys),
                                    coeffs, sys));
    if (p.has_model)
      evals.push_back(evaluate_policy(opt_label + " ANN",
                                      powers_from_model(p.model, p.dataset.test, sys),
                                      coeffs, sys));
  }
  evals.push_back(
      evaluate_policy("Uni", powers_uniform(coeffs.size(), sys), coeffs, sys));

  write_cdf_csv(out / "cdf.csv", evals);
  write_summary_csv(out / "summary.csv", evals);
  copy_config_into(config_path, out);

  std::cout << "evaluation: " << out.string() << "\n";
  for (const auto& ev : evals)
    std::cout << ev.method << ": mean " << ev.mean_bps / 1e6 << " Mbit/s, median "
              << ev.median_bps / 1e6 << ", p5 " << ev.p5_bps / 1e6 << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-free massive MIMO uplink power allocation pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, layout_override, model_path, data_dir;
  std::string data2_dir, model2_path;
  std::uint64_t instance_seed = 1;
  bool dump_realization = false;

  auto* gen = app.add_subcommand("gen", "generate a dataset (realizations + solver targets)");
  gen->add_option("--config", config_path, "run configuration JSON")->required();
  gen->add_option("--out", out_dir, "output directory");

  auto* solve = app.add_subcommand("solve", "solve one seeded instance, emit a JSON report");
  solve->add_option("--config", config_path, "run configuration JSON")->required();
  solve->add_option("--instance-seed", instance_seed, "seed of the instance to solve");
  solve->add_option("--out", out_dir, "also write the report to this file");
  solve->add_flag("--dump-realization", dump_realization,
                  "include the network realization in the report");

  auto* tr = app.add_subcommand("train", "train the scenario-matched network on a dataset");
  tr->add_option("--config", config_path, "run configuration JSON")->required();
  tr->add_option("--data", data_dir, "dataset directory")->required();
  tr->add_option("--out", out_dir, "output directory");
  tr->add_option("--layout", layout_override, "force ann1 / ann2 / ann3");

  auto* ev = app.add_subcommand("eval", "evaluate optimal / learned / uniform policies");
  ev->add_option("--config", config_path, "run configuration JSON")->required();
  ev->add_option("--data", data_dir, "dataset directory")->required();
  ev->add_option("--model", model_path, "checkpoint for the dataset's objective");
  ev->add_option("--data2", data2_dir, "dataset for the other objective (same seeds)");
  ev->add_option("--model2", model2_path, "checkpoint for the second dataset");
  ev->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen(config_path, out_dir);
    if (solve->parsed())
      return cmd_solve(config_path, instance_seed, out_dir, dump_realization);
    if (tr->parsed()) return cmd_train(config_path, data_dir, out_dir, layout_override);
    if (ev->parsed())
      return cmd_eval(config_path, data_dir, model_path, data2_dir, model2_path, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
