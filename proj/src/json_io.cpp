#include "cfmimo/json_io.hpp"

#include <fstream>

namespace cfmimo {

using nlohmann::json;

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

json to_json(const SystemConfig& cfg) {
  json j = {
      {"area_side_m", cfg.area_side_m},
      {"num_aps", cfg.num_aps},
      {"num_users", cfg.num_users},
      {"antennas_per_ap", cfg.antennas_per_ap},
      {"bandwidth_hz", cfg.bandwidth_hz},
      {"carrier_hz", cfg.carrier_hz},
      {"ap_height_m", cfg.ap_height_m},
      {"user_height_m", cfg.user_height_m},
      {"noise_psd_dbm_hz", cfg.noise_psd_dbm_hz},
      {"noise_figure_db", cfg.noise_figure_db},
      {"tau_c", cfg.tau_c},
      {"tau_p", cfg.tau_p},
      {"pilot_power_mw", cfg.pilot_power_mw},
      {"p_max_ul_mw", cfg.p_max_ul_mw},
      {"shadow_std_db", cfg.shadow_std_db},
  };
  if (!cfg.p_max_per_user_mw.empty()) j["p_max_per_user_mw"] = cfg.p_max_per_user_mw;
  if (!cfg.serving_aps_per_user.empty()) j["serving_aps_per_user"] = cfg.serving_aps_per_user;
  return j;
}

SystemConfig system_config_from_json(const json& j) {
  require_keys(j,
               {"area_side_m", "num_aps", "num_users", "antennas_per_ap", "bandwidth_hz",
                "carrier_hz", "ap_height_m", "user_height_m", "noise_psd_dbm_hz",
                "noise_figure_db", "tau_c", "tau_p", "pilot_power_mw", "p_max_ul_mw",
                "p_max_per_user_mw", "shadow_std_db", "serving_aps_per_user"},
               "system");
  SystemConfig cfg;
  cfg.area_side_m = j.value("area_side_m", cfg.area_side_m);
  cfg.num_aps = j.value("num_aps", cfg.num_aps);
  cfg.num_users = j.value("num_users", cfg.num_users);
  cfg.antennas_per_ap = j.value("antennas_per_ap", cfg.antennas_per_ap);
  cfg.bandwidth_hz = j.value("bandwidth_hz", cfg.bandwidth_hz);
  cfg.carrier_hz = j.value("carrier_hz", cfg.carrier_hz);
  cfg.ap_height_m = j.value("ap_height_m", cfg.ap_height_m);
  cfg.user_height_m = j.value("user_height_m", cfg.user_height_m);
  cfg.noise_psd_dbm_hz = j.value("noise_psd_dbm_hz", cfg.noise_psd_dbm_hz);
  cfg.noise_figure_db = j.value("noise_figure_db", cfg.noise_figure_db);
  cfg.tau_c = j.value("tau_c", cfg.tau_c);
  cfg.tau_p = j.value("tau_p", cfg.tau_p);
  cfg.pilot_power_mw = j.value("pilot_power_mw", cfg.pilot_power_mw);
  cfg.p_max_ul_mw = j.value("p_max_ul_mw", cfg.p_max_ul_mw);
  cfg.shadow_std_db = j.value("shadow_std_db", cfg.shadow_std_db);
  if (j.contains("p_max_per_user_mw"))
    cfg.p_max_per_user_mw = j.at("p_max_per_user_mw").get<std::vector<double>>();
  if (j.contains("serving_aps_per_user"))
    cfg.serving_aps_per_user =
        j.at("serving_aps_per_user").get<std::vector<std::vector<int>>>();
  cfg.validate();
  return cfg;
}

json to_json(const SolverOptions& opt) {
  return {
      {"sca_rel_tol", opt.sca_rel_tol},
      {"sca_max_outer", opt.sca_max_outer},
      {"inner_pg_tol", opt.inner_pg_tol},
      {"inner_max_iters", opt.inner_max_iters},
      {"maxmin_rel_tol", opt.maxmin_rel_tol},
      {"maxmin_max_bisect", opt.maxmin_max_bisect},
      {"fixed_point_tol", opt.fixed_point_tol},
      {"fixed_point_max_iters", opt.fixed_point_max_iters},
  };
}

SolverOptions solver_options_from_json(const json& j) {
  require_keys(j,
               {"sca_rel_tol", "sca_max_outer", "inner_pg_tol", "inner_max_iters",
                "maxmin_rel_tol", "maxmin_max_bisect", "fixed_point_tol",
                "fixed_point_max_iters"},
               "solver");
  SolverOptions opt;
  opt.sca_rel_tol = j.value("sca_rel_tol", opt.sca_rel_tol);
  opt.sca_max_outer = j.value("sca_max_outer", opt.sca_max_outer);
  opt.inner_pg_tol = j.value("inner_pg_tol", opt.inner_pg_tol);
  opt.inner_max_iters = j.value("inner_max_iters", opt.inner_max_iters);
  opt.maxmin_rel_tol = j.value("maxmin_rel_tol", opt.maxmin_rel_tol);
  opt.maxmin_max_bisect = j.value("maxmin_max_bisect", opt.maxmin_max_bisect);
  opt.fixed_point_tol = j.value("fixed_point_tol", opt.fixed_point_tol);
  opt.fixed_point_max_iters = j.value("fixed_point_max_iters", opt.fixed_point_max_iters);
  return opt;
}

json to_json(const ScenarioConfig& cfg) {
  return {
      {"scenario", to_string(cfg.scenario)},
      {"objective", to_string(cfg.objective)},
      {"system", to_json(cfg.system)},
      {"n_train", cfg.n_train},
      {"n_val", cfg.n_val},
      {"n_test", cfg.n_test},
      {"master_seed", cfg.master_seed},
      {"resample_aps", cfg.resample_aps},
      {"solver", to_json(cfg.solver)},
  };
}

ScenarioConfig scenario_config_from_json(const json& j) {
  require_keys(j,
               {"scenario", "objective", "system", "n_train", "n_val", "n_test",
                "master_seed", "resample_aps", "solver"},
               "scenario");
  ScenarioConfig cfg;
  if (j.contains("scenario"))
    cfg.scenario = scenario_from_string(j.at("scenario").get<std::string>());
  if (j.contains("objective"))
    cfg.objective = objective_from_string(j.at("objective").get<std::string>());
  if (j.contains("system")) cfg.system = system_config_from_json(j.at("system"));
  cfg.n_train = j.value("n_train", cfg.n_train);
  cfg.n_val = j.value("n_val", cfg.n_val);
  cfg.n_test = j.value("n_test", cfg.n_test);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.resample_aps = j.value("resample_aps", cfg.resample_aps);
  if (j.contains("solver")) cfg.solver = solver_options_from_json(j.at("solver"));
  cfg.validate();
  return cfg;
}

json to_json(const TrainSchedule& sched) {
  json phases = json::array();
  for (const auto& [lr, ep] : sched.phases) phases.push_back({{"lr", lr}, {"epochs", ep}});
  return {
      {"phases", phases},
      {"batch_size", sched.batch_size},
      {"beta1", sched.beta1},
      {"beta2", sched.beta2},
      {"epsilon", sched.epsilon},
      {"loss",
       sched.loss_mode == LossMode::PmaxNormalized ? "pmax-normalized" : "target-normalized"},
  };
}

TrainSchedule train_schedule_from_json(const json& j) {
  require_keys(j, {"phases", "batch_size", "beta1", "beta2", "epsilon", "loss"}, "train");
  TrainSchedule sched;
  if (j.contains("phases")) {
    sched.phases.clear();
    for (const auto& p : j.at("phases")) {
      require_keys(p, {"lr", "epochs"}, "train.phases[]");
      sched.phases.emplace_back(p.at("lr").get<double>(), p.at("epochs").get<int>());
    }
    if (sched.phases.empty()) throw ConfigError("train: phases must not be empty");
  }
  sched.batch_size = j.value("batch_size", sched.batch_size);
  if (sched.batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  sched.beta1 = j.value("beta1", sched.beta1);
  sched.beta2 = j.value("beta2", sched.beta2);
  sched.epsilon = j.value("epsilon", sched.epsilon);
  if (j.contains("loss")) {
    const auto s = j.at("loss").get<std::string>();
    if (s == "pmax-normalized")
      sched.loss_mode = LossMode::PmaxNormalized;
    else if (s == "target-normalized")
      sched.loss_mode = LossMode::TargetNormalized;
    else
      throw ConfigError("train: unknown loss '" + s + "'");
  }
  return sched;
}

json to_json(const SolverReport& report) {
  return {
      {"powers_mw", report.powers_mw},
      {"objective_bps", report.objective_bps},
      {"iterations", report.iterations},
      {"converged", report.converged},
      {"objective_trace_bps", report.objective_trace_bps},
  };
}

json to_json(const NetworkRealization& net) {
  auto mat = [](const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return {
      {"ap_positions", mat(net.ap_positions)},
      {"user_positions", mat(net.user_positions)},
      {"shadow_z", mat(net.shadow_z)},
      {"pilot_gram", mat(net.gram)},
      {"instance_seed", net.instance_seed},
  };
}

RunConfig run_config_from_json(const json& j) {
  require_keys(j, {"system", "scenario", "solver", "train", "init_seed", "shuffle_seed",
                   "output_dir"},
               "config");
  RunConfig rc;
  // Scenario block without nested system/solver; those are top-level sections.
  json scenario = j.value("scenario", json::object());
  if (scenario.contains("system") || scenario.contains("solver"))
    throw ConfigError("config: put 'system' and 'solver' at the top level");
  if (j.contains("system")) scenario["system"] = j.at("system");
  if (j.contains("solver")) scenario["solver"] = j.at("solver");
  rc.scenario = scenario_config_from_json(scenario);
  if (j.contains("train")) rc.schedule = train_schedule_from_json(j.at("train"));
  rc.init_seed = j.value("init_seed", rc.init_seed);
  rc.shuffle_seed = j.value("shuffle_seed", rc.shuffle_seed);
  rc.output_dir = j.value("output_dir", rc.output_dir);
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

json manifest_to_json(const DatasetManifest& m) {
  json dropped = json::array();
  for (const auto& d : m.dropped) dropped.push_back({{"index", d.index}, {"seed", d.seed}});
  json j = {
      {"format", "cfmimo-dataset-v1"},
      {"config", to_json(m.config)},
      {"input_dim", m.input_dim},
      {"target_dim", m.target_dim},
      {"dropped", dropped},
      {"hash_train", m.hash_train},
      {"hash_val", m.hash_val},
      {"hash_test", m.hash_test},
  };
  if (!m.standardize_mean.empty()) {
    j["standardize_mean"] = m.standardize_mean;
    j["standardize_std"] = m.standardize_std;
  }
  return j;
}

DatasetManifest manifest_from_json(const json& j) {
  require_keys(j,
               {"format", "config", "input_dim", "target_dim", "dropped", "hash_train",
                "hash_val", "hash_test", "standardize_mean", "standardize_std", "indices"},
               "manifest");
  if (j.value("format", "") != "cfmimo-dataset-v1")
    throw DataError("unsupported dataset format");
  DatasetManifest m;
  m.config = scenario_config_from_json(j.at("config"));
  m.input_dim = j.at("input_dim").get<int>();
  m.target_dim = j.at("target_dim").get<int>();
  for (const auto& d : j.at("dropped"))
    m.dropped.push_back({d.at("index").get<std::uint64_t>(), d.at("seed").get<std::uint64_t>()});
  m.hash_train = j.at("hash_train").get<std::uint64_t>();
  m.hash_val = j.at("hash_val").get<std::uint64_t>();
  m.hash_test = j.at("hash_test").get<std::uint64_t>();
  if (j.contains("standardize_mean")) {
    m.standardize_mean = j.at("standardize_mean").get<std::vector<double>>();
    m.standardize_std = j.at("standardize_std").get<std::vector<double>>();
  }
  return m;
}

}  // namespace cfmimo
