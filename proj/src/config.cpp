#include "uavair/config.hpp"

#include <fstream>
#include <stdexcept>

namespace uavair {

RunConfig paper_profile() { return RunConfig{}; }

RunConfig desk_profile() {
  RunConfig c;
  c.scenario.area_side = 400.0;
  c.scenario.num_users = 4;
  c.scenario.num_sensors = 6;
  c.scenario.num_slots = 30;
  c.scenario.mission_time = 30.0;
  c.scenario.start = Point2{0.0, 0.0};
  c.scenario.end = Point2{400.0, 0.0};
  c.scenario.topology = TopologyKind::mixed;
  c.scenario.seed = 1;
  c.sac.hidden = {64, 64};
  c.sac.lr_q = 1e-3;
  c.sac.lr_pi = 3e-4;
  c.sac.lr_beta = 3e-4;
  c.reward.lambda1 = 20.0;
  c.reward.lambda2 = 3e-4;
  c.reward.arrival_bonus = 30000.0;
  c.reward.rate_scale = 0.1;
  c.reward.count_scale = CountScale::horizon;
  c.episodes = 2000;
  c.warmup_steps = 900;
  c.eval_episodes = 20;
  return c;
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> errs = validate(c.scenario);
  auto add = [&errs](std::vector<std::string> more) {
    for (auto& e : more) errs.push_back(std::move(e));
  };
  add(validate(c.channel));
  add(validate(c.solver));
  add(validate(c.sac));
  add(validate(c.reward));
  if (!(c.limits.p_max > 0.0) || !(c.limits.pb_max > 0.0)) errs.push_back("power limits must be positive");
  if (c.episodes < 0) errs.push_back("episodes must be non-negative");
  if (c.eval_episodes < 0) errs.push_back("eval_episodes must be non-negative");
  if (c.warmup_steps < 0) errs.push_back("warmup_steps must be non-negative");
  return errs;
}

namespace {

void apply_channel(const nlohmann::json& j, ChannelParams& c) {
  c.carrier_freq = j.value("carrier_freq", c.carrier_freq);
  c.light_speed = j.value("light_speed", c.light_speed);
  c.env_a = j.value("env_a", c.env_a);
  c.env_b = j.value("env_b", c.env_b);
  c.loss_los_db = j.value("loss_los_db", c.loss_los_db);
  c.loss_nlos_db = j.value("loss_nlos_db", c.loss_nlos_db);
  if (j.contains("noise_dbm") && j.contains("noise_power"))
    throw std::invalid_argument("give either noise_dbm or noise_power, not both");
  if (j.contains("noise_dbm")) c.noise_power = dbm_to_watts(j.at("noise_dbm").get<double>());
  c.noise_power = j.value("noise_power", c.noise_power);
}

void apply_limits(const nlohmann::json& j, PowerLimits& c) {
  c.p_max = j.value("p_max", c.p_max);
  c.pb_max = j.value("pb_max", c.pb_max);
}

void apply_solver(const nlohmann::json& j, SolverConfig& c) {
  c.gamma = j.value("gamma", c.gamma);
  c.tol = j.value("tol", c.tol);
  c.max_outer = j.value("max_outer", c.max_outer);
  c.max_inner = j.value("max_inner", c.max_inner);
  c.max_newton_steps = j.value("max_newton_steps", c.max_newton_steps);
}

// Merge `patch` into `base` key by key so partial sections keep their defaults.
template <class T>
void apply_section(const nlohmann::json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  nlohmann::json merged = target;
  merged.merge_patch(j.at(key));
  target = merged.get<T>();
}

}  // namespace

RunConfig load_run_config(const nlohmann::json& j) {
  const std::string profile = j.value("profile", std::string("paper"));
  RunConfig c;
  if (profile == "paper")
    c = paper_profile();
  else if (profile == "desk")
    c = desk_profile();
  else
    throw std::invalid_argument("unknown profile '" + profile + "'");

  apply_section(j, "scenario", c.scenario);
  if (j.contains("channel")) apply_channel(j.at("channel"), c.channel);
  if (j.contains("limits")) apply_limits(j.at("limits"), c.limits);
  if (j.contains("solver")) apply_solver(j.at("solver"), c.solver);
  apply_section(j, "sac", c.sac);
  apply_section(j, "reward", c.reward);
  c.episodes = j.value("episodes", c.episodes);
  c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
  c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
  c.seed = j.value("seed", c.seed);
  c.out_dir = j.value("out_dir", c.out_dir);

  if (auto errs = validate(c); !errs.empty()) {
    std::string msg = "invalid run config:";
    for (const auto& e : errs) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }
  return c;
}

RunConfig load_run_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return load_run_config(j);
}

void to_json(nlohmann::json& j, const ChannelParams& c) {
  j = nlohmann::json{{"carrier_freq", c.carrier_freq}, {"light_speed", c.light_speed},
                     {"env_a", c.env_a},               {"env_b", c.env_b},
                     {"loss_los_db", c.loss_los_db},   {"loss_nlos_db", c.loss_nlos_db},
                     {"noise_power", c.noise_power}};
}

void to_json(nlohmann::json& j, const PowerLimits& c) { j = nlohmann::json{{"p_max", c.p_max}, {"pb_max", c.pb_max}}; }

void to_json(nlohmann::json& j, const SolverConfig& c) {
  j = nlohmann::json{{"gamma", c.gamma},
                     {"tol", c.tol},
                     {"max_outer", c.max_outer},
                     {"max_inner", c.max_inner},
                     {"max_newton_steps", c.max_newton_steps}};
}

nlohmann::json run_config_json(const RunConfig& c) {
  nlohmann::json j;
  j["scenario"] = c.scenario;
  j["channel"] = c.channel;
  j["limits"] = c.limits;
  j["solver"] = c.solver;
  j["sac"] = c.sac;
  j["reward"] = c.reward;
  j["episodes"] = c.episodes;
  j["eval_episodes"] = c.eval_episodes;
  j["warmup_steps"] = c.warmup_steps;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace uavair
