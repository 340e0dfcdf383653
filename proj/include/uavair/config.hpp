#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uavair/channel.hpp"
#include "uavair/env.hpp"
#include "uavair/inner_solver.hpp"
#include "uavair/phy.hpp"
#include "uavair/sac.hpp"
#include "uavair/scenario.hpp"

namespace uavair {

struct RunConfig {
  ScenarioConfig scenario;
  ChannelParams channel;
  PowerLimits limits;
  SolverConfig solver;
  SacConfig sac;
  RewardConfig reward;
  int episodes = 4000;
  int eval_episodes = 20;
  int warmup_steps = 0;  // uniformly random actions before the policy takes over
  std::uint64_t seed = 0;
  std::string out_dir = "runs";
};

/// Full-scale setting: M = 15, J = 36, N = 60 and the published link parameters.
RunConfig paper_profile();
/// Small setting that trains in minutes: M = 4, J = 6, N = 30.
RunConfig desk_profile();

/// Every violated invariant, including cross-section consistency.
std::vector<std::string> validate(const RunConfig& cfg);

/// Starts from the profile named by "profile" ("paper" by default) and applies
/// the sections present in `j`. Noise may be given as "noise_dbm" (converted
/// to watts here) or "noise_power" in watts. Throws std::invalid_argument when
/// the result is invalid.
RunConfig load_run_config(const nlohmann::json& j);
RunConfig load_run_config_file(const std::filesystem::path& path);

nlohmann::json run_config_json(const RunConfig& cfg);

void to_json(nlohmann::json& j, const ChannelParams& c);
void to_json(nlohmann::json& j, const PowerLimits& c);
void to_json(nlohmann::json& j, const SolverConfig& c);

}  // namespace uavair
