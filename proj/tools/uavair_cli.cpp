// Command-line front end: train, eval, baseline, sweep, solve-slot.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "uavair/baselines.hpp"
#include "uavair/config.hpp"
#include "uavair/harness.hpp"
#include "uavair/inner_solver.hpp"

using namespace uavair;

namespace {

RunConfig config_or_default(const std::string& path) {
  if (path.empty()) return desk_profile();
  return load_run_config_file(path);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return nlohmann::json::parse(in);
}

void print_report(const EvalReport& r) {
  nlohmann::json j{{"episodes", r.episodes.size()},
                   {"mean_sum_rate", r.mean_sum_rate},
                   {"mean_return", r.mean_return},
                   {"arrival_pct", r.arrival_pct},
                   {"fairness_pct", r.fairness_pct}};
  std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-assisted AirComp trajectory and scheduling with soft actor-critic"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "run", checkpoint_path, scenario_path, trace_path, kind_name, instance_path;
  std::vector<double> gammas;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int episodes = -1;
  bool with_sac = false;

  auto* train_cmd = app.add_subcommand("train", "train an agent and write metrics.csv and checkpoint.json");
  train_cmd->add_option("--config", config_path, "run config JSON (desk profile when omitted)");
  train_cmd->add_option("--seed", seed, "root seed")->each([&](const std::string&) { seed_given = true; });
  train_cmd->add_option("--out", out_dir, "output directory");
  train_cmd->add_option("--episodes", episodes, "override the episode count");

  auto* eval_cmd = app.add_subcommand("eval", "greedy rollouts of a checkpoint");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
  eval_cmd->add_option("--scenario", scenario_path, "scenario JSON (the training scenario when omitted)");
  eval_cmd->add_option("--episodes", episodes, "number of episodes");
  eval_cmd->add_option("--trace", trace_path, "JSON-lines trace output");

  auto* base_cmd = app.add_subcommand("baseline", "run one comparison scheme");
  base_cmd->add_option("--kind", kind_name, "straight_line_nearest | fixed_user_power | fixed_sensor_power | fixed_position")
      ->required();
  base_cmd->add_option("--config", config_path, "run config JSON");
  base_cmd->add_option("--trace", trace_path, "JSON-lines trace output");

  auto* sweep_cmd = app.add_subcommand("sweep", "sum-rate against the MSE threshold");
  sweep_cmd->add_option("--gamma", gammas, "thresholds, comma- or space-separated")->delimiter(',')->required();
  sweep_cmd->add_option("--config", config_path, "run config JSON");
  sweep_cmd->add_option("--out", out_dir, "directory for per-threshold training runs");
  sweep_cmd->add_flag("--with-sac", with_sac, "also train and evaluate an agent per threshold");

  auto* slot_cmd = app.add_subcommand("solve-slot", "solve one slot from {g, h, sigma2, gamma, p_max, pb_max}");
  slot_cmd->add_option("--instance", instance_path, "instance JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      RunConfig cfg = config_or_default(config_path);
      if (seed_given) cfg.seed = seed;
      if (episodes >= 0) cfg.episodes = episodes;
      auto res = train(cfg, out_dir, [](int ep, const EpisodeSummary& s) {
        if (ep % 10 == 0)
          std::cerr << "episode " << ep << " return " << s.total_return << " sum_rate " << s.sum_rate << '\n';
      });
      print_report(evaluate(res.agent, res.scenario, cfg, std::max(1, cfg.eval_episodes)));
    } else if (*eval_cmd) {
      auto ck = load_checkpoint(checkpoint_path);
      Scenario sc = ck.scenario;
      if (!scenario_path.empty()) sc = read_json(scenario_path).get<Scenario>();
      std::ofstream trace;
      if (!trace_path.empty()) trace.open(trace_path);
      print_report(evaluate(ck.agent, sc, ck.config, episodes >= 0 ? episodes : ck.config.eval_episodes,
                            trace_path.empty() ? nullptr : &trace));
    } else if (*base_cmd) {
      const RunConfig cfg = config_or_default(config_path);
      std::ofstream trace;
      if (!trace_path.empty()) trace.open(trace_path);
      const auto s = run_baseline(parse_baseline_kind(kind_name), generate_topology(cfg.scenario), baseline_setup(cfg),
                                  trace_path.empty() ? nullptr : &trace);
      print_report(summarize({s}));
    } else if (*sweep_cmd) {
      const RunConfig cfg = config_or_default(config_path);
      SweepOptions opts;
      opts.include_sac = with_sac;
      opts.out_dir = out_dir;
      write_sweep_csv(std::cout, sweep(cfg, gammas, opts));
    } else if (*slot_cmd) {
      const auto j = read_json(instance_path);
      ChannelState chan;
      chan.user_amp = {j.at("g").get<double>()};
      chan.sensor_amp = j.at("h").get<std::vector<double>>();
      chan.noise_power = j.at("sigma2").get<double>();
      PowerLimits lim{j.value("p_max", PowerLimits{}.p_max), j.value("pb_max", PowerLimits{}.pb_max)};
      SolverConfig sc;
      sc.gamma = j.value("gamma", sc.gamma);
      const auto sol = solve_slot(chan, 0, lim, sc);
      nlohmann::json out{{"feasible", sol.feasible},
                         {"rate", sol.rate},
                         {"mse", sol.mse},
                         {"p", sol.decision.user_power},
                         {"b", sol.decision.sensor_coeffs},
                         {"eta", sol.decision.eta},
                         {"outer_iterations", sol.outer_iterations}};
      std::cout << out.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
