#include "uavair/harness.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uavair {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string metrics_header() { return "episode,return,sum_rate,mse_violations,fairness,arrived,status"; }

std::string metrics_row(int episode, const EpisodeSummary& s, bool aborted) {
  std::ostringstream os;
  os << episode << ',' << format_double(s.total_return) << ',' << format_double(s.sum_rate) << ','
     << s.mse_violations << ',' << (s.fairness ? 1 : 0) << ',' << (s.arrived ? 1 : 0) << ','
     << (aborted ? "aborted" : "ok");
  return os.str();
}

BaselineSetup baseline_setup(const RunConfig& cfg) {
  return BaselineSetup{cfg.channel, cfg.limits, cfg.solver, cfg.reward};
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

Eigen::VectorXd uniform_action(std::size_t dim, Rng& rng) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(dim));
  // stay strictly inside the open cube
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.uniform(-1.0, 1.0) * (1.0 - 1e-9);
  return a;
}

}  // namespace

TrainResult train(const RunConfig& cfg, const std::filesystem::path& out_dir, const ProgressFn& progress) {
  if (auto errs = validate(cfg); !errs.empty()) throw std::invalid_argument("invalid run config: " + errs.front());
  std::filesystem::create_directories(out_dir);

  Scenario scenario = generate_topology(cfg.scenario);
  Environment env(scenario, cfg.channel, cfg.limits, cfg.solver, cfg.reward);
  SacAgent agent(env.state_dim(), env.action_dim(), cfg.sac, splitmix64_mix(cfg.seed ^ fnv1a64("agent")));
  Rng explore = Rng::derive(cfg.seed, "explore");
  Rng learn = Rng::derive(cfg.seed, "learn");

  auto metrics = open_out(out_dir / "metrics.csv");
  auto timing = open_out(out_dir / "timing.csv");
  metrics << metrics_header() << '\n';
  timing << "episode,wall_seconds\n";

  std::vector<EpisodeSummary> history;
  long env_steps = 0;
  for (int ep = 1; ep <= cfg.episodes; ++ep) {
    const auto t0 = std::chrono::steady_clock::now();
    EpisodeSummary sum;
    env.reset();
    try {
      Eigen::VectorXd s = env.observation();
      while (!env.done()) {
        const Eigen::VectorXd a =
            env_steps < cfg.warmup_steps ? uniform_action(env.action_dim(), explore) : agent.act(s, explore);
        StepOutcome out;
        try {
          out = env.step(a);
        } catch (const std::exception& e) {
          throw std::runtime_error(std::string("environment: ") + e.what());
        }
        ++env_steps;
        accumulate(sum, out);
        Eigen::VectorXd s2 = env.observation();
        agent.remember(Transition{s, a, out.reward, s2, out.done});
        s = std::move(s2);
        if (cfg.sac.cadence == UpdateCadence::per_step && agent.ready()) agent.update(learn);
      }
      if (cfg.sac.cadence == UpdateCadence::per_episode && agent.ready())
        for (int k = 0; k < cfg.sac.updates_per_episode; ++k) agent.update(learn);
    } catch (const std::exception& e) {
      metrics << metrics_row(ep, sum, true) << '\n';
      metrics.flush();
      throw std::runtime_error("training aborted at episode " + std::to_string(ep) + ", slot " +
                               std::to_string(env.state().slot + 1) + ": " + e.what());
    }
    finalize(sum, env.state(), scenario.config);
    history.push_back(sum);
    metrics << metrics_row(ep, sum) << '\n';
    metrics.flush();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    timing << ep << ',' << format_double(dt.count()) << '\n';
    if (progress) progress(ep, sum);
  }

  save_checkpoint(out_dir / "checkpoint.json", cfg, scenario, agent, explore);
  return TrainResult{std::move(agent), std::move(scenario), std::move(history)};
}

void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg, const Scenario& scenario,
                     const SacAgent& agent, const Rng& rng) {
  nlohmann::json j{{"run_config", run_config_json(cfg)}, {"scenario", scenario}, {"agent", agent.checkpoint(rng)}};
  auto f = open_out(path);
  f << j.dump() << '\n';
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  nlohmann::json j;
  in >> j;
  return LoadedCheckpoint{load_run_config(j.at("run_config")), j.at("scenario").get<Scenario>(),
                          SacAgent::from_checkpoint(j.at("agent"))};
}

EvalReport summarize(std::vector<EpisodeSummary> episodes) {
  EvalReport r;
  r.episodes = std::move(episodes);
  if (r.episodes.empty()) return r;
  const double n = static_cast<double>(r.episodes.size());
  for (const auto& e : r.episodes) {
    r.mean_sum_rate += e.sum_rate / n;
    r.mean_return += e.total_return / n;
    r.arrival_pct += e.arrived ? 100.0 / n : 0.0;
    r.fairness_pct += e.fairness ? 100.0 / n : 0.0;
  }
  return r;
}

EvalReport evaluate(const SacAgent& agent, const Scenario& scenario, const RunConfig& cfg, int episodes,
                    std::ostream* trace) {
  Environment env(scenario, cfg.channel, cfg.limits, cfg.solver, cfg.reward);
  if (agent.state_dim() != env.state_dim() || agent.action_dim() != env.action_dim())
    throw std::invalid_argument("checkpoint expects " + std::to_string(agent.action_dim() - 2) +
                                " users, scenario has " + std::to_string(scenario.users.size()));
  std::vector<EpisodeSummary> out;
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset();
    EpisodeSummary sum;
    while (!env.done()) {
      const auto step = env.step(agent.act_greedy(env.observation()));
      accumulate(sum, step);
      if (trace) write_trace_line(*trace, step);
    }
    finalize(sum, env.state(), scenario.config);
    out.push_back(sum);
  }
  return summarize(std::move(out));
}

std::vector<SweepRow> sweep(const RunConfig& cfg, std::span<const double> gammas, const SweepOptions& opts) {
  if (gammas.size() < 2) throw std::invalid_argument("sweep needs at least two thresholds");
  const Scenario scenario = generate_topology(cfg.scenario);
  std::vector<SweepRow> rows;
  for (double g : gammas) {
    RunConfig c = cfg;
    c.solver.gamma = g;
    if (auto errs = validate(c); !errs.empty()) throw std::invalid_argument("gamma " + format_double(g) + ": " + errs.front());
    for (auto kind : opts.baselines)
      rows.push_back(SweepRow{g, to_string(kind), run_baseline(kind, scenario, baseline_setup(c)).sum_rate});
    if (opts.include_sac) {
      auto res = train(c, opts.out_dir / ("gamma_" + format_double(g)));
      const auto rep = evaluate(res.agent, res.scenario, c, std::max(1, c.eval_episodes));
      rows.push_back(SweepRow{g, "sac", rep.mean_sum_rate});
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "gamma,method,sum_rate\n";
  for (const auto& r : rows) os << format_double(r.gamma) << ',' << r.method << ',' << format_double(r.sum_rate) << '\n';
}

std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "gamma,method,sum_rate") throw std::invalid_argument("missing sweep header");
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw std::invalid_argument("bad sweep row: " + line);
    SweepRow r;
    r.method = line.substr(c1 + 1, c2 - c1 - 1);
    auto parse = [&line](std::size_t b, std::size_t e, double& v) {
      auto res = std::from_chars(line.data() + b, line.data() + e, v);
      if (res.ec != std::errc{} || res.ptr != line.data() + e) throw std::invalid_argument("bad number in: " + line);
    };
    parse(0, c1, r.gamma);
    parse(c2 + 1, line.size(), r.sum_rate);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace uavair
