#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uavair/baselines.hpp"
#include "uavair/config.hpp"
#include "uavair/env.hpp"
#include "uavair/sac.hpp"

namespace uavair {

/// Shortest text that parses back to the same double.
std::string format_double(double v);

std::string metrics_header();
std::string metrics_row(int episode, const EpisodeSummary& s, bool aborted = false);

struct TrainResult {
  SacAgent agent;
  Scenario scenario;
  std::vector<EpisodeSummary> episodes;
};

using ProgressFn = std::function<void(int episode, const EpisodeSummary&)>;

/// Runs the full training loop on the scenario generated from `cfg`.
/// Writes metrics.csv (row by row), timing.csv and checkpoint.json into
/// `out_dir`. Errors are rethrown with episode and slot context after the
/// partial metrics are flushed.
TrainResult train(const RunConfig& cfg, const std::filesystem::path& out_dir, const ProgressFn& progress = {});

struct LoadedCheckpoint {
  RunConfig config;
  Scenario scenario;
  SacAgent agent;
};

void save_checkpoint(const std::filesystem::path& path, const RunConfig& cfg, const Scenario& scenario,
                     const SacAgent& agent, const Rng& rng);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

struct EvalReport {
  std::vector<EpisodeSummary> episodes;
  double mean_sum_rate = 0.0;
  double mean_return = 0.0;
  double arrival_pct = 0.0;
  double fairness_pct = 0.0;
};

/// Greedy rollouts (action = tanh(mean)). Throws std::invalid_argument when
/// the agent's dimensions do not fit the scenario.
EvalReport evaluate(const SacAgent& agent, const Scenario& scenario, const RunConfig& cfg, int episodes,
                    std::ostream* trace = nullptr);

EvalReport summarize(std::vector<EpisodeSummary> episodes);

struct SweepRow {
  double gamma = 0.0;
  std::string method;
  double sum_rate = 0.0;

  bool operator==(const SweepRow&) const = default;
};

struct SweepOptions {
  std::vector<BaselineKind> baselines{std::begin(kAllBaselines), std::end(kAllBaselines)};
  bool include_sac = false;  // trains one agent per threshold under out_dir
  std::filesystem::path out_dir = "sweep";
};

/// Requires at least two thresholds.
std::vector<SweepRow> sweep(const RunConfig& cfg, std::span<const double> gammas, const SweepOptions& opts);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& is);

BaselineSetup baseline_setup(const RunConfig& cfg);

}  // namespace uavair
