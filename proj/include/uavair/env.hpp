#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "uavair/channel.hpp"
#include "uavair/inner_solver.hpp"
#include "uavair/phy.hpp"
#include "uavair/scenario.hpp"

namespace uavair {

/// How scheduling counts enter the state vector: divided by the slots elapsed
/// so far (frequencies) or by the horizon N, which keeps the slot index visible.
enum class CountScale { elapsed, horizon };

NLOHMANN_JSON_SERIALIZE_ENUM(CountScale, {
                                             {CountScale::elapsed, "elapsed"},
                                             {CountScale::horizon, "horizon"},
                                         })

struct RewardConfig {
  double lambda1 = 1.0;
  double lambda2 = 0.01;
  double arrival_bonus = 100.0;
  double rate_scale = 1.0;  // state normalization of the previous-slot rate
  CountScale count_scale = CountScale::elapsed;
};

std::vector<std::string> validate(const RewardConfig& cfg);

struct MdpState {
  std::vector<int> sched_counts;
  double last_rate = 0.0;
  double last_mse = 0.0;
  Point2 uav_xy;
  int slot = 0;  // completed slots

  bool operator==(const MdpState&) const = default;
};

struct StepInfo {
  double rate = 0.0;
  double mse = 0.0;
  bool feasible = false;
  bool fairness_attainable = false;
  std::size_t scheduled = 0;
  Point2 raw_move;
  Point2 move;
  SlotDecision decision;
  double r_c = 0.0;
  double r_d = 0.0;
};

struct StepOutcome {
  MdpState next_state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct DecodedAction {
  Point2 move;
  std::size_t user = 0;
};

/// First two entries scale to a displacement (projected onto the disk of
/// radius max_step); the remaining M entries pick the user by argmax, ties to
/// the lowest index.
DecodedAction decode_action(const Eigen::VectorXd& raw, double max_step);

/// Minimum number of slots per user over the mission.
int fairness_floor(int num_slots, int num_users);
/// Total remaining deficit fits in the remaining slots.
bool fairness_attainable(const std::vector<int>& counts, int slot, int num_slots);
bool fairness_met(const std::vector<int>& counts, int num_slots);

/// Slot rate when the slot met its constraints and fairness can still be
/// reached; zero otherwise. `counts` include this slot, `slot` is 1-based.
double scheduling_reward(const SlotSolution& sol, const std::vector<int>& counts, int slot, int num_slots);

/// Arrival bonus at the last slot within one step of the destination,
/// otherwise -slot * distance.
double trajectory_reward(const Point2& q, const Point2& dest, int slot, int num_slots, double max_step,
                         double arrival_bonus);

/// [counts / max(n, 1) (or / N); R / rate_scale; MSE / gamma; x / L; y / L]
Eigen::VectorXd build_state_vector(const MdpState& s, const ScenarioConfig& sc, const RewardConfig& rc, double gamma);

Point2 clamp_to_area(const Point2& p, double area_side);

/// Episodic MDP over one scenario. Single owner, not thread-safe.
class Environment {
 public:
  Environment(Scenario scenario, ChannelParams channel, PowerLimits limits, SolverConfig solver, RewardConfig reward,
              PowerPins pins = {});

  const MdpState& reset();
  /// Repositions the UAV without a move (used by the fixed-position scheme).
  void place(const Point2& xy);

  StepOutcome step(const Eigen::VectorXd& raw_action);
  /// Heads for `target` and schedules `user`. A reachable target is hit exactly;
  /// otherwise the move is projected like a decoded action.
  StepOutcome step_to(const Point2& target, std::size_t user);

  const MdpState& state() const { return state_; }
  Eigen::VectorXd observation() const;
  std::size_t state_dim() const;
  std::size_t action_dim() const;
  bool done() const { return state_.slot >= scenario_.config.num_slots; }

  const Scenario& scenario() const { return scenario_; }
  const SolverConfig& solver() const { return solver_; }
  const RewardConfig& reward_config() const { return reward_; }

 private:
  StepOutcome advance(const Point2& raw_move, const Point2& move, const Point2& next_xy, std::size_t user);

  Scenario scenario_;
  ChannelParams channel_;
  PowerLimits limits_;
  SolverConfig solver_;
  RewardConfig reward_;
  PowerPins pins_;
  MdpState state_;
};

/// Per-episode aggregate.
struct EpisodeSummary {
  double total_return = 0.0;
  double sum_rate = 0.0;  // feasible slots only
  int mse_violations = 0;
  bool fairness = false;
  bool arrived = false;
  int slots = 0;
};

void accumulate(EpisodeSummary& sum, const StepOutcome& out);
/// Sets the fairness and arrival flags from the final state.
void finalize(EpisodeSummary& sum, const MdpState& final_state, const ScenarioConfig& sc);

nlohmann::json trace_record(const StepOutcome& out);
void write_trace_line(std::ostream& os, const StepOutcome& out);

void to_json(nlohmann::json& j, const RewardConfig& c);
void from_json(const nlohmann::json& j, RewardConfig& c);

}  // namespace uavair
