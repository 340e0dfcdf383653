#include "uavair/env.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace uavair {

std::vector<std::string> validate(const RewardConfig& c) {
  std::vector<std::string> errs;
  if (!(c.lambda1 >= 0.0) || !(c.lambda2 >= 0.0)) errs.push_back("reward weights must be non-negative");
  if (!(c.arrival_bonus >= 0.0)) errs.push_back("arrival_bonus must be non-negative");
  if (!(c.rate_scale > 0.0)) errs.push_back("rate_scale must be positive");
  return errs;
}

DecodedAction decode_action(const Eigen::VectorXd& raw, double max_step) {
  if (raw.size() < 3) throw std::invalid_argument("action needs a move and at least one user entry");
  DecodedAction d;
  d.move = Point2{raw(0) * max_step, raw(1) * max_step};
  const double len = d.move.norm();
  if (len > max_step) d.move = d.move * (max_step / len);
  Eigen::Index best = 2;
  for (Eigen::Index i = 3; i < raw.size(); ++i)
    if (raw(i) > raw(best)) best = i;
  d.user = static_cast<std::size_t>(best - 2);
  return d;
}

int fairness_floor(int num_slots, int num_users) { return num_slots / num_users; }

bool fairness_attainable(const std::vector<int>& counts, int slot, int num_slots) {
  const int floor = fairness_floor(num_slots, static_cast<int>(counts.size()));
  long deficit = 0;
  for (int c : counts) deficit += std::max(0, floor - c);
  return deficit <= num_slots - slot;
}

bool fairness_met(const std::vector<int>& counts, int num_slots) {
  const int floor = fairness_floor(num_slots, static_cast<int>(counts.size()));
  return std::all_of(counts.begin(), counts.end(), [floor](int c) { return c >= floor; });
}

double scheduling_reward(const SlotSolution& sol, const std::vector<int>& counts, int slot, int num_slots) {
  if (!sol.feasible) return 0.0;
  if (!fairness_attainable(counts, slot, num_slots)) return 0.0;
  return sol.rate;
}

double trajectory_reward(const Point2& q, const Point2& dest, int slot, int num_slots, double max_step,
                         double arrival_bonus) {
  const double dist = (q - dest).norm();
  if (slot == num_slots && dist <= max_step) return arrival_bonus;
  return -static_cast<double>(slot) * dist;
}

Eigen::VectorXd build_state_vector(const MdpState& s, const ScenarioConfig& sc, const RewardConfig& rc,
                                   double gamma) {
  const auto m = static_cast<Eigen::Index>(s.sched_counts.size());
  Eigen::VectorXd v(m + 4);
  const double denom = rc.count_scale == CountScale::horizon ? sc.num_slots : std::max(s.slot, 1);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = s.sched_counts[static_cast<std::size_t>(i)] / denom;
  v(m) = s.last_rate / rc.rate_scale;
  v(m + 1) = s.last_mse / gamma;
  v(m + 2) = s.uav_xy.x / sc.area_side;
  v(m + 3) = s.uav_xy.y / sc.area_side;
  return v;
}

Point2 clamp_to_area(const Point2& p, double area_side) {
  return Point2{std::clamp(p.x, 0.0, area_side), std::clamp(p.y, 0.0, area_side)};
}

Environment::Environment(Scenario scenario, ChannelParams channel, PowerLimits limits, SolverConfig solver,
                         RewardConfig reward, PowerPins pins)
    : scenario_(std::move(scenario)), channel_(channel), limits_(limits), solver_(solver), reward_(reward),
      pins_(std::move(pins)) {
  std::vector<std::string> errs = validate(scenario_);
  for (auto& e : validate(channel_)) errs.push_back(std::move(e));
  for (auto& e : validate(solver_)) errs.push_back(std::move(e));
  for (auto& e : validate(reward_)) errs.push_back(std::move(e));
  if (!errs.empty()) {
    std::string msg = "invalid environment:";
    for (const auto& e : errs) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }
  reset();
}

const MdpState& Environment::reset() {
  state_ = MdpState{};
  state_.sched_counts.assign(scenario_.users.size(), 0);
  state_.uav_xy = scenario_.config.start;
  return state_;
}

void Environment::place(const Point2& xy) { state_.uav_xy = clamp_to_area(xy, scenario_.config.area_side); }

std::size_t Environment::state_dim() const { return scenario_.users.size() + 4; }
std::size_t Environment::action_dim() const { return scenario_.users.size() + 2; }

Eigen::VectorXd Environment::observation() const {
  return build_state_vector(state_, scenario_.config, reward_, solver_.gamma);
}

StepOutcome Environment::step(const Eigen::VectorXd& raw_action) {
  if (raw_action.size() != static_cast<Eigen::Index>(action_dim()))
    throw std::invalid_argument("action length " + std::to_string(raw_action.size()) + ", expected " +
                                std::to_string(action_dim()));
  const double step_len = scenario_.config.max_step();
  const auto d = decode_action(raw_action, step_len);
  const Point2 raw_move{raw_action(0) * step_len, raw_action(1) * step_len};
  const Point2 next = clamp_to_area(state_.uav_xy + d.move, scenario_.config.area_side);
  return advance(raw_move, d.move, next, d.user);
}

StepOutcome Environment::step_to(const Point2& target, std::size_t user) {
  const double step_len = scenario_.config.max_step();
  const Point2 raw_move = target - state_.uav_xy;
  const double len = raw_move.norm();
  if (len <= step_len) return advance(raw_move, raw_move, clamp_to_area(target, scenario_.config.area_side), user);
  const Point2 move = raw_move * (step_len / len);
  return advance(raw_move, move, clamp_to_area(state_.uav_xy + move, scenario_.config.area_side), user);
}

StepOutcome Environment::advance(const Point2& raw_move, const Point2& move, const Point2& next_xy,
                                 std::size_t user) {
  const auto& sc = scenario_.config;
  if (done()) throw std::logic_error("step after the final slot");
  if (user >= scenario_.users.size()) throw std::out_of_range("scheduled user out of range");

  const int slot = state_.slot + 1;
  SlotSolution sol;
  try {
    const auto chan = channel_snapshot(scenario_, Point3::aerial(next_xy, sc.uav_altitude), channel_);
    sol = solve_slot(chan, user, limits_, solver_, pins_);
  } catch (const std::exception& e) {
    throw std::runtime_error("slot " + std::to_string(slot) + ": " + e.what());
  }

  StepOutcome out;
  MdpState& ns = out.next_state;
  ns = state_;
  ns.sched_counts[user] += 1;
  ns.slot = slot;
  ns.uav_xy = next_xy;
  ns.last_rate = sol.feasible ? sol.rate : 0.0;
  ns.last_mse = sol.mse;

  StepInfo& info = out.info;
  info.rate = sol.rate;
  info.mse = sol.mse;
  info.feasible = sol.feasible;
  info.fairness_attainable = fairness_attainable(ns.sched_counts, slot, sc.num_slots);
  info.scheduled = user;
  info.raw_move = raw_move;
  info.move = move;
  info.decision = sol.decision;
  info.r_c = scheduling_reward(sol, ns.sched_counts, slot, sc.num_slots);
  info.r_d = trajectory_reward(next_xy, sc.end, slot, sc.num_slots, sc.max_step(), reward_.arrival_bonus);

  out.reward = reward_.lambda1 * info.r_c + reward_.lambda2 * info.r_d;
  out.done = slot == sc.num_slots;
  state_ = ns;
  return out;
}

void accumulate(EpisodeSummary& sum, const StepOutcome& out) {
  sum.total_return += out.reward;
  if (out.info.feasible)
    sum.sum_rate += out.info.rate;
  else
    ++sum.mse_violations;
  ++sum.slots;
}

void finalize(EpisodeSummary& sum, const MdpState& s, const ScenarioConfig& sc) {
  sum.fairness = fairness_met(s.sched_counts, sc.num_slots);
  sum.arrived = (s.uav_xy - sc.end).norm() <= sc.max_step();
}

nlohmann::json trace_record(const StepOutcome& out) {
  const auto& i = out.info;
  return nlohmann::json{{"n", out.next_state.slot},
                        {"xy", {out.next_state.uav_xy.x, out.next_state.uav_xy.y}},
                        {"m", i.scheduled},
                        {"p", i.decision.user_power},
                        {"b", i.decision.sensor_coeffs},
                        {"eta", i.decision.eta},
                        {"rate", i.rate},
                        {"mse", i.mse},
                        {"feasible", i.feasible},
                        {"r_c", i.r_c},
                        {"r_d", i.r_d},
                        {"reward", out.reward}};
}

void write_trace_line(std::ostream& os, const StepOutcome& out) { os << trace_record(out).dump() << '\n'; }

void to_json(nlohmann::json& j, const RewardConfig& c) {
  j = nlohmann::json{{"lambda1", c.lambda1},
                     {"lambda2", c.lambda2},
                     {"arrival_bonus", c.arrival_bonus},
                     {"rate_scale", c.rate_scale},
                     {"count_scale", c.count_scale}};
}

void from_json(const nlohmann::json& j, RewardConfig& c) {
  RewardConfig d;
  c.lambda1 = j.value("lambda1", d.lambda1);
  c.lambda2 = j.value("lambda2", d.lambda2);
  c.arrival_bonus = j.value("arrival_bonus", d.arrival_bonus);
  c.rate_scale = j.value("rate_scale", d.rate_scale);
  c.count_scale = j.value("count_scale", d.count_scale);
}

}  // namespace uavair
