#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "uavair/approximator.hpp"
#include "uavair/rng.hpp"

namespace uavair {

enum class UpdateCadence { per_step, per_episode };

NLOHMANN_JSON_SERIALIZE_ENUM(UpdateCadence, {
                                                {UpdateCadence::per_step, "per_step"},
                                                {UpdateCadence::per_episode, "per_episode"},
                                            })

struct SacConfig {
  double gamma = 0.90;
  double tau = 0.005;
  double lr_q = 1e-4;
  double lr_pi = 1e-4;
  double lr_beta = 1e-4;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 100000;
  std::optional<double> target_entropy;  // unset: -(action dimension)
  double beta_init = 0.2;
  std::vector<std::size_t> hidden = {128, 128};
  UpdateCadence cadence = UpdateCadence::per_step;
  int updates_per_episode = 1;  // used with the per_episode cadence
  double log_std_min = -20.0;
  double log_std_max = 2.0;
};

std::vector<std::string> validate(const SacConfig& cfg);

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

/// Columns are samples.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd dones;  // 1.0 for terminal transitions

  Eigen::Index size() const { return states.cols(); }
};

/// Fixed-capacity FIFO store; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  /// Throws std::logic_error when fewer than `batch_size` transitions are stored.
  Batch sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> items_;
};

Batch make_batch(const std::vector<Transition>& transitions);

struct PolicyOutput {
  Eigen::VectorXd mean;
  Eigen::VectorXd log_std;  // clamped
  Eigen::VectorXd action;   // tanh-squashed, in (-1, 1)
  double log_prob = 0.0;
};

/// Squashing guard inside log(1 - a^2 + guard).
inline constexpr double kSquashGuard = 1e-6;

/// a = tanh(mean + exp(log_std) * noise) with the change-of-variables log-density.
PolicyOutput policy_sample(const NetParams& policy, const Eigen::VectorXd& state, const Eigen::VectorXd& noise,
                           const SacConfig& cfg);

/// Batched policy evaluation with everything the actor gradient needs.
struct PolicyBatch {
  ForwardTrace trace;
  Eigen::MatrixXd mean;
  Eigen::MatrixXd log_std;        // clamped
  Eigen::MatrixXd log_std_inside; // 1 where the raw log-std was inside the clamp
  Eigen::MatrixXd noise;
  Eigen::MatrixXd action;
  Eigen::VectorXd log_prob;
};

PolicyBatch policy_sample_batch(const NetParams& policy, const Eigen::MatrixXd& states, const Eigen::MatrixXd& noise,
                                const SacConfig& cfg);

Eigen::MatrixXd q_inputs(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions);

/// y = r + (1 - done) gamma (min_i Q'_i(s', a') - beta log pi(a'|s')), a' drawn with `next_noise`.
Eigen::VectorXd q_target(const Batch& batch, const NetParams& target1, const NetParams& target2,
                         const NetParams& policy, double beta, const Eigen::MatrixXd& next_noise, const SacConfig& cfg);

struct LossAndGrad {
  double loss = 0.0;
  NetTensors grads;
};

/// 0.5 * mean (Q(s, a) - y)^2 and its gradient; y is a constant.
LossAndGrad critic_loss(const NetParams& critic, const Batch& batch, const Eigen::VectorXd& targets);
double critic_update(NetParams& critic, AdamState& opt, const Batch& batch, const Eigen::VectorXd& targets);

struct ActorLoss {
  double loss = 0.0;
  NetTensors grads;
  Eigen::VectorXd log_probs;
};

/// mean(beta log pi(f(noise; s)|s) - min_i Q_i(s, f(noise; s))); gradients reach
/// the policy through the reparameterized action, critics stay frozen.
ActorLoss actor_loss(const NetParams& policy, const Eigen::MatrixXd& states, const NetParams& critic1,
                     const NetParams& critic2, double beta, const Eigen::MatrixXd& noise, const SacConfig& cfg);
ActorLoss actor_update(NetParams& policy, AdamState& opt, const Eigen::MatrixXd& states, const NetParams& critic1,
                       const NetParams& critic2, double beta, const Eigen::MatrixXd& noise, const SacConfig& cfg);

/// mean(-beta (log pi + target_entropy)) and its derivative in log(beta).
double temperature_loss(double beta, const Eigen::VectorXd& log_probs, double target_entropy);
double temperature_grad(double beta, const Eigen::VectorXd& log_probs, double target_entropy);
/// One gradient step on log(beta); returns the new beta (always positive).
double temperature_update(double beta, const Eigen::VectorXd& log_probs, double target_entropy, double lr);

struct UpdateStats {
  double critic1_loss = 0.0;
  double critic2_loss = 0.0;
  double actor_loss = 0.0;
  double beta = 0.0;
  double mean_log_prob = 0.0;
};

/// Policy, twin critics, their targets, optimizers, temperature and replay memory.
class SacAgent {
 public:
  SacAgent(std::size_t state_dim, std::size_t action_dim, SacConfig cfg, std::uint64_t seed);

  Eigen::VectorXd act(const Eigen::VectorXd& state, Rng& rng) const;
  Eigen::VectorXd act_greedy(const Eigen::VectorXd& state) const;

  void remember(Transition t) { buffer_.push(std::move(t)); }
  bool ready() const { return buffer_.size() >= cfg_.batch_size; }
  /// One round of critic, actor, temperature and target updates. Throws
  /// std::runtime_error if any loss is not finite.
  UpdateStats update(Rng& rng);

  double beta() const { return beta_; }
  double target_entropy() const;
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }
  const SacConfig& config() const { return cfg_; }
  const NetParams& policy() const { return policy_; }
  const NetParams& critic(int i) const { return i == 0 ? q1_ : q2_; }
  const NetParams& target(int i) const { return i == 0 ? q1_target_ : q2_target_; }
  const ReplayBuffer& buffer() const { return buffer_; }

  nlohmann::json checkpoint(const Rng& rng_state) const;
  static SacAgent from_checkpoint(const nlohmann::json& j);

 private:
  std::size_t state_dim_;
  std::size_t action_dim_;
  SacConfig cfg_;
  NetParams policy_, q1_, q2_, q1_target_, q2_target_;
  AdamState policy_opt_, q1_opt_, q2_opt_;
  double beta_;
  ReplayBuffer buffer_;
};

void to_json(nlohmann::json& j, const SacConfig& c);
void from_json(const nlohmann::json& j, SacConfig& c);

}  // namespace uavair
