#include "uavair/sac.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uavair {

namespace {

std::vector<std::size_t> net_sizes(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  return sizes;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
  return m;
}

// tanh rounds to +-1 once |u| passes ~19; keep actions strictly inside the cube.
Eigen::MatrixXd squash(const Eigen::MatrixXd& u) {
  const double edge = std::nextafter(1.0, 0.0);
  return u.array().tanh().cwiseMax(-edge).cwiseMin(edge);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite ") + what);
}

}  // namespace

std::vector<std::string> validate(const SacConfig& c) {
  std::vector<std::string> errs;
  if (!(c.gamma >= 0.0 && c.gamma < 1.0)) errs.push_back("gamma must lie in [0, 1)");
  if (!(c.tau > 0.0 && c.tau <= 1.0)) errs.push_back("tau must lie in (0, 1]");
  if (!(c.lr_q > 0.0) || !(c.lr_pi > 0.0) || !(c.lr_beta > 0.0)) errs.push_back("learning rates must be positive");
  if (c.batch_size == 0) errs.push_back("batch_size must be positive");
  if (c.buffer_capacity < c.batch_size) errs.push_back("buffer_capacity must be at least batch_size");
  if (!(c.beta_init > 0.0)) errs.push_back("beta_init must be positive");
  if (c.updates_per_episode < 1) errs.push_back("updates_per_episode must be at least 1");
  if (!(c.log_std_min < c.log_std_max)) errs.push_back("log_std_min must be below log_std_max");
  for (auto h : c.hidden)
    if (h == 0) errs.push_back("hidden layer sizes must be positive");
  return errs;
}

// ---- replay ----

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay index out of range");
  return items_[(cursor_ + i) % items_.size()];
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (items_.size() < batch_size)
    throw std::logic_error("replay buffer holds " + std::to_string(items_.size()) + " transitions, batch needs " +
                           std::to_string(batch_size));
  std::vector<Transition> picked;
  picked.reserve(batch_size);
  for (std::size_t k = 0; k < batch_size; ++k) picked.push_back(items_[rng.index(items_.size())]);
  return make_batch(picked);
}

Batch make_batch(const std::vector<Transition>& ts) {
  if (ts.empty()) throw std::invalid_argument("empty batch");
  const auto n = static_cast<Eigen::Index>(ts.size());
  const auto sd = ts.front().state.size();
  const auto ad = ts.front().action.size();
  Batch b;
  b.states.resize(sd, n);
  b.actions.resize(ad, n);
  b.next_states.resize(sd, n);
  b.rewards.resize(n);
  b.dones.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = ts[static_cast<std::size_t>(i)];
    if (t.state.size() != sd || t.next_state.size() != sd || t.action.size() != ad)
      throw std::invalid_argument("transition dimensions differ within a batch");
    b.states.col(i) = t.state;
    b.actions.col(i) = t.action;
    b.next_states.col(i) = t.next_state;
    b.rewards(i) = t.reward;
    b.dones(i) = t.done ? 1.0 : 0.0;
  }
  return b;
}

// ---- policy ----

PolicyBatch policy_sample_batch(const NetParams& policy, const Eigen::MatrixXd& states, const Eigen::MatrixXd& noise,
                                const SacConfig& cfg) {
  const auto a_dim = static_cast<Eigen::Index>(policy.output_size() / 2);
  if (policy.output_size() % 2 != 0) throw std::invalid_argument("policy output must hold mean and log-std");
  if (noise.rows() != a_dim || noise.cols() != states.cols())
    throw std::invalid_argument("noise shape does not match the policy");

  PolicyBatch pb;
  pb.trace = forward_trace(policy, states);
  const Eigen::MatrixXd& out = pb.trace.activations.back();
  pb.mean = out.topRows(a_dim);
  const Eigen::MatrixXd raw = out.bottomRows(a_dim);
  pb.log_std = raw.cwiseMax(cfg.log_std_min).cwiseMin(cfg.log_std_max);
  pb.log_std_inside = ((raw.array() > cfg.log_std_min) && (raw.array() < cfg.log_std_max)).cast<double>();
  pb.noise = noise;
  const Eigen::MatrixXd pre = pb.mean.array() + pb.log_std.array().exp() * noise.array();
  pb.action = squash(pre);

  const double half_log_2pi = 0.5 * std::log(2.0 * std::numbers::pi);
  const Eigen::ArrayXXd squash = (1.0 - pb.action.array().square() + kSquashGuard).log();
  const Eigen::ArrayXXd per_dim = -0.5 * noise.array().square() - pb.log_std.array() - half_log_2pi - squash;
  pb.log_prob = per_dim.colwise().sum().transpose();
  return pb;
}

PolicyOutput policy_sample(const NetParams& policy, const Eigen::VectorXd& state, const Eigen::VectorXd& noise,
                           const SacConfig& cfg) {
  auto pb = policy_sample_batch(policy, state, noise, cfg);
  return PolicyOutput{pb.mean.col(0), pb.log_std.col(0), pb.action.col(0), pb.log_prob(0)};
}

Eigen::MatrixXd q_inputs(const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions) {
  if (states.cols() != actions.cols()) throw std::invalid_argument("state and action batch sizes differ");
  Eigen::MatrixXd in(states.rows() + actions.rows(), states.cols());
  in.topRows(states.rows()) = states;
  in.bottomRows(actions.rows()) = actions;
  return in;
}

// ---- critic ----

Eigen::VectorXd q_target(const Batch& batch, const NetParams& target1, const NetParams& target2,
                         const NetParams& policy, double beta, const Eigen::MatrixXd& next_noise,
                         const SacConfig& cfg) {
  const auto next = policy_sample_batch(policy, batch.next_states, next_noise, cfg);
  const Eigen::MatrixXd in = q_inputs(batch.next_states, next.action);
  const Eigen::VectorXd q1 = forward(target1, in).row(0).transpose();
  const Eigen::VectorXd q2 = forward(target2, in).row(0).transpose();
  const Eigen::ArrayXd soft = q1.cwiseMin(q2).array() - beta * next.log_prob.array();
  return (batch.rewards.array() + (1.0 - batch.dones.array()) * cfg.gamma * soft).matrix();
}

LossAndGrad critic_loss(const NetParams& critic, const Batch& batch, const Eigen::VectorXd& targets) {
  if (targets.size() != batch.size()) throw std::invalid_argument("target count does not match the batch");
  const auto n = static_cast<double>(batch.size());
  const auto trace = forward_trace(critic, q_inputs(batch.states, batch.actions));
  const Eigen::RowVectorXd err = trace.activations.back().row(0) - targets.transpose();
  LossAndGrad out;
  out.loss = 0.5 * err.squaredNorm() / n;
  out.grads = backward(critic, trace, err / n).params;
  return out;
}

double critic_update(NetParams& critic, AdamState& opt, const Batch& batch, const Eigen::VectorXd& targets) {
  auto lg = critic_loss(critic, batch, targets);
  require_finite(lg.loss, "critic loss");
  adam_step(opt, critic, lg.grads);
  return lg.loss;
}

// ---- actor ----

ActorLoss actor_loss(const NetParams& policy, const Eigen::MatrixXd& states, const NetParams& critic1,
                     const NetParams& critic2, double beta, const Eigen::MatrixXd& noise, const SacConfig& cfg) {
  const auto pb = policy_sample_batch(policy, states, noise, cfg);
  const auto n = states.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto a_dim = pb.action.rows();

  const Eigen::MatrixXd in = q_inputs(states, pb.action);
  const auto t1 = forward_trace(critic1, in);
  const auto t2 = forward_trace(critic2, in);
  const Eigen::RowVectorXd q1 = t1.activations.back().row(0);
  const Eigen::RowVectorXd q2 = t2.activations.back().row(0);

  Eigen::RowVectorXd up1 = Eigen::RowVectorXd::Zero(n);
  Eigen::RowVectorXd up2 = Eigen::RowVectorXd::Zero(n);
  double q_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (q1(i) <= q2(i)) {
      q_sum += q1(i);
      up1(i) = -inv_n;
    } else {
      q_sum += q2(i);
      up2(i) = -inv_n;
    }
  }

  ActorLoss out;
  out.log_probs = pb.log_prob;
  out.loss = beta * pb.log_prob.mean() - q_sum * inv_n;

  // dL/da from the critic term
  const Eigen::MatrixXd d_action = backward(critic1, t1, up1).input.bottomRows(a_dim) +
                                   backward(critic2, t2, up2).input.bottomRows(a_dim);

  const Eigen::ArrayXXd a = pb.action.array();
  const Eigen::ArrayXXd one_minus_a2 = 1.0 - a.square();
  const double w = beta * inv_n;
  // pre-squash gradient: critic path plus the log-det correction of the tanh
  const Eigen::ArrayXXd d_pre =
      d_action.array() * one_minus_a2 + w * 2.0 * a * one_minus_a2 / (one_minus_a2 + kSquashGuard);
  const Eigen::ArrayXXd sigma = pb.log_std.array().exp();
  const Eigen::ArrayXXd d_log_std = (d_pre * sigma * pb.noise.array() - w) * pb.log_std_inside.array();

  Eigen::MatrixXd upstream(2 * a_dim, n);
  upstream.topRows(a_dim) = d_pre.matrix();
  upstream.bottomRows(a_dim) = d_log_std.matrix();
  out.grads = backward(policy, pb.trace, upstream).params;
  return out;
}

ActorLoss actor_update(NetParams& policy, AdamState& opt, const Eigen::MatrixXd& states, const NetParams& critic1,
                       const NetParams& critic2, double beta, const Eigen::MatrixXd& noise, const SacConfig& cfg) {
  auto al = actor_loss(policy, states, critic1, critic2, beta, noise, cfg);
  require_finite(al.loss, "actor loss");
  adam_step(opt, policy, al.grads);
  return al;
}

// ---- temperature ----

double temperature_loss(double beta, const Eigen::VectorXd& log_probs, double target_entropy) {
  return -beta * (log_probs.array() + target_entropy).mean();
}

double temperature_grad(double beta, const Eigen::VectorXd& log_probs, double target_entropy) {
  // d/d(log beta) of the loss above
  return -beta * (log_probs.array() + target_entropy).mean();
}

double temperature_update(double beta, const Eigen::VectorXd& log_probs, double target_entropy, double lr) {
  if (!(beta > 0.0)) throw std::domain_error("temperature must be positive");
  const double g = temperature_grad(beta, log_probs, target_entropy);
  require_finite(g, "temperature gradient");
  return std::exp(std::log(beta) - lr * g);
}

// ---- agent ----

SacAgent::SacAgent(std::size_t state_dim, std::size_t action_dim, SacConfig cfg, std::uint64_t seed)
    : state_dim_(state_dim), action_dim_(action_dim), cfg_(std::move(cfg)), beta_(cfg_.beta_init),
      buffer_(cfg_.buffer_capacity) {
  if (auto errs = validate(cfg_); !errs.empty()) throw std::invalid_argument("sac config: " + errs.front());
  if (state_dim == 0 || action_dim == 0) throw std::invalid_argument("state and action dimensions must be positive");
  const auto pi_sizes = net_sizes(state_dim, cfg_.hidden, 2 * action_dim);
  const auto q_sizes = net_sizes(state_dim + action_dim, cfg_.hidden, 1);
  policy_ = init_params(pi_sizes, splitmix64_mix(seed ^ fnv1a64("policy")));
  q1_ = init_params(q_sizes, splitmix64_mix(seed ^ fnv1a64("q1")));
  q2_ = init_params(q_sizes, splitmix64_mix(seed ^ fnv1a64("q2")));
  q1_target_ = q1_;
  q2_target_ = q2_;
  policy_opt_ = make_adam(policy_, cfg_.lr_pi);
  q1_opt_ = make_adam(q1_, cfg_.lr_q);
  q2_opt_ = make_adam(q2_, cfg_.lr_q);
}

double SacAgent::target_entropy() const {
  return cfg_.target_entropy.value_or(-static_cast<double>(action_dim_));
}

Eigen::VectorXd SacAgent::act(const Eigen::VectorXd& state, Rng& rng) const {
  Eigen::VectorXd noise(static_cast<Eigen::Index>(action_dim_));
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = rng.normal();
  return policy_sample(policy_, state, noise, cfg_).action;
}

Eigen::VectorXd SacAgent::act_greedy(const Eigen::VectorXd& state) const {
  const Eigen::VectorXd out = forward(policy_, state);
  return squash(out.head(static_cast<Eigen::Index>(action_dim_)));
}

UpdateStats SacAgent::update(Rng& rng) {
  const Batch batch = buffer_.sample(cfg_.batch_size, rng);
  const auto n = batch.size();
  const auto a_dim = static_cast<Eigen::Index>(action_dim_);

  const Eigen::MatrixXd next_noise = gaussian_matrix(a_dim, n, rng);
  const Eigen::VectorXd y = q_target(batch, q1_target_, q2_target_, policy_, beta_, next_noise, cfg_);

  UpdateStats st;
  st.critic1_loss = critic_update(q1_, q1_opt_, batch, y);
  st.critic2_loss = critic_update(q2_, q2_opt_, batch, y);

  const Eigen::MatrixXd noise = gaussian_matrix(a_dim, n, rng);
  const auto al = actor_update(policy_, policy_opt_, batch.states, q1_, q2_, beta_, noise, cfg_);
  st.actor_loss = al.loss;
  st.mean_log_prob = al.log_probs.mean();

  beta_ = temperature_update(beta_, al.log_probs, target_entropy(), cfg_.lr_beta);
  st.beta = beta_;

  soft_update(q1_target_, q1_, cfg_.tau);
  soft_update(q2_target_, q2_, cfg_.tau);
  return st;
}

nlohmann::json SacAgent::checkpoint(const Rng& rng_state) const {
  return nlohmann::json{
      {"state_dim", state_dim_},
      {"action_dim", action_dim_},
      {"config", cfg_},
      {"beta", beta_},
      {"policy", policy_},
      {"q1", q1_},
      {"q2", q2_},
      {"q1_target", q1_target_},
      {"q2_target", q2_target_},
      {"policy_opt", policy_opt_},
      {"q1_opt", q1_opt_},
      {"q2_opt", q2_opt_},
      {"rng", {{"key", rng_state.key()}, {"counter", rng_state.counter()}}},
  };
}

SacAgent SacAgent::from_checkpoint(const nlohmann::json& j) {
  SacAgent agent(j.at("state_dim").get<std::size_t>(), j.at("action_dim").get<std::size_t>(),
                 j.at("config").get<SacConfig>(), 0);
  agent.beta_ = j.at("beta").get<double>();
  agent.policy_ = j.at("policy").get<NetParams>();
  agent.q1_ = j.at("q1").get<NetParams>();
  agent.q2_ = j.at("q2").get<NetParams>();
  agent.q1_target_ = j.at("q1_target").get<NetParams>();
  agent.q2_target_ = j.at("q2_target").get<NetParams>();
  agent.policy_opt_ = j.at("policy_opt").get<AdamState>();
  agent.q1_opt_ = j.at("q1_opt").get<AdamState>();
  agent.q2_opt_ = j.at("q2_opt").get<AdamState>();
  if (agent.policy_.input_size() != agent.state_dim_ || agent.policy_.output_size() != 2 * agent.action_dim_)
    throw std::invalid_argument("checkpoint policy shape does not match its dimensions");
  return agent;
}

void to_json(nlohmann::json& j, const SacConfig& c) {
  j = nlohmann::json{{"gamma", c.gamma},
                     {"tau", c.tau},
                     {"lr_q", c.lr_q},
                     {"lr_pi", c.lr_pi},
                     {"lr_beta", c.lr_beta},
                     {"batch_size", c.batch_size},
                     {"buffer_capacity", c.buffer_capacity},
                     {"beta_init", c.beta_init},
                     {"hidden", c.hidden},
                     {"cadence", c.cadence},
                     {"updates_per_episode", c.updates_per_episode},
                     {"log_std_min", c.log_std_min},
                     {"log_std_max", c.log_std_max}};
  if (c.target_entropy) j["target_entropy"] = *c.target_entropy;
}

void from_json(const nlohmann::json& j, SacConfig& c) {
  SacConfig d;
  c.gamma = j.value("gamma", d.gamma);
  c.tau = j.value("tau", d.tau);
  c.lr_q = j.value("lr_q", d.lr_q);
  c.lr_pi = j.value("lr_pi", d.lr_pi);
  c.lr_beta = j.value("lr_beta", d.lr_beta);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.buffer_capacity = j.value("buffer_capacity", d.buffer_capacity);
  c.beta_init = j.value("beta_init", d.beta_init);
  c.hidden = j.value("hidden", d.hidden);
  c.cadence = j.value("cadence", d.cadence);
  c.updates_per_episode = j.value("updates_per_episode", d.updates_per_episode);
  c.log_std_min = j.value("log_std_min", d.log_std_min);
  c.log_std_max = j.value("log_std_max", d.log_std_max);
  c.target_entropy.reset();
  if (j.contains("target_entropy") && !j.at("target_entropy").is_null())
    c.target_entropy = j.at("target_entropy").get<double>();
}

}  // namespace uavair
