#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace uavair {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

/// Multilayer perceptron: ReLU on every hidden layer, linear output.
/// Inputs and outputs are column-major batches (one column per sample).
struct NetParams {
  std::vector<std::size_t> layer_sizes;
  std::vector<DenseLayer> layers;

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;
};

/// Same shapes as NetParams; used for gradients and optimizer moments.
using NetTensors = std::vector<DenseLayer>;

NetTensors zeros_like(const NetParams& params);

/// Weights ~ U(-sqrt(6 / fan_in), sqrt(6 / fan_in)) drawn row-major, layer by
/// layer, from the "init" stream of `seed`; biases zero.
NetParams init_params(std::span<const std::size_t> layer_sizes, std::uint64_t seed);

Eigen::MatrixXd forward(const NetParams& params, const Eigen::MatrixXd& input);

/// Pre-activations of every layer, kept for a later backward pass.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] = input, back() = output
};

ForwardTrace forward_trace(const NetParams& params, const Eigen::MatrixXd& input);

struct NetGradients {
  NetTensors params;
  Eigen::MatrixXd input;
};

/// Exact reverse-mode gradient of sum over the batch of <upstream, output>.
NetGradients backward(const NetParams& params, const ForwardTrace& trace, const Eigen::MatrixXd& upstream);
NetGradients grad(const NetParams& params, const Eigen::MatrixXd& input, const Eigen::MatrixXd& upstream);

struct AdamState {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step_count = 0;
  NetTensors first_moment;
  NetTensors second_moment;
};

AdamState make_adam(const NetParams& params, double lr);

/// Bias-corrected Adam update of `params` in place. Throws std::runtime_error
/// naming the tensor when a gradient entry is not finite.
void adam_step(AdamState& opt, NetParams& params, const NetTensors& grads);

/// target <- tau * source + (1 - tau) * target, elementwise.
void soft_update(NetParams& target, const NetParams& source, double tau);

void to_json(nlohmann::json& j, const NetParams& p);
void from_json(const nlohmann::json& j, NetParams& p);
void to_json(nlohmann::json& j, const AdamState& s);
void from_json(const nlohmann::json& j, AdamState& s);

}  // namespace uavair
