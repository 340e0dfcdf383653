#include "uavair/approximator.hpp"

#include <cmath>
#include <stdexcept>

#include "uavair/rng.hpp"

namespace uavair {

std::size_t NetParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

NetTensors zeros_like(const NetParams& params) {
  NetTensors out;
  out.reserve(params.layers.size());
  for (const auto& l : params.layers) {
    out.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()), Eigen::VectorXd::Zero(l.bias.size())});
  }
  return out;
}

NetParams init_params(std::span<const std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("init_params: need at least input and output sizes");
  for (std::size_t s : layer_sizes) {
    if (s == 0) throw std::invalid_argument("init_params: layer sizes must be positive");
  }
  Rng rng = Rng::derive(seed, "init");
  NetParams p;
  p.layer_sizes.assign(layer_sizes.begin(), layer_sizes.end());
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const auto fan_in = static_cast<Eigen::Index>(layer_sizes[i]);
    const auto fan_out = static_cast<Eigen::Index>(layer_sizes[i + 1]);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (Eigen::Index r = 0; r < fan_out; ++r) {
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.weight(r, c) = rng.uniform(-bound, bound);
    }
    p.layers.push_back(std::move(layer));
  }
  return p;
}

ForwardTrace forward_trace(const NetParams& params, const Eigen::MatrixXd& input) {
  if (input.rows() != static_cast<Eigen::Index>(params.input_size())) {
    throw std::invalid_argument("forward: input has " + std::to_string(input.rows()) + " rows, network expects " +
                                std::to_string(params.input_size()));
  }
  ForwardTrace t;
  t.activations.reserve(params.layers.size() + 1);
  t.activations.push_back(input);
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const auto& l = params.layers[i];
    Eigen::MatrixXd z = l.weight * t.activations.back();
    z.colwise() += l.bias;
    if (i + 1 < params.layers.size()) z = z.cwiseMax(0.0);
    t.activations.push_back(std::move(z));
  }
  return t;
}

Eigen::MatrixXd forward(const NetParams& params, const Eigen::MatrixXd& input) {
  return std::move(forward_trace(params, input).activations.back());
}

NetGradients backward(const NetParams& params, const ForwardTrace& trace, const Eigen::MatrixXd& upstream) {
  const auto& out = trace.activations.back();
  if (upstream.rows() != out.rows() || upstream.cols() != out.cols()) {
    throw std::invalid_argument("backward: upstream gradient shape does not match the output");
  }
  NetGradients g;
  g.params = zeros_like(params);
  Eigen::MatrixXd delta = upstream;
  for (std::size_t i = params.layers.size(); i-- > 0;) {
    if (i + 1 < params.layers.size()) {
      // ReLU: pass gradient where the activation is positive.
      delta = delta.cwiseProduct((trace.activations[i + 1].array() > 0.0).cast<double>().matrix());
    }
    g.params[i].weight.noalias() = delta * trace.activations[i].transpose();
    g.params[i].bias = delta.rowwise().sum();
    delta = params.layers[i].weight.transpose() * delta;
  }
  g.input = std::move(delta);
  return g;
}

NetGradients grad(const NetParams& params, const Eigen::MatrixXd& input, const Eigen::MatrixXd& upstream) {
  return backward(params, forward_trace(params, input), upstream);
}

AdamState make_adam(const NetParams& params, double lr) {
  AdamState s;
  s.lr = lr;
  s.first_moment = zeros_like(params);
  s.second_moment = zeros_like(params);
  return s;
}

void adam_step(AdamState& opt, NetParams& params, const NetTensors& grads) {
  if (grads.size() != params.layers.size() || opt.first_moment.size() != params.layers.size()) {
    throw std::invalid_argument("adam_step: shape mismatch");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!grads[i].weight.allFinite()) throw std::runtime_error("adam_step: non-finite gradient in layer " + std::to_string(i) + " weight");
    if (!grads[i].bias.allFinite()) throw std::runtime_error("adam_step: non-finite gradient in layer " + std::to_string(i) + " bias");
  }
  ++opt.step_count;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step_count));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step_count));
  auto update = [&](auto& param, auto& m, auto& v, const auto& gr) {
    m = opt.beta1 * m + (1.0 - opt.beta1) * gr;
    v = opt.beta2 * v + (1.0 - opt.beta2) * gr.cwiseProduct(gr);
    param.array() -= opt.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + opt.epsilon);
  };
  for (std::size_t i = 0; i < grads.size(); ++i) {
    update(params.layers[i].weight, opt.first_moment[i].weight, opt.second_moment[i].weight, grads[i].weight);
    update(params.layers[i].bias, opt.first_moment[i].bias, opt.second_moment[i].bias, grads[i].bias);
  }
}

void soft_update(NetParams& target, const NetParams& source, double tau) {
  if (target.layer_sizes != source.layer_sizes) throw std::invalid_argument("soft_update: shape mismatch");
  for (std::size_t i = 0; i < target.layers.size(); ++i) {
    target.layers[i].weight = tau * source.layers[i].weight + (1.0 - tau) * target.layers[i].weight;
    target.layers[i].bias = tau * source.layers[i].bias + (1.0 - tau) * target.layers[i].bias;
  }
}

namespace {

nlohmann::json tensors_to_json(const NetTensors& t) {
  auto arr = nlohmann::json::array();
  for (const auto& l : t) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(l.weight.size()));
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) w.push_back(l.weight(r, c));
    }
    std::vector<double> b(l.bias.data(), l.bias.data() + l.bias.size());
    arr.push_back({{"rows", l.weight.rows()}, {"cols", l.weight.cols()}, {"weight", w}, {"bias", b}});
  }
  return arr;
}

NetTensors tensors_from_json(const nlohmann::json& arr) {
  NetTensors t;
  for (const auto& e : arr) {
    const auto rows = e.at("rows").get<Eigen::Index>();
    const auto cols = e.at("cols").get<Eigen::Index>();
    const auto w = e.at("weight").get<std::vector<double>>();
    const auto b = e.at("bias").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(w.size()) != rows * cols || static_cast<Eigen::Index>(b.size()) != rows) {
      throw std::invalid_argument("checkpoint layer has inconsistent sizes");
    }
    DenseLayer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) l.weight(r, c) = w[static_cast<std::size_t>(r * cols + c)];
      l.bias(r) = b[static_cast<std::size_t>(r)];
    }
    t.push_back(std::move(l));
  }
  return t;
}

}  // namespace

void to_json(nlohmann::json& j, const NetParams& p) {
  j = nlohmann::json{{"layer_sizes", p.layer_sizes}, {"layers", tensors_to_json(p.layers)}};
}

void from_json(const nlohmann::json& j, NetParams& p) {
  p.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  p.layers = tensors_from_json(j.at("layers"));
  if (p.layers.size() + 1 != p.layer_sizes.size()) throw std::invalid_argument("checkpoint: layer count mismatch");
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    if (p.layers[i].weight.cols() != static_cast<Eigen::Index>(p.layer_sizes[i]) ||
        p.layers[i].weight.rows() != static_cast<Eigen::Index>(p.layer_sizes[i + 1])) {
      throw std::invalid_argument("checkpoint: layer " + std::to_string(i) + " does not chain");
    }
  }
}

void to_json(nlohmann::json& j, const AdamState& s) {
  j = nlohmann::json{{"lr", s.lr},
                     {"beta1", s.beta1},
                     {"beta2", s.beta2},
                     {"epsilon", s.epsilon},
                     {"step_count", s.step_count},
                     {"first_moment", tensors_to_json(s.first_moment)},
                     {"second_moment", tensors_to_json(s.second_moment)}};
}

void from_json(const nlohmann::json& j, AdamState& s) {
  s.lr = j.at("lr").get<double>();
  s.beta1 = j.at("beta1").get<double>();
  s.beta2 = j.at("beta2").get<double>();
  s.epsilon = j.at("epsilon").get<double>();
  s.step_count = j.at("step_count").get<std::int64_t>();
  s.first_moment = tensors_from_json(j.at("first_moment"));
  s.second_moment = tensors_from_json(j.at("second_moment"));
}

}  // namespace uavair
