#include "semeq/mlp.hpp"

#include <cmath>

#include "semeq/errors.hpp"

namespace semeq {

Mlp::Mlp(const std::vector<int>& dims, const std::vector<Activation>& activations, Rng& rng) {
  if (dims.size() < 2 || activations.size() != dims.size() - 1) {
    throw UsageError("Mlp: need dims {in, ..., out} and one activation per layer");
  }
  layers_.reserve(activations.size());
  for (std::size_t l = 0; l < activations.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    if (fan_in <= 0 || fan_out <= 0) {
      throw UsageError("Mlp: layer dimensions must be positive");
    }
    Layer layer;
    layer.weight.resize(fan_out, fan_in);
    const double limit = std::sqrt(6.0 / fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) {
        layer.weight(r, c) = (2.0 * uniform01(rng) - 1.0) * limit;
      }
    }
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    layer.activation = activations[l];
    layers_.push_back(std::move(layer));
  }
}

Mlp Mlp::from_layers(std::vector<Layer> layers) {
  if (layers.empty()) {
    throw UsageError("Mlp: at least one layer required");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].bias.size() != layers[l].weight.rows()) {
      throw UsageError("Mlp: bias length must match weight rows");
    }
    if (l > 0 && layers[l].weight.cols() != layers[l - 1].weight.rows()) {
      throw UsageError("Mlp: consecutive layer dimensions do not chain");
    }
  }
  Mlp net;
  net.layers_ = std::move(layers);
  return net;
}

int Mlp::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int Mlp::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& input) const {
  return forward(Eigen::MatrixXd(input)).col(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != input_dim()) {
    throw UsageError("Mlp::forward: input has " + std::to_string(inputs.rows()) +
                     " rows, expected " + std::to_string(input_dim()));
  }
  Eigen::MatrixXd act = inputs;
  for (const Layer& layer : layers_) {
    Eigen::MatrixXd z = (layer.weight * act).colwise() + layer.bias;
    if (layer.activation == Activation::ReLU) {
      act = z.cwiseMax(0.0);
    } else {
      act = std::move(z);
    }
  }
  return act;
}

Mlp::Gradients Mlp::backward(const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& output_grads) const {
  if (inputs.rows() != input_dim()) {
    throw UsageError("Mlp::backward: input rows do not match the first layer");
  }
  if (output_grads.rows() != output_dim() || output_grads.cols() != inputs.cols()) {
    throw UsageError("Mlp::backward: output_grads shape does not match the output");
  }

  const std::size_t n = layers_.size();
  // Forward pass keeping pre-activations for the ReLU masks.
  std::vector<Eigen::MatrixXd> acts(n + 1);
  std::vector<Eigen::MatrixXd> pre(n);
  acts[0] = inputs;
  for (std::size_t l = 0; l < n; ++l) {
    pre[l] = (layers_[l].weight * acts[l]).colwise() + layers_[l].bias;
    acts[l + 1] =
        layers_[l].activation == Activation::ReLU ? pre[l].cwiseMax(0.0).eval() : pre[l];
  }

  Gradients grads;
  grads.weight.resize(n);
  grads.bias.resize(n);

  Eigen::MatrixXd delta = output_grads;
  for (std::size_t l = n; l-- > 0;) {
    if (layers_[l].activation == Activation::ReLU) {
      delta = (pre[l].array() > 0.0).select(delta, 0.0);
    }
    grads.weight[l].noalias() = delta * acts[l].transpose();
    grads.bias[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (layers_[l].weight.transpose() * delta).eval();
    } else {
      grads.input.noalias() = layers_[l].weight.transpose() * delta;
    }
  }
  return grads;
}

std::size_t Mlp::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& layer : layers_) {
    count += static_cast<std::size_t>(layer.weight.size()) + layer.bias.size();
  }
  return count;
}

bool Mlp::finite() const {
  for (const Layer& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

}  // namespace semeq
