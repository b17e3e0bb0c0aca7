#include "semeq/optim.hpp"

#include <cmath>

#include "semeq/errors.hpp"

namespace semeq {

namespace {

template <typename Tensor>
void update_tensor(Tensor& param, const Tensor& grad, Tensor& m, Tensor& v,
                   const AdamConfig& cfg, double bias1, double bias2) {
  if (!grad.allFinite()) {
    throw NumericalError("Adam: non-finite gradient");
  }
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const Tensor m_hat = m / bias1;
  const Tensor v_hat = v / bias2;
  param.array() -= cfg.lr * m_hat.array() / (v_hat.array().sqrt() + cfg.epsilon);
}

}  // namespace

void Adam::step(Mlp& net, const Mlp::Gradients& grads) {
  auto& layers = net.layers();
  if (grads.weight.size() != layers.size() || grads.bias.size() != layers.size()) {
    throw UsageError("Adam::step: gradient layer count does not match the network");
  }
  if (weight_m_.empty()) {
    weight_m_.resize(layers.size());
    weight_v_.resize(layers.size());
    bias_m_.resize(layers.size());
    bias_v_.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
      weight_m_[l] = Eigen::MatrixXd::Zero(layers[l].weight.rows(), layers[l].weight.cols());
      weight_v_[l] = weight_m_[l];
      bias_m_[l] = Eigen::VectorXd::Zero(layers[l].bias.size());
      bias_v_[l] = bias_m_[l];
    }
  }
  ++steps_;
  const double bias1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double bias2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (grads.weight[l].rows() != layers[l].weight.rows() ||
        grads.weight[l].cols() != layers[l].weight.cols()) {
      throw UsageError("Adam::step: gradient shape mismatch");
    }
    update_tensor(layers[l].weight, grads.weight[l], weight_m_[l], weight_v_[l], config_, bias1,
                  bias2);
    update_tensor(layers[l].bias, grads.bias[l], bias_m_[l], bias_v_[l], config_, bias1, bias2);
  }
}

}  // namespace semeq
