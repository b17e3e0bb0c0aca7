#pragma once

#include <Eigen/Core>
#include <vector>

#include "semeq/mlp.hpp"

namespace semeq {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected adaptive optimizer over an Mlp's parameter set. Each weight
/// matrix and bias vector keeps its own moment accumulators; updates are
/// independent across tensors.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  /// One update step. Moment buffers are sized on first use and must
  /// shape-match afterwards. Throws NumericalError on non-finite gradients.
  void step(Mlp& net, const Mlp::Gradients& grads);

  long long steps_taken() const { return steps_; }
  const AdamConfig& config() const { return config_; }

  /// Adjusts the learning rate between steps (for decay schedules).
  void set_lr(double lr) { config_.lr = lr; }

 private:
  AdamConfig config_;
  long long steps_ = 0;
  std::vector<Eigen::MatrixXd> weight_m_, weight_v_;
  std::vector<Eigen::VectorXd> bias_m_, bias_v_;
};

}  // namespace semeq
