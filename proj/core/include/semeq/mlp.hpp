#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "semeq/rng.hpp"

namespace semeq {

enum class Activation { ReLU, Identity };

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
  Activation activation = Activation::Identity;
};

/// Dense feed-forward network with explicit reverse-mode gradients. Small by
/// design: just what the encoder and decoder need.
class Mlp {
 public:
  Mlp() = default;

  /// dims = {in, hidden..., out}; one activation per layer. Weights drawn
  /// uniformly in [-sqrt(6/fan_in), sqrt(6/fan_in)), biases zero.
  Mlp(const std::vector<int>& dims, const std::vector<Activation>& activations, Rng& rng);

  /// Wraps explicit layers; verifies that consecutive dimensions chain.
  static Mlp from_layers(std::vector<Layer> layers);

  int input_dim() const;
  int output_dim() const;
  std::size_t layer_count() const { return layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& input) const;

  /// Batched forward; columns are independent samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& inputs) const;

  struct Gradients {
    std::vector<Eigen::MatrixXd> weight;
    std::vector<Eigen::VectorXd> bias;
    Eigen::MatrixXd input;
  };

  /// Gradients of the scalar <output_grads, outputs> with respect to every
  /// parameter and the input. Batched: parameter gradients sum over columns.
  Gradients backward(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& output_grads) const;

  std::size_t parameter_count() const;
  bool finite() const;

 private:
  std::vector<Layer> layers_;
};

}  // namespace semeq
