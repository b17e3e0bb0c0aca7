#pragma once

#include <cstdint>
#include <vector>

#include "semeq/channel.hpp"
#include "semeq/gridworld.hpp"
#include "semeq/mlp.hpp"
#include "semeq/types.hpp"

namespace semeq {

/// How the rolling power-normalization constant scales the raw symbol.
/// SqrtTau divides by the square root of the tracked mean squared norm,
/// which standardizes average transmit power to 1. Tau divides by the
/// constant itself; kept selectable for fidelity experiments.
enum class NormalizationMode { SqrtTau, Tau };

/// An encoder-decoder pair: the encoder maps observations to points of the
/// 2-D semantic space, the decoder maps (noisy) semantic symbols to
/// action values.
struct Language {
  Mlp encoder;
  Mlp decoder;
  double power_norm = 0.0;         // rolling mean of squared raw-symbol norm
  bool power_norm_ready = false;   // set once training has produced a value
  double norm_momentum = 0.1;      // weight of the previous value in the update
  NormalizationMode normalization = NormalizationMode::SqrtTau;
  int grid_width = 0;
  int grid_height = 0;
  std::uint64_t train_seed = 0;
  double train_snr_db = 5.0;
};

/// Concatenated one-hot encoding of agent and treasure cells (2*w*h entries).
Eigen::VectorXd observation_features(int grid_width, int grid_height, const Observation& obs);

/// Encoder output for `obs` scaled by the frozen normalization constant.
/// Throws UsageError when no constant has been established yet.
Symbol encode(const Language& lang, const Observation& obs);

/// Training-mode encoding: updates the rolling normalization constant with
/// the raw symbol's squared norm, then scales by the updated value.
Symbol encode_training(Language& lang, const Observation& obs);

/// Decoder forward pass at a (possibly noisy) semantic symbol.
ActionValues action_values(const Language& lang, const Symbol& y);

/// Index of the maximal entry; ties break toward the lowest action index.
Action argmax_action(const ActionValues& q);

Action greedy_action(const Language& lang, const Symbol& y);

struct DqnConfig {
  int episodes = 20000;
  double gamma = 0.95;
  double lr = 1e-3;
  int replay_capacity = 50000;
  int batch_size = 64;
  int target_sync_interval = 500;  // gradient steps between target syncs
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_steps = 50000;  // environment steps
  double eta = 0.1;                 // normalization momentum
};

/// Throws ConfigError on inconsistent values (epsilon_start < epsilon_end,
/// non-positive counts, gamma/lr/eta out of range).
void validate(const DqnConfig& config);

struct TrainingEpisodeRow {
  int episode = 0;
  int steps = 0;
  double discounted_return = 0.0;
  double epsilon = 0.0;
  double mean_loss = 0.0;
  double power_norm = 0.0;
};

struct TrainingLog {
  std::vector<TrainingEpisodeRow> episodes;
};

/// Joint DQN training of an encoder-decoder pair with the noisy channel in
/// the loop. Every draw of randomness derives from `seed`, so the returned
/// language is reproducible bit-for-bit. Throws NumericalError on divergence.
Language train_language(const GridConfig& grid, const DqnConfig& dqn, const ChannelConfig& channel,
                        std::uint64_t seed, NormalizationMode mode = NormalizationMode::SqrtTau,
                        TrainingLog* log = nullptr);

/// Success rate of the greedy policy through the channel over fresh episodes.
double evaluate_language(const Language& lang, const GridConfig& grid,
                         const ChannelConfig& channel, int n_episodes, std::uint64_t seed);

/// Mean squared norm of the normalized symbol over all enumerated states.
double average_transmit_power(const Language& lang, const GridConfig& grid);

}  // namespace semeq
