#include "semeq/language.hpp"

#include <cmath>

#include "semeq/errors.hpp"

namespace semeq {

Eigen::VectorXd observation_features(int grid_width, int grid_height, const Observation& obs) {
  const int cells = grid_width * grid_height;
  Eigen::VectorXd features = Eigen::VectorXd::Zero(2 * cells);
  features(obs.agent.y * grid_width + obs.agent.x) = 1.0;
  features(cells + obs.treasure.y * grid_width + obs.treasure.x) = 1.0;
  return features;
}

namespace {

Symbol scale_symbol(const Language& lang, const Eigen::VectorXd& raw) {
  const double divisor = lang.normalization == NormalizationMode::SqrtTau
                             ? std::sqrt(lang.power_norm)
                             : lang.power_norm;
  return Symbol(raw(0) / divisor, raw(1) / divisor);
}

}  // namespace

Symbol encode(const Language& lang, const Observation& obs) {
  if (!lang.power_norm_ready) {
    throw UsageError("encode: normalization constant not established; train first");
  }
  const Eigen::VectorXd raw =
      lang.encoder.forward(observation_features(lang.grid_width, lang.grid_height, obs));
  return scale_symbol(lang, raw);
}

Symbol encode_training(Language& lang, const Observation& obs) {
  const Eigen::VectorXd raw =
      lang.encoder.forward(observation_features(lang.grid_width, lang.grid_height, obs));
  const double norm_sq = raw.squaredNorm();
  if (!lang.power_norm_ready) {
    lang.power_norm = norm_sq;
    lang.power_norm_ready = true;
  } else {
    lang.power_norm = lang.norm_momentum * lang.power_norm + (1.0 - lang.norm_momentum) * norm_sq;
  }
  return scale_symbol(lang, raw);
}

ActionValues action_values(const Language& lang, const Symbol& y) {
  return lang.decoder.forward(Eigen::VectorXd(y));
}

Action argmax_action(const ActionValues& q) {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (q(a) > q(best)) best = a;
  }
  return static_cast<Action>(best);
}

Action greedy_action(const Language& lang, const Symbol& y) {
  return argmax_action(action_values(lang, y));
}

void validate(const DqnConfig& config) {
  if (config.episodes < 1) throw ConfigError("dqn.episodes must be >= 1");
  if (config.gamma <= 0.0 || config.gamma >= 1.0) throw ConfigError("dqn.gamma must be in (0,1)");
  if (config.lr <= 0.0) throw ConfigError("dqn.lr must be positive");
  if (config.replay_capacity < 1) throw ConfigError("dqn.replay_capacity must be >= 1");
  if (config.batch_size < 1) throw ConfigError("dqn.batch_size must be >= 1");
  if (config.target_sync_interval < 1) {
    throw ConfigError("dqn.target_sync_interval must be >= 1");
  }
  if (config.epsilon_start < 0.0 || config.epsilon_start > 1.0 || config.epsilon_end < 0.0 ||
      config.epsilon_end > 1.0) {
    throw ConfigError("dqn epsilon values must be in [0,1]");
  }
  if (config.epsilon_start < config.epsilon_end) {
    throw ConfigError("dqn.epsilon_start must be >= dqn.epsilon_end");
  }
  if (config.epsilon_decay_steps < 1) throw ConfigError("dqn.epsilon_decay_steps must be >= 1");
  if (config.eta <= 0.0 || config.eta >= 1.0) throw ConfigError("dqn.eta must be in (0,1)");
}

double evaluate_language(const Language& lang, const GridConfig& grid,
                         const ChannelConfig& channel, int n_episodes, std::uint64_t seed) {
  Rng rng = make_rng(seed, "language-eval");
  Episode episode(grid);
  int successes = 0;
  for (int e = 0; e < n_episodes; ++e) {
    episode.reset(rng);
    while (!episode.done()) {
      const Symbol x = encode(lang, episode.observation());
      const Symbol y = transmit(x, channel, rng);
      const auto result = episode.step(greedy_action(lang, y));
      if (result.done && result.obs.agent == result.obs.treasure) ++successes;
    }
  }
  return static_cast<double>(successes) / n_episodes;
}

double average_transmit_power(const Language& lang, const GridConfig& grid) {
  const auto states = enumerate_states(grid);
  double total = 0.0;
  for (const Observation& obs : states) {
    total += encode(lang, obs).squaredNorm();
  }
  return total / static_cast<double>(states.size());
}

}  // namespace semeq
