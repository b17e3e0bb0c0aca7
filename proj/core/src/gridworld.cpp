#include "semeq/gridworld.hpp"

#include <cstdlib>

#include "semeq/errors.hpp"

namespace semeq {

void validate(const GridConfig& config) {
  if (config.width < 2 || config.height < 2) {
    throw ConfigError("grid must be at least 2x2, got " + std::to_string(config.width) + "x" +
                      std::to_string(config.height));
  }
  if (config.max_steps < 1) {
    throw ConfigError("max_steps must be >= 1");
  }
}

std::string_view action_letter(Action a) {
  switch (a) {
    case Action::Right: return "R";
    case Action::Down: return "D";
    case Action::Left: return "L";
    case Action::Up: return "U";
  }
  return "?";
}

int cell_index(const GridConfig& config, const Cell& cell) {
  return cell.y * config.width + cell.x;
}

bool inside(const GridConfig& config, const Cell& cell) {
  return cell.x >= 0 && cell.x < config.width && cell.y >= 0 && cell.y < config.height;
}

int manhattan_distance(const Observation& obs) {
  return std::abs(obs.agent.x - obs.treasure.x) + std::abs(obs.agent.y - obs.treasure.y);
}

Observation sample_observation(const GridConfig& config, Rng& rng) {
  validate(config);
  const std::uint64_t cells = static_cast<std::uint64_t>(config.width) * config.height;
  Observation obs;
  do {
    const auto a = uniform_below(rng, cells);
    const auto t = uniform_below(rng, cells);
    obs.agent = {static_cast<int>(a % config.width), static_cast<int>(a / config.width)};
    obs.treasure = {static_cast<int>(t % config.width), static_cast<int>(t / config.width)};
  } while (obs.agent == obs.treasure);
  return obs;
}

std::vector<Observation> enumerate_states(const GridConfig& config) {
  validate(config);
  std::vector<Observation> states;
  states.reserve(static_cast<std::size_t>(config.width) * config.height *
                 (static_cast<std::size_t>(config.width) * config.height - 1));
  for (int ay = 0; ay < config.height; ++ay) {
    for (int ax = 0; ax < config.width; ++ax) {
      for (int ty = 0; ty < config.height; ++ty) {
        for (int tx = 0; tx < config.width; ++tx) {
          if (ax == tx && ay == ty) continue;
          states.push_back({{ax, ay}, {tx, ty}});
        }
      }
    }
  }
  return states;
}

std::vector<Action> optimal_action_set(const Observation& obs) {
  if (obs.agent == obs.treasure) {
    throw UsageError("optimal_action_set called on a terminal state");
  }
  std::vector<Action> actions;
  if (obs.treasure.x > obs.agent.x) actions.push_back(Action::Right);
  if (obs.treasure.y > obs.agent.y) actions.push_back(Action::Down);
  if (obs.treasure.x < obs.agent.x) actions.push_back(Action::Left);
  if (obs.treasure.y < obs.agent.y) actions.push_back(Action::Up);
  return actions;
}

StepOutcome apply_action(const GridConfig& config, const Observation& obs, Action action) {
  Cell next = obs.agent;
  switch (action) {
    case Action::Right: ++next.x; break;
    case Action::Down: ++next.y; break;
    case Action::Left: --next.x; break;
    case Action::Up: --next.y; break;
  }
  if (!inside(config, next)) {
    next = obs.agent;  // wall clamp
  }
  StepOutcome out;
  out.obs = {next, obs.treasure};
  out.reached_goal = (next == obs.treasure);
  out.reward = out.reached_goal ? config.goal_reward : config.step_reward;
  return out;
}

Episode::Episode(GridConfig config) : config_(config) {
  validate(config_);
}

Observation Episode::reset(Rng& rng) {
  obs_ = sample_observation(config_, rng);
  steps_ = 0;
  done_ = false;
  return obs_;
}

Episode::Result Episode::step(Action action) {
  if (done_) {
    throw UsageError("Episode::step called after the episode finished");
  }
  const StepOutcome out = apply_action(config_, obs_, action);
  obs_ = out.obs;
  ++steps_;
  done_ = out.reached_goal || steps_ >= config_.max_steps;
  return {obs_, out.reward, done_};
}

}  // namespace semeq
