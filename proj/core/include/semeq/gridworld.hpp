#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "semeq/rng.hpp"

namespace semeq {

struct GridConfig {
  int width = 5;
  int height = 5;
  int max_steps = 150;
  double step_reward = 0.0;
  double goal_reward = 1.0;
};

/// Throws ConfigError unless width, height >= 2 and max_steps >= 1.
void validate(const GridConfig& config);

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Grid-world state: agent and treasure positions. States with
/// agent == treasure are terminal and never observed by the agent.
struct Observation {
  Cell agent;
  Cell treasure;
  friend bool operator==(const Observation&, const Observation&) = default;
};

enum class Action : int { Right = 0, Down = 1, Left = 2, Up = 3 };

inline constexpr int kNumActions = 4;

/// Short label used in CSV output ("R", "D", "L", "U").
std::string_view action_letter(Action a);

/// Row-major index of a cell: y * width + x.
int cell_index(const GridConfig& config, const Cell& cell);

bool inside(const GridConfig& config, const Cell& cell);

int manhattan_distance(const Observation& obs);

/// Uniform draw over the valid (agent, treasure) pairs with agent != treasure.
Observation sample_observation(const GridConfig& config, Rng& rng);

/// All non-terminal states in canonical order: row-major agent position, then
/// row-major treasure position. The order is fixed across runs and platforms.
std::vector<Observation> enumerate_states(const GridConfig& config);

/// Actions that strictly reduce the Manhattan distance to the treasure.
/// Size 1 when the treasure is axis-aligned with the agent, 2 otherwise.
/// Throws UsageError on terminal states.
std::vector<Action> optimal_action_set(const Observation& obs);

struct StepOutcome {
  Observation obs;
  double reward = 0.0;
  bool reached_goal = false;
};

/// Pure transition: moves the agent one cell; off-grid moves leave it in
/// place. Reward is goal_reward when the new agent cell equals the treasure,
/// step_reward otherwise.
StepOutcome apply_action(const GridConfig& config, const Observation& obs, Action action);

/// One episode with a step counter and a done flag. Value type; independent
/// episodes can run in parallel without shared state.
class Episode {
 public:
  explicit Episode(GridConfig config);

  /// Samples a fresh non-terminal state and resets the step counter.
  Observation reset(Rng& rng);

  struct Result {
    Observation obs;
    double reward = 0.0;
    bool done = false;
  };

  /// Advances the episode. done is set when the treasure is reached or the
  /// step counter hits max_steps. Throws UsageError when called after done.
  Result step(Action action);

  const GridConfig& config() const { return config_; }
  const Observation& observation() const { return obs_; }
  int steps() const { return steps_; }
  bool done() const { return done_; }

 private:
  GridConfig config_;
  Observation obs_;
  int steps_ = 0;
  bool done_ = true;  // reset() must be called first
};

}  // namespace semeq
