#include <doctest.h>

#include <cmath>

#include "semeq/errors.hpp"
#include "semeq/language.hpp"
#include "semeq/serialize.hpp"
#include "support/synthetic.hpp"

using namespace semeq;

namespace {

// Language whose raw encoder output is a fixed vector for every state.
Language constant_raw_language(const Eigen::Vector2d& raw) {
  const int cells = 4;  // 2x2 grid
  Eigen::MatrixXd enc = Eigen::MatrixXd::Zero(2, 2 * cells);
  for (int c = 0; c < cells; ++c) enc.col(c) = raw;  // agent one-hot carries it
  Language lang = testing::make_linear_language(2, 2, enc, Eigen::MatrixXd::Zero(4, 2),
                                                Eigen::VectorXd::Zero(4));
  lang.power_norm_ready = false;
  lang.power_norm = 0.0;
  return lang;
}

const Observation kObs{{0, 0}, {1, 1}};

}  // namespace

TEST_CASE("observation features are a two-hot encoding") {
  const Eigen::VectorXd f = observation_features(3, 2, {{2, 1}, {0, 0}});
  CHECK(f.size() == 12);
  CHECK(f.sum() == 2.0);
  CHECK(f(5) == 1.0);   // agent at row-major index 5
  CHECK(f(6) == 1.0);   // treasure block starts at 6
}

TEST_CASE("frozen normalization divides by sqrt of the constant") {
  Language lang = constant_raw_language({2.0, 0.0});
  lang.power_norm = 4.0;
  lang.power_norm_ready = true;
  const Symbol x = encode(lang, kObs);
  CHECK(x.x() == doctest::Approx(1.0));
  CHECK(x.y() == doctest::Approx(0.0));

  lang.normalization = NormalizationMode::Tau;
  const Symbol x_tau = encode(lang, kObs);
  CHECK(x_tau.x() == doctest::Approx(0.5));
}

TEST_CASE("training updates follow the rolling rule") {
  SUBCASE("first update initializes the constant to the squared norm") {
    Language lang = constant_raw_language({2.0, 0.0});
    encode_training(lang, kObs);
    CHECK(lang.power_norm == doctest::Approx(4.0));
  }
  SUBCASE("constant squared norm is a fixed point") {
    Language lang = constant_raw_language({std::sqrt(0.5), std::sqrt(0.5)});
    for (int i = 0; i < 5; ++i) encode_training(lang, kObs);
    CHECK(lang.power_norm == doctest::Approx(1.0));
  }
  SUBCASE("one update from 1.0 with squared norm 2 gives 1.9") {
    // 0.1 * 1 + 0.9 * 2 = 1.9 with momentum 0.1.
    Language lang = constant_raw_language({std::sqrt(2.0), 0.0});
    lang.power_norm = 1.0;
    lang.power_norm_ready = true;
    lang.norm_momentum = 0.1;
    encode_training(lang, kObs);
    CHECK(lang.power_norm == doctest::Approx(1.9).epsilon(1e-12));
  }
}

TEST_CASE("evaluation encode requires an established constant") {
  Language lang = constant_raw_language({1.0, 0.0});
  CHECK_THROWS_AS(encode(lang, kObs), UsageError);
}

TEST_CASE("argmax_action breaks ties toward the lowest index") {
  CHECK(argmax_action(ActionValues(0, 0, 0, 0)) == Action::Right);
  CHECK(argmax_action(ActionValues(1, 3, 2, 0)) == Action::Down);
  CHECK(argmax_action(ActionValues(2, 2, 1, 0)) == Action::Right);
}

TEST_CASE("positive scaling never changes the greedy action") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    ActionValues q;
    for (int a = 0; a < 4; ++a) q(a) = 2.0 * uniform01(rng) - 1.0;
    const double scale = 0.1 + 10.0 * uniform01(rng);
    CHECK(argmax_action(q) == argmax_action(ActionValues(scale * q)));
  }
}

TEST_CASE("action_values equals the decoder forward pass") {
  const Language lang = testing::make_goal_vector_language(3, 3);
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const Symbol y(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
    const ActionValues q = action_values(lang, y);
    const Eigen::VectorXd direct = lang.decoder.forward(Eigen::VectorXd(y));
    CHECK((q - direct).norm() == 0.0);
  }
}

TEST_CASE("dqn config validation") {
  DqnConfig bad;
  bad.epsilon_start = 0.1;
  bad.epsilon_end = 0.5;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  DqnConfig gamma;
  gamma.gamma = 1.0;
  CHECK_THROWS_AS(validate(gamma), ConfigError);
  DqnConfig eta;
  eta.eta = 0.0;
  CHECK_THROWS_AS(validate(eta), ConfigError);
  CHECK_NOTHROW(validate(DqnConfig{}));
}

TEST_CASE("training is reproducible and seed-sensitive") {
  const GridConfig grid{.width = 2, .height = 2, .max_steps = 40};
  DqnConfig dqn;
  dqn.episodes = 400;
  dqn.epsilon_decay_steps = 800;
  dqn.target_sync_interval = 100;
  const ChannelConfig channel{5.0};

  const Language a = train_language(grid, dqn, channel, 99);
  const Language b = train_language(grid, dqn, channel, 99);
  CHECK(language_hash(a) == language_hash(b));

  const Language c = train_language(grid, dqn, channel, 100);
  CHECK(language_hash(a) != language_hash(c));
  // Different seeds produce genuinely different encoders.
  double total_distance = 0.0;
  for (const Observation& obs : enumerate_states(grid)) {
    total_distance += (encode(a, obs) - encode(c, obs)).norm();
  }
  CHECK(total_distance > 0.0);
}
