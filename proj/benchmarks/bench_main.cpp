#include <benchmark/benchmark.h>

#include "semeq/channel.hpp"
#include "semeq/equalizer.hpp"
#include "semeq/language.hpp"
#include "semeq/partition.hpp"

using namespace semeq;

namespace {

// Synthetic language whose encoder emits the agent-to-treasure vector and
// whose decoder scores directional alignment; solves the task untrained.
Language bench_language(int width, int height, double rotation) {
  const int cells = width * height;
  Eigen::Matrix2d rot;
  rot << std::cos(rotation), -std::sin(rotation), std::sin(rotation), std::cos(rotation);
  Eigen::MatrixXd enc = Eigen::MatrixXd::Zero(2, 2 * cells);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int idx = y * width + x;
      const Eigen::Vector2d pos(x, y);
      enc.col(idx) = rot * (-0.33 * pos);
      enc.col(cells + idx) = rot * (0.33 * pos);
    }
  }
  Eigen::MatrixXd dir(4, 2);
  dir << 1, 0, 0, 1, -1, 0, 0, -1;
  Language lang;
  lang.grid_width = width;
  lang.grid_height = height;
  lang.encoder = Mlp::from_layers({Layer{enc, Eigen::VectorXd::Zero(2), Activation::Identity}});
  lang.decoder = Mlp::from_layers(
      {Layer{dir * rot.transpose(), Eigen::VectorXd::Zero(4), Activation::Identity}});
  lang.power_norm = 1.0;
  lang.power_norm_ready = true;
  return lang;
}

struct EqualizerFixture {
  GridConfig grid{.width = 5, .height = 5};
  Language source = bench_language(5, 5, 0.0);
  Language target = bench_language(5, 5, 1.2);
  std::vector<Observation> states = enumerate_states(grid);
  Partition source_partition = build_soft_partition(source, states, 8, 1);
  Partition target_partition = build_soft_partition(target, states, 8, 2);
  TransformCodebook cb = build_codebook(source, source_partition, target, target_partition);
};

const EqualizerFixture& fixture() {
  static const EqualizerFixture fx;
  return fx;
}

}  // namespace

static void BM_MlpForwardBatch(benchmark::State& state) {
  Rng rng(1);
  Mlp net({50, 64, 64, 2}, {Activation::ReLU, Activation::ReLU, Activation::Identity}, rng);
  Eigen::MatrixXd batch = Eigen::MatrixXd::Zero(50, state.range(0));
  for (Eigen::Index c = 0; c < batch.cols(); ++c) {
    batch(uniform_below(rng, 25), c) = 1.0;
    batch(25 + uniform_below(rng, 25), c) = 1.0;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.forward(batch));
  }
}
BENCHMARK(BM_MlpForwardBatch)->Arg(1)->Arg(64);

static void BM_MlpBackwardBatch(benchmark::State& state) {
  Rng rng(2);
  Mlp net({50, 64, 64, 2}, {Activation::ReLU, Activation::ReLU, Activation::Identity}, rng);
  Eigen::MatrixXd batch = Eigen::MatrixXd::Zero(50, 64);
  for (Eigen::Index c = 0; c < batch.cols(); ++c) {
    batch(uniform_below(rng, 25), c) = 1.0;
  }
  const Eigen::MatrixXd grads = Eigen::MatrixXd::Ones(2, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(net.backward(batch, grads));
  }
}
BENCHMARK(BM_MlpBackwardBatch);

static void BM_ChannelTransmit(benchmark::State& state) {
  Rng rng(3);
  const ChannelConfig cfg{5.0};
  const Symbol x(0.3, -0.7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transmit(x, cfg, rng));
  }
}
BENCHMARK(BM_ChannelTransmit);

static void BM_Kmeans600x4(benchmark::State& state) {
  Rng rng(4);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < 600; ++i) {
    Eigen::VectorXd p(4);
    for (int d = 0; d < 4; ++d) p(d) = uniform01(rng);
    points.push_back(p);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(kmeans(points, 8, state.range(0), 7));
  }
}
BENCHMARK(BM_Kmeans600x4)->Arg(1)->Arg(10);

// The per-decision budget for map selection over an 8x8 codebook is 1 ms;
// these run in microseconds.
static void BM_SelectSemantic8x8(benchmark::State& state) {
  const auto& fx = fixture();
  const ActionValues q = action_values(fx.source, encode(fx.source, fx.states[0]));
  const Eigen::VectorXd weights = membership_weights(fx.source_partition, q);
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_map_semantic(fx.cb, weights));
  }
}
BENCHMARK(BM_SelectSemantic8x8);

static void BM_SelectEffectiveness8x8(benchmark::State& state) {
  const auto& fx = fixture();
  const ActionValues q = action_values(fx.source, encode(fx.source, fx.states[0]));
  const Eigen::VectorXd weights = membership_weights(fx.source_partition, q);
  const ActionValues obs_q = action_values(fx.target, encode(fx.target, fx.states[0]));
  Eigen::VectorXd values(fx.cb.target_atoms);
  for (int j = 0; j < fx.cb.target_atoms; ++j) {
    values(j) = atom_q_value(fx.target_partition.atoms[j], obs_q);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_map_effectiveness(fx.cb, weights, values));
  }
}
BENCHMARK(BM_SelectEffectiveness8x8);

static void BM_EqualizedEpisode(benchmark::State& state) {
  const auto& fx = fixture();
  Rng rng(9);
  const ChannelConfig channel{10.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(equalized_episode(fx.source, fx.target, &fx.source_partition,
                                               &fx.target_partition, &fx.cb,
                                               SelectionPolicy::Semantic, fx.grid, channel, 0.95,
                                               rng));
  }
}
BENCHMARK(BM_EqualizedEpisode);

static void BM_EstimateTransfer600(benchmark::State& state) {
  const auto& fx = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(transfer_distribution(fx.cb.map(0, 0), fx.source_partition.atoms[0],
                                                   fx.target_partition, fx.target));
  }
}
BENCHMARK(BM_EstimateTransfer600);

BENCHMARK_MAIN();
