#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semeq/channel.hpp"
#include "semeq/equalizer.hpp"
#include "semeq/gridworld.hpp"
#include "semeq/language.hpp"
#include "semeq/partition.hpp"

namespace semeq {

struct PartitionOptions {
  std::vector<int> n_c_list = {4, 6, 8};
  double ambiguity_epsilon = 0.15;
  int kmeans_restarts = 10;
  int transfer_noise_samples = 0;  // 0 keeps transfer estimates noiseless
  double transfer_noise_snr_db = 5.0;
  MixedCorrespondence mixed_correspondence = MixedCorrespondence::NearestCentroid;
};

enum class SweepPolicy { Semantic, Effectiveness, Identity, Matched };

std::string_view sweep_policy_name(SweepPolicy policy);

struct PartitionSpec {
  PartitionKind kind = PartitionKind::Hard;
  int n_c = 4;
  friend bool operator==(const PartitionSpec&, const PartitionSpec&) = default;
};

struct SweepConfig {
  std::vector<double> snr_grid_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  int n_episodes = 1000;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::vector<PartitionSpec> partitions = {{PartitionKind::Hard, 4},
                                           {PartitionKind::Soft, 4},
                                           {PartitionKind::Soft, 6},
                                           {PartitionKind::Soft, 8}};
  std::vector<SweepPolicy> policies = {SweepPolicy::Semantic, SweepPolicy::Effectiveness,
                                       SweepPolicy::Identity, SweepPolicy::Matched};
};

/// Everything one experiment needs, read from a single JSON file. Unknown
/// keys are rejected; missing keys take the defaults shown here.
struct ExperimentConfig {
  std::uint64_t master_seed = 1234;
  std::string output_dir = "out";
  NormalizationMode normalization = NormalizationMode::SqrtTau;
  GridConfig grid;
  DqnConfig dqn;
  ChannelConfig channel;  // training-time channel
  PartitionOptions partition;
  SweepConfig sweep;
};

void validate(const ExperimentConfig& config);

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Fixed-order JSON rendering of the config; hashing and provenance checks
/// run over this string.
std::string canonical_config_json(const ExperimentConfig& config);

std::uint64_t config_hash(const ExperimentConfig& config);

/// 16-hex-digit rendering used in artifact files.
std::string hash_to_hex(std::uint64_t hash);
std::uint64_t hash_from_hex(const std::string& hex);

}  // namespace semeq
