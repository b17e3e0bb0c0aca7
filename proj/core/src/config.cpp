#include "semeq/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semeq/errors.hpp"
#include "semeq/rng.hpp"

namespace semeq {

using ordered_json = nlohmann::ordered_json;

namespace {

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                         const std::string& scope) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + scope);
    }
  }
}

template <typename T>
void read_field(const ordered_json& obj, const char* key, T& out) {
  if (obj.contains(key)) {
    try {
      out = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
  }
}

NormalizationMode parse_normalization(const std::string& name) {
  if (name == "sqrt_tau") return NormalizationMode::SqrtTau;
  if (name == "tau") return NormalizationMode::Tau;
  throw ConfigError("normalization must be 'sqrt_tau' or 'tau', got '" + name + "'");
}

std::string normalization_name(NormalizationMode mode) {
  return mode == NormalizationMode::SqrtTau ? "sqrt_tau" : "tau";
}

PartitionKind parse_kind(const std::string& name) {
  if (name == "hard") return PartitionKind::Hard;
  if (name == "soft") return PartitionKind::Soft;
  throw ConfigError("partition kind must be 'hard' or 'soft', got '" + name + "'");
}

SweepPolicy parse_policy(const std::string& name) {
  if (name == "sem") return SweepPolicy::Semantic;
  if (name == "eff") return SweepPolicy::Effectiveness;
  if (name == "identity") return SweepPolicy::Identity;
  if (name == "matched") return SweepPolicy::Matched;
  throw ConfigError("policy must be one of sem/eff/identity/matched, got '" + name + "'");
}

MixedCorrespondence parse_mixed(const std::string& name) {
  if (name == "nearest_centroid") return MixedCorrespondence::NearestCentroid;
  if (name == "label_intersection") return MixedCorrespondence::LabelIntersection;
  throw ConfigError("mixed_correspondence must be 'nearest_centroid' or 'label_intersection'");
}

std::string mixed_name(MixedCorrespondence mixed) {
  return mixed == MixedCorrespondence::NearestCentroid ? "nearest_centroid"
                                                       : "label_intersection";
}

}  // namespace

std::string_view sweep_policy_name(SweepPolicy policy) {
  switch (policy) {
    case SweepPolicy::Semantic: return "sem";
    case SweepPolicy::Effectiveness: return "eff";
    case SweepPolicy::Identity: return "identity";
    case SweepPolicy::Matched: return "matched";
  }
  return "?";
}

void validate(const ExperimentConfig& config) {
  validate(config.grid);
  validate(config.dqn);
  if (!std::isfinite(config.channel.snr_db)) throw ConfigError("channel.snr_db must be finite");
  if (config.partition.ambiguity_epsilon < 0.0 || config.partition.ambiguity_epsilon >= 1.0) {
    throw ConfigError("partition.ambiguity_epsilon must be in [0,1)");
  }
  if (config.partition.kmeans_restarts < 1) {
    throw ConfigError("partition.kmeans_restarts must be >= 1");
  }
  if (config.partition.transfer_noise_samples < 0) {
    throw ConfigError("partition.transfer_noise_samples must be >= 0");
  }
  for (int n_c : config.partition.n_c_list) {
    if (n_c < 2) throw ConfigError("partition.n_c_list entries must be >= 2");
  }
  if (config.sweep.snr_grid_db.empty()) throw ConfigError("sweep.snr_grid_db must be non-empty");
  if (config.sweep.n_episodes < 1) throw ConfigError("sweep.n_episodes must be >= 1");
  if (config.sweep.seeds.empty()) throw ConfigError("sweep.seeds must be non-empty");
  if (config.sweep.partitions.empty()) throw ConfigError("sweep.partitions must be non-empty");
  if (config.sweep.policies.empty()) throw ConfigError("sweep.policies must be non-empty");
  for (const PartitionSpec& spec : config.sweep.partitions) {
    if (spec.kind == PartitionKind::Soft && spec.n_c < 2) {
      throw ConfigError("soft sweep partitions need n_c >= 2");
    }
  }
  if (config.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");

  reject_unknown_keys(root,
                      {"master_seed", "output_dir", "normalization", "grid", "dqn", "channel",
                       "partition", "sweep"},
                      "config");

  ExperimentConfig config;
  read_field(root, "master_seed", config.master_seed);
  read_field(root, "output_dir", config.output_dir);
  if (root.contains("normalization")) {
    config.normalization = parse_normalization(root.at("normalization").get<std::string>());
  }

  if (root.contains("grid")) {
    const auto& grid = root.at("grid");
    reject_unknown_keys(grid, {"width", "height", "max_steps", "step_reward", "goal_reward"},
                        "grid");
    read_field(grid, "width", config.grid.width);
    read_field(grid, "height", config.grid.height);
    read_field(grid, "max_steps", config.grid.max_steps);
    read_field(grid, "step_reward", config.grid.step_reward);
    read_field(grid, "goal_reward", config.grid.goal_reward);
  }

  if (root.contains("dqn")) {
    const auto& dqn = root.at("dqn");
    reject_unknown_keys(dqn,
                        {"episodes", "gamma", "lr", "replay_capacity", "batch_size",
                         "target_sync_interval", "epsilon_start", "epsilon_end",
                         "epsilon_decay_steps", "eta"},
                        "dqn");
    read_field(dqn, "episodes", config.dqn.episodes);
    read_field(dqn, "gamma", config.dqn.gamma);
    read_field(dqn, "lr", config.dqn.lr);
    read_field(dqn, "replay_capacity", config.dqn.replay_capacity);
    read_field(dqn, "batch_size", config.dqn.batch_size);
    read_field(dqn, "target_sync_interval", config.dqn.target_sync_interval);
    read_field(dqn, "epsilon_start", config.dqn.epsilon_start);
    read_field(dqn, "epsilon_end", config.dqn.epsilon_end);
    read_field(dqn, "epsilon_decay_steps", config.dqn.epsilon_decay_steps);
    read_field(dqn, "eta", config.dqn.eta);
  }

  if (root.contains("channel")) {
    const auto& channel = root.at("channel");
    reject_unknown_keys(channel, {"snr_db"}, "channel");
    read_field(channel, "snr_db", config.channel.snr_db);
  }

  if (root.contains("partition")) {
    const auto& part = root.at("partition");
    reject_unknown_keys(part,
                        {"n_c_list", "ambiguity_epsilon", "kmeans_restarts",
                         "transfer_noise_samples", "transfer_noise_snr_db",
                         "mixed_correspondence"},
                        "partition");
    read_field(part, "n_c_list", config.partition.n_c_list);
    read_field(part, "ambiguity_epsilon", config.partition.ambiguity_epsilon);
    read_field(part, "kmeans_restarts", config.partition.kmeans_restarts);
    read_field(part, "transfer_noise_samples", config.partition.transfer_noise_samples);
    read_field(part, "transfer_noise_snr_db", config.partition.transfer_noise_snr_db);
    if (part.contains("mixed_correspondence")) {
      config.partition.mixed_correspondence =
          parse_mixed(part.at("mixed_correspondence").get<std::string>());
    }
  }

  if (root.contains("sweep")) {
    const auto& sweep = root.at("sweep");
    reject_unknown_keys(sweep, {"snr_grid_db", "n_episodes", "seeds", "partitions", "policies"},
                        "sweep");
    read_field(sweep, "snr_grid_db", config.sweep.snr_grid_db);
    read_field(sweep, "n_episodes", config.sweep.n_episodes);
    read_field(sweep, "seeds", config.sweep.seeds);
    if (sweep.contains("partitions")) {
      config.sweep.partitions.clear();
      for (const auto& entry : sweep.at("partitions")) {
        reject_unknown_keys(entry, {"kind", "n_c"}, "sweep.partitions");
        PartitionSpec spec;
        spec.kind = parse_kind(entry.at("kind").get<std::string>());
        if (spec.kind == PartitionKind::Hard) {
          spec.n_c = kNumActions;
          if (entry.contains("n_c")) spec.n_c = entry.at("n_c").get<int>();
        } else {
          spec.n_c = entry.at("n_c").get<int>();
        }
        config.sweep.partitions.push_back(spec);
      }
    }
    if (sweep.contains("policies")) {
      config.sweep.policies.clear();
      for (const auto& entry : sweep.at("policies")) {
        config.sweep.policies.push_back(parse_policy(entry.get<std::string>()));
      }
    }
  }

  validate(config);
  return config;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

std::string canonical_config_json(const ExperimentConfig& config) {
  ordered_json root;
  root["master_seed"] = config.master_seed;
  root["output_dir"] = config.output_dir;
  root["normalization"] = normalization_name(config.normalization);
  root["grid"] = {{"width", config.grid.width},
                  {"height", config.grid.height},
                  {"max_steps", config.grid.max_steps},
                  {"step_reward", config.grid.step_reward},
                  {"goal_reward", config.grid.goal_reward}};
  root["dqn"] = {{"episodes", config.dqn.episodes},
                 {"gamma", config.dqn.gamma},
                 {"lr", config.dqn.lr},
                 {"replay_capacity", config.dqn.replay_capacity},
                 {"batch_size", config.dqn.batch_size},
                 {"target_sync_interval", config.dqn.target_sync_interval},
                 {"epsilon_start", config.dqn.epsilon_start},
                 {"epsilon_end", config.dqn.epsilon_end},
                 {"epsilon_decay_steps", config.dqn.epsilon_decay_steps},
                 {"eta", config.dqn.eta}};
  root["channel"] = {{"snr_db", config.channel.snr_db}};
  root["partition"] = {{"n_c_list", config.partition.n_c_list},
                       {"ambiguity_epsilon", config.partition.ambiguity_epsilon},
                       {"kmeans_restarts", config.partition.kmeans_restarts},
                       {"transfer_noise_samples", config.partition.transfer_noise_samples},
                       {"transfer_noise_snr_db", config.partition.transfer_noise_snr_db},
                       {"mixed_correspondence", mixed_name(config.partition.mixed_correspondence)}};
  ordered_json partitions = ordered_json::array();
  for (const PartitionSpec& spec : config.sweep.partitions) {
    partitions.push_back(
        {{"kind", std::string(partition_kind_name(spec.kind))}, {"n_c", spec.n_c}});
  }
  ordered_json policies = ordered_json::array();
  for (SweepPolicy policy : config.sweep.policies) {
    policies.push_back(std::string(sweep_policy_name(policy)));
  }
  root["sweep"] = {{"snr_grid_db", config.sweep.snr_grid_db},
                   {"n_episodes", config.sweep.n_episodes},
                   {"seeds", config.sweep.seeds},
                   {"partitions", partitions},
                   {"policies", policies}};
  return root.dump();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a64(canonical_config_json(config));
}

std::string hash_to_hex(std::uint64_t hash) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

std::uint64_t hash_from_hex(const std::string& hex) {
  if (hex.size() != 16) throw ConfigError("hash must be 16 hex digits, got '" + hex + "'");
  std::uint64_t value = 0;
  for (char c : hex) {
    value <<= 4;
    if (c >= '0' && c <= '9') {
      value |= static_cast<std::uint64_t>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      value |= static_cast<std::uint64_t>(c - 'a' + 10);
    } else {
      throw ConfigError("hash must be lowercase hex, got '" + hex + "'");
    }
  }
  return value;
}

}  // namespace semeq
