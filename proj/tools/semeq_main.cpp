// Command line front end for the semantic channel equalization pipeline:
//   semeq train      — train one encoder-decoder language
//   semeq partition  — build a hard or soft partition of its semantic space
//   semeq codebook   — fit the transformation codebook between two partitions
//   semeq sweep      — run the SNR sweep over policies and partitions
//   semeq inspect    — summarize an artifact file / dump transfer data
//
// Exit codes: 0 success, 1 usage or configuration errors, 2 runtime or
// numerical errors.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "semeq/config.hpp"
#include "semeq/csv.hpp"
#include "semeq/errors.hpp"
#include "semeq/serialize.hpp"
#include "semeq/sweep.hpp"
#include "semeq/version.hpp"

namespace fs = std::filesystem;
using namespace semeq;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_override;
};

fs::path resolve_output_dir(const ExperimentConfig& config, const CommonOptions& common) {
  if (!common.out_override.empty()) return common.out_override;
  if (const char* env = std::getenv("SEMEQ_OUT"); env != nullptr && *env != '\0') return env;
  return config.output_dir;
}

std::string partition_id(const std::string& role, const Partition& partition) {
  const int n = partition.kind == PartitionKind::Hard ? kNumActions
                                                      : partition.requested_clusters;
  return role + "_" + std::string(partition_kind_name(partition.kind)) + std::to_string(n);
}

void write_training_curve(const fs::path& path, const TrainingLog& log,
                          std::uint64_t cfg_hash) {
  CsvWriter csv(path, {"episode", "steps", "discounted_return", "epsilon", "mean_loss",
                       "power_norm"},
                {std::string(kVersion) + " config_hash=" + hash_to_hex(cfg_hash)});
  for (const TrainingEpisodeRow& row : log.episodes) {
    csv.write_row({std::to_string(row.episode), std::to_string(row.steps),
                   format_double(row.discounted_return), format_double(row.epsilon),
                   format_double(row.mean_loss), format_double(row.power_norm)});
  }
}

Language train_role(const ExperimentConfig& config, const std::string& role,
                    const fs::path& out_dir, bool verbose) {
  const std::uint64_t seed = derive_seed(config.master_seed, "train/" + role);
  TrainingLog log;
  const Language lang = train_language(config.grid, config.dqn, config.channel, seed,
                                       config.normalization, &log);
  const std::uint64_t cfg_hash = config_hash(config);
  save_checkpoint(out_dir / ("checkpoint_" + role + ".json"), lang, {role, cfg_hash});
  write_training_curve(out_dir / ("train_curve_" + role + ".csv"), log, cfg_hash);
  if (verbose) {
    const double success = evaluate_language(lang, config.grid, config.channel, 1000,
                                             derive_seed(config.master_seed, "eval/" + role));
    std::cout << "trained " << role << ": success_rate=" << format_double(success)
              << " avg_power=" << format_double(average_transmit_power(lang, config.grid))
              << " power_norm=" << format_double(lang.power_norm) << "\n";
  }
  return lang;
}

int cmd_train(const CommonOptions& common, const std::string& role) {
  const ExperimentConfig config = load_experiment_config(common.config_path);
  const fs::path out_dir = resolve_output_dir(config, common);
  fs::create_directories(out_dir);
  train_role(config, role, out_dir, true);
  std::cout << "checkpoint written to " << (out_dir / ("checkpoint_" + role + ".json")) << "\n";
  return 0;
}

int cmd_partition(const CommonOptions& common, const std::string& checkpoint_path,
                  const std::string& kind_name, int n_c) {
  const ExperimentConfig config = load_experiment_config(common.config_path);
  const fs::path out_dir = resolve_output_dir(config, common);
  fs::create_directories(out_dir);

  if (kind_name == "soft" && n_c < 2) {
    throw ConfigError("partition: soft partitions need --n-c >= 2");
  }
  const LoadedCheckpoint checkpoint = load_checkpoint(checkpoint_path);
  const Language& lang = checkpoint.language;
  const GridConfig grid{.width = lang.grid_width, .height = lang.grid_height};
  const auto states = enumerate_states(grid);
  const std::uint64_t cfg_hash = config_hash(config);
  const std::string role = checkpoint.meta.role.empty() ? "lang" : checkpoint.meta.role;

  Partition partition;
  if (kind_name == "hard") {
    partition = build_hard_partition(lang, states, config.partition.ambiguity_epsilon);
  } else if (kind_name == "soft") {
    partition = build_soft_partition(
        lang, states, n_c,
        derive_seed(config.master_seed, "partition/" + role + "/soft/" + std::to_string(n_c)),
        config.partition.ambiguity_epsilon, config.partition.kmeans_restarts);
  } else {
    throw ConfigError("partition: --kind must be 'hard' or 'soft'");
  }

  const std::string id = partition_id(role, partition);
  save_partition(out_dir / ("partition_" + id + ".json"), partition, cfg_hash);
  write_partition_csv(out_dir / ("partition_" + id + ".csv"), partition, cfg_hash);
  write_pca_csv(out_dir / ("pca_projection_" + role + ".csv"), lang, grid, cfg_hash);
  std::cout << "partition " << id << ": " << partition.n_atoms() << " atoms, files written to "
            << out_dir << "\n";
  return 0;
}

int cmd_codebook(const CommonOptions& common, const std::string& source_partition_path,
                 const std::string& target_partition_path, const std::string& source_ckpt_path,
                 const std::string& target_ckpt_path) {
  const ExperimentConfig config = load_experiment_config(common.config_path);
  const fs::path out_dir = resolve_output_dir(config, common);
  fs::create_directories(out_dir);

  const LoadedCheckpoint source = load_checkpoint(source_ckpt_path);
  const LoadedCheckpoint target = load_checkpoint(target_ckpt_path);
  // load_partition verifies that each partition was built for its language.
  const Partition source_partition = load_partition(source_partition_path, source.language);
  const Partition target_partition = load_partition(target_partition_path, target.language);

  const TransferJitter jitter{config.partition.transfer_noise_samples,
                              config.partition.transfer_noise_snr_db};
  const std::string spec_tag =
      std::string(partition_kind_name(source_partition.kind)) +
      std::to_string(source_partition.kind == PartitionKind::Hard
                         ? kNumActions
                         : source_partition.requested_clusters);
  const TransformCodebook cb = build_codebook(
      source.language, source_partition, target.language, target_partition, jitter,
      derive_seed(config.master_seed, "codebook/" + spec_tag),
      config.partition.mixed_correspondence);

  const std::uint64_t cfg_hash = config_hash(config);
  save_codebook(out_dir / ("codebook_" + spec_tag + ".json"), cb, cfg_hash);
  write_transfer_csv(out_dir / ("zeta_" + spec_tag + ".csv"), cb, cfg_hash);
  std::cout << "codebook " << spec_tag << ": " << cb.map_count() << " maps, files written to "
            << out_dir << "\n";
  return 0;
}

void print_ordering_table(const std::vector<OrderingAssertion>& assertions) {
  std::cout << "ordering check (seed-mean success):\n";
  for (const OrderingAssertion& a : assertions) {
    std::cout << "  " << (a.pass ? "PASS" : "FAIL") << "  " << a.policy << " @ "
              << format_double(a.snr_db) << " dB  " << a.relation << "  ("
              << format_double(a.lhs) << " vs " << format_double(a.rhs) << ")"
              << (a.low_confidence ? "  [low confidence: single seed]" : "") << "\n";
  }
}

int cmd_sweep(const CommonOptions& common, std::string source_ckpt_path,
              std::string target_ckpt_path, bool build_missing, bool strict, int threads,
              bool no_cache) {
  const ExperimentConfig config = load_experiment_config(common.config_path);
  const fs::path out_dir = resolve_output_dir(config, common);
  fs::create_directories(out_dir);

  if (source_ckpt_path.empty()) {
    source_ckpt_path = (out_dir / "checkpoint_source.json").string();
  }
  if (target_ckpt_path.empty()) {
    target_ckpt_path = (out_dir / "checkpoint_target.json").string();
  }

  const auto load_or_train = [&](const std::string& path, const std::string& role) -> Language {
    if (fs::exists(path)) {
      return load_checkpoint(path).language;
    }
    if (!build_missing) {
      throw FileError("sweep: missing checkpoint " + path + " (use --build-missing to train)");
    }
    return train_role(config, role, out_dir, true);
  };
  const Language source = load_or_train(source_ckpt_path, "source");
  const Language target = load_or_train(target_ckpt_path, "target");

  const SweepReport report =
      run_sweep(config, source, target, threads, no_cache ? fs::path{} : out_dir / "cells");

  const std::uint64_t cfg_hash = report.config_hash;
  write_sweep_report_csv(out_dir / "sweep_report.csv", report);
  write_episodes_csv_gz(out_dir / "episodes.csv.gz", report);
  write_pca_csv(out_dir / "pca_projection.csv", source, config.grid, cfg_hash);

  // Partition scatters and transfer tensors for every partition spec in the
  // sweep, rebuilt deterministically from the same seeds the sweep used.
  const auto states = enumerate_states(config.grid);
  for (const PartitionSpec& spec : config.sweep.partitions) {
    const std::string spec_tag =
        std::string(partition_kind_name(spec.kind)) + std::to_string(spec.n_c);
    const auto build = [&](const Language& lang, const std::string& role) {
      if (spec.kind == PartitionKind::Hard) {
        return build_hard_partition(lang, states, config.partition.ambiguity_epsilon);
      }
      return build_soft_partition(lang, states, spec.n_c,
                                  derive_seed(config.master_seed,
                                              "partition/" + role + "/" +
                                                  std::string(partition_kind_name(spec.kind)) +
                                                  "/" + std::to_string(spec.n_c)),
                                  config.partition.ambiguity_epsilon,
                                  config.partition.kmeans_restarts);
    };
    const Partition source_partition = build(source, "source");
    const Partition target_partition = build(target, "target");
    write_partition_csv(out_dir / ("partition_source_" + spec_tag + ".csv"), source_partition,
                        cfg_hash);
    write_partition_csv(out_dir / ("partition_target_" + spec_tag + ".csv"), target_partition,
                        cfg_hash);
    const TransferJitter jitter{config.partition.transfer_noise_samples,
                                config.partition.transfer_noise_snr_db};
    const TransformCodebook cb = build_codebook(
        source, source_partition, target, target_partition, jitter,
        derive_seed(config.master_seed, "codebook/" + std::string(partition_kind_name(spec.kind)) +
                                            "/" + std::to_string(spec.n_c)),
        config.partition.mixed_correspondence);
    write_transfer_csv(out_dir / ("zeta_" + spec_tag + ".csv"), cb, cfg_hash);
  }

  bool all_pass = true;
  try {
    const auto assertions = ordering_check(report);
    write_ordering_csv(out_dir / "ordering_check.csv", assertions, cfg_hash);
    print_ordering_table(assertions);
    for (const OrderingAssertion& a : assertions) all_pass = all_pass && a.pass;
  } catch (const UsageError& e) {
    std::cout << "ordering check skipped: " << e.what() << "\n";
  }
  std::cout << "sweep complete: " << report.cells.size() << " cells, reports written to "
            << out_dir << "\n";
  if (strict && !all_pass) {
    std::cerr << "ordering assertions failed under --strict\n";
    return 2;
  }
  return 0;
}

int cmd_inspect(const std::string& input_path, const std::string& out_dir_arg) {
  // Peek at the format field to decide what the file is.
  std::ifstream in(input_path);
  if (!in) throw FileError("cannot open file: " + input_path);
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(input_path + " is not valid JSON: " + std::string(e.what()));
  }
  const std::string format = root.value("format", "");
  const fs::path out_dir = out_dir_arg.empty() ? fs::path(input_path).parent_path()
                                               : fs::path(out_dir_arg);

  if (format == "semeq-checkpoint") {
    const LoadedCheckpoint checkpoint = load_checkpoint(input_path);
    const Language& lang = checkpoint.language;
    std::cout << "checkpoint role=" << checkpoint.meta.role << " grid=" << lang.grid_width << "x"
              << lang.grid_height << " train_snr_db=" << format_double(lang.train_snr_db)
              << " power_norm=" << format_double(lang.power_norm)
              << " language_hash=" << hash_to_hex(checkpoint.hash) << "\n";
    return 0;
  }
  if (format == "semeq-partition") {
    const auto& content = root.at("content");
    std::cout << "partition kind=" << content.at("kind").get<std::string>()
              << " atoms=" << content.at("atoms").size()
              << " language_hash=" << content.at("language_hash").get<std::string>() << "\n";
    for (const auto& atom : content.at("atoms")) {
      std::cout << "  atom " << atom.at("id").get<int>() << ": "
                << atom.at("state_indices").size() << " states, labels=[";
      bool first = true;
      for (int label : atom.at("action_labels").get<std::vector<int>>()) {
        if (!first) std::cout << "+";
        std::cout << action_letter(static_cast<Action>(label));
        first = false;
      }
      std::cout << "]\n";
    }
    return 0;
  }
  if (format == "semeq-codebook") {
    const TransformCodebook cb = load_codebook(input_path);
    const fs::path csv_path =
        out_dir / ("zeta_" + fs::path(input_path).stem().string() + ".csv");
    write_transfer_csv(csv_path, cb,
                       hash_from_hex(root.at("config_hash").get<std::string>()));
    std::cout << "codebook " << cb.source_atoms << "x" << cb.target_atoms << " maps="
              << cb.map_count() << ", transfer data written to " << csv_path << "\n";
    return 0;
  }
  throw ConfigError(input_path + ": unknown artifact format '" + format + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("semantic channel equalization pipeline (") + kVersion + ")"};
  app.require_subcommand(1);

  CommonOptions common;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", common.config_path, "experiment config JSON");
    if (needs_config) opt->required();
    sub->add_option("-o,--out", common.out_override,
                    "output directory (overrides SEMEQ_OUT and the config)");
  };

  auto* train = app.add_subcommand("train", "train one language (encoder-decoder pair)");
  std::string role = "source";
  add_common(train, true);
  train->add_option("--role", role, "which language to train: source or target")
      ->check(CLI::IsMember({"source", "target"}));

  auto* partition = app.add_subcommand("partition", "build a partition of the semantic space");
  std::string checkpoint_path;
  std::string kind = "soft";
  int n_c = 8;
  add_common(partition, true);
  partition->add_option("--checkpoint", checkpoint_path, "language checkpoint file")->required();
  partition->add_option("--kind", kind, "hard or soft")
      ->check(CLI::IsMember({"hard", "soft"}));
  partition->add_option("--n-c", n_c, "number of atoms for soft partitioning");

  auto* codebook = app.add_subcommand("codebook", "fit the transformation codebook");
  std::string source_partition_path, target_partition_path;
  std::string source_ckpt_path, target_ckpt_path;
  add_common(codebook, true);
  codebook->add_option("--source-partition", source_partition_path)->required();
  codebook->add_option("--target-partition", target_partition_path)->required();
  codebook->add_option("--source-checkpoint", source_ckpt_path)->required();
  codebook->add_option("--target-checkpoint", target_ckpt_path)->required();

  auto* sweep = app.add_subcommand("sweep", "run the SNR sweep and write reports");
  std::string sweep_source_ckpt, sweep_target_ckpt;
  bool build_missing = false;
  bool strict = false;
  bool no_cache = false;
  int threads = 1;
  add_common(sweep, true);
  sweep->add_option("--source-checkpoint", sweep_source_ckpt,
                    "defaults to <out>/checkpoint_source.json");
  sweep->add_option("--target-checkpoint", sweep_target_ckpt,
                    "defaults to <out>/checkpoint_target.json");
  sweep->add_flag("--build-missing", build_missing, "train checkpoints that do not exist yet");
  sweep->add_flag("--strict", strict, "exit nonzero when ordering assertions fail");
  sweep->add_flag("--no-cache", no_cache, "do not reuse or store per-cell results");
  sweep->add_option("--threads", threads, "worker thread cap")->check(CLI::PositiveNumber);

  auto* inspect = app.add_subcommand("inspect", "summarize an artifact file");
  std::string inspect_input, inspect_out;
  inspect->add_option("--input", inspect_input, "artifact file to inspect")->required();
  inspect->add_option("-o,--out", inspect_out, "directory for dumped CSV data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);  // 0 for --help, nonzero with usage text otherwise
  }

  try {
    if (train->parsed()) return cmd_train(common, role);
    if (partition->parsed()) return cmd_partition(common, checkpoint_path, kind, n_c);
    if (codebook->parsed()) {
      return cmd_codebook(common, source_partition_path, target_partition_path, source_ckpt_path,
                          target_ckpt_path);
    }
    if (sweep->parsed()) {
      return cmd_sweep(common, sweep_source_ckpt, sweep_target_ckpt, build_missing, strict,
                       threads, no_cache);
    }
    if (inspect->parsed()) return cmd_inspect(inspect_input, inspect_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const FileError& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
