#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "semeq/equalizer.hpp"
#include "semeq/language.hpp"
#include "semeq/partition.hpp"

namespace semeq {

/// Identity of a language: hash over its semantic content (grid, seeds,
/// normalization state and every parameter), independent of file metadata.
std::uint64_t language_hash(const Language& lang);

/// Identity of a partition: hash over kind, atoms and the language hash.
std::uint64_t partition_hash(const Partition& partition);

struct CheckpointMeta {
  std::string role;  // "source" or "target"
  std::uint64_t config_hash = 0;
};

/// Versioned JSON checkpoint: layer shapes, parameters and the power
/// normalization constant. save/load round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const Language& lang,
                     const CheckpointMeta& meta);

struct LoadedCheckpoint {
  Language language;
  CheckpointMeta meta;
  std::uint64_t hash = 0;  // language_hash of the loaded content
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Versioned JSON partition container: per-atom state indices, centroids,
/// labels and semantic moments plus the owning language's hash.
void save_partition(const std::filesystem::path& path, const Partition& partition,
                    std::uint64_t config_hash);

/// Rebuilds the full partition (support symbols and action values) by
/// re-encoding the stored state indices with `lang`. Throws ConfigError when
/// the stored language hash does not match `lang`.
Partition load_partition(const std::filesystem::path& path, const Language& lang);

void save_codebook(const std::filesystem::path& path, const TransformCodebook& cb,
                   std::uint64_t config_hash);

TransformCodebook load_codebook(const std::filesystem::path& path);

}  // namespace semeq
