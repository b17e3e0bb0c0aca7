#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "semeq/config.hpp"
#include "semeq/equalizer.hpp"

namespace semeq {

/// One (policy, partition, snr, seed) evaluation cell. Identity and Matched
/// baselines do not depend on a partition; their cells carry has_partition
/// = false and are run once per (snr, seed).
struct CellKey {
  SweepPolicy policy = SweepPolicy::Matched;
  bool has_partition = false;
  PartitionSpec partition;
  double snr_db = 5.0;
  std::uint64_t seed = 0;

  /// Stream tag; also the cache identity of the cell.
  std::string tag() const;
};

struct CellStats {
  double success_rate = 0.0;
  double mean_steps = 0.0;
  double mean_return = 0.0;
  double ci_half_width = 0.0;  // normal approximation over episodes
};

struct SweepCell {
  CellKey key;
  CellStats stats;
  std::vector<EpisodeResult> episodes;  // one entry per episode index
};

struct SweepReport {
  std::vector<SweepCell> cells;
  std::uint64_t config_hash = 0;
  std::string version;
  double train_snr_db = 5.0;
  int n_episodes = 0;
  int n_seeds = 0;
};

/// Runs every cell of the sweep with cell-scoped random streams and
/// aggregates per-cell statistics. Partitions and codebooks are built once
/// per partition spec. `cache_dir`, when non-empty, stores finished cells as
/// JSON and reuses them on rerun. `threads` caps worker parallelism; results
/// do not depend on scheduling.
SweepReport run_sweep(const ExperimentConfig& config, const Language& source,
                      const Language& target, int threads = 1,
                      const std::filesystem::path& cache_dir = {});

struct OrderingAssertion {
  std::string policy;
  double snr_db = 0.0;
  std::string relation;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  bool low_confidence = false;
};

/// Evaluates, per equalization policy and at each SNR at or above the
/// training SNR, whether seed-mean success satisfies
/// soft-8 >= hard-4 >= max(soft-4, soft-6). Throws UsageError when no policy
/// covers all four partitions.
std::vector<OrderingAssertion> ordering_check(const SweepReport& report);

void write_sweep_report_csv(const std::filesystem::path& path, const SweepReport& report);
void write_episodes_csv_gz(const std::filesystem::path& path, const SweepReport& report);
void write_ordering_csv(const std::filesystem::path& path,
                        const std::vector<OrderingAssertion>& assertions,
                        std::uint64_t config_hash);

/// Scatter of the partition over the semantic plane, one row per state:
/// state index, symbol coordinates, atom id and the atom's action labels.
void write_partition_csv(const std::filesystem::path& path, const Partition& partition,
                         std::uint64_t config_hash);

/// Projection of all states' action-value vectors onto the two leading
/// principal directions, colored by greedy action.
void write_pca_csv(const std::filesystem::path& path, const Language& lang,
                   const GridConfig& grid, std::uint64_t config_hash);

/// Transfer tensor in long form: source atom, fitted target atom, evaluated
/// target atom, transferred fraction.
void write_transfer_csv(const std::filesystem::path& path, const TransformCodebook& cb,
                        std::uint64_t config_hash);

}  // namespace semeq
