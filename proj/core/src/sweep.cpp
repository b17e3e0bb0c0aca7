#include "semeq/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "semeq/csv.hpp"
#include "semeq/errors.hpp"
#include "semeq/serialize.hpp"
#include "semeq/version.hpp"

namespace semeq {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kNormalQuantile95 = 1.959963984540054;  // two-sided 95%

std::string partition_label(const CellKey& key) {
  return key.has_partition ? std::string(partition_kind_name(key.partition.kind)) : "none";
}

int partition_n_c(const CellKey& key) {
  return key.has_partition ? key.partition.n_c : 0;
}

CellStats aggregate(const std::vector<EpisodeResult>& episodes) {
  CellStats stats;
  const double n = static_cast<double>(episodes.size());
  for (const EpisodeResult& e : episodes) {
    stats.success_rate += e.success ? 1.0 : 0.0;
    stats.mean_steps += e.steps;
    stats.mean_return += e.discounted_return;
  }
  stats.success_rate /= n;
  stats.mean_steps /= n;
  stats.mean_return /= n;
  stats.ci_half_width =
      kNormalQuantile95 * std::sqrt(stats.success_rate * (1.0 - stats.success_rate) / n);
  return stats;
}

struct PartitionBundle {
  PartitionSpec spec;
  Partition source;
  Partition target;
  TransformCodebook codebook;
};

}  // namespace

std::string CellKey::tag() const {
  return "sweep/" + std::string(sweep_policy_name(policy)) + "/" + partition_label(*this) + "/" +
         std::to_string(partition_n_c(*this)) + "/" + format_double(snr_db) + "/" +
         std::to_string(seed);
}

namespace {

std::filesystem::path cell_cache_path(const std::filesystem::path& cache_dir, const CellKey& key,
                                      std::uint64_t cfg_hash) {
  const std::uint64_t id = fnv1a64(key.tag() + "#" + hash_to_hex(cfg_hash));
  return cache_dir / ("cell_" + hash_to_hex(id) + ".json");
}

bool load_cached_cell(const std::filesystem::path& path, const CellKey& key,
                      std::uint64_t cfg_hash, int n_episodes, SweepCell& cell) {
  std::ifstream in(path);
  if (!in) return false;
  ordered_json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  if (root.value("tag", "") != key.tag() ||
      root.value("config_hash", "") != hash_to_hex(cfg_hash)) {
    return false;
  }
  const auto& episodes = root.at("episodes");
  if (static_cast<int>(episodes.size()) != n_episodes) return false;
  cell.episodes.clear();
  for (const auto& entry : episodes) {
    EpisodeResult e;
    e.success = entry.at(0).get<int>() != 0;
    e.steps = entry.at(1).get<int>();
    e.discounted_return = entry.at(2).get<double>();
    cell.episodes.push_back(e);
  }
  cell.stats = aggregate(cell.episodes);
  return true;
}

void store_cached_cell(const std::filesystem::path& path, const CellKey& key,
                       std::uint64_t cfg_hash, const SweepCell& cell) {
  ordered_json episodes = ordered_json::array();
  for (const EpisodeResult& e : cell.episodes) {
    episodes.push_back({e.success ? 1 : 0, e.steps, e.discounted_return});
  }
  ordered_json root;
  root["tag"] = key.tag();
  root["config_hash"] = hash_to_hex(cfg_hash);
  root["episodes"] = std::move(episodes);
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << root.dump() << '\n';
}

}  // namespace

SweepReport run_sweep(const ExperimentConfig& config, const Language& source,
                      const Language& target, int threads,
                      const std::filesystem::path& cache_dir) {
  validate(config);
  if (source.grid_width != config.grid.width || source.grid_height != config.grid.height ||
      target.grid_width != config.grid.width || target.grid_height != config.grid.height) {
    throw ConfigError("run_sweep: checkpoint grids do not match the configured grid");
  }

  const std::vector<Observation> states = enumerate_states(config.grid);
  const std::uint64_t cfg_hash = config_hash(config);

  // One partition pair + codebook per partition spec, built deterministically
  // from the master seed before any cell runs.
  std::vector<PartitionBundle> bundles;
  const bool needs_partitions =
      std::any_of(config.sweep.policies.begin(), config.sweep.policies.end(), [](SweepPolicy p) {
        return p == SweepPolicy::Semantic || p == SweepPolicy::Effectiveness;
      });
  if (needs_partitions) {
    for (const PartitionSpec& spec : config.sweep.partitions) {
      PartitionBundle bundle;
      bundle.spec = spec;
      const std::string spec_tag =
          std::string(partition_kind_name(spec.kind)) + "/" + std::to_string(spec.n_c);
      if (spec.kind == PartitionKind::Hard) {
        bundle.source =
            build_hard_partition(source, states, config.partition.ambiguity_epsilon);
        bundle.target =
            build_hard_partition(target, states, config.partition.ambiguity_epsilon);
      } else {
        bundle.source = build_soft_partition(
            source, states, spec.n_c, derive_seed(config.master_seed, "partition/source/" + spec_tag),
            config.partition.ambiguity_epsilon, config.partition.kmeans_restarts);
        bundle.target = build_soft_partition(
            target, states, spec.n_c, derive_seed(config.master_seed, "partition/target/" + spec_tag),
            config.partition.ambiguity_epsilon, config.partition.kmeans_restarts);
      }
      const TransferJitter jitter{config.partition.transfer_noise_samples,
                                  config.partition.transfer_noise_snr_db};
      bundle.codebook = build_codebook(source, bundle.source, target, bundle.target, jitter,
                                       derive_seed(config.master_seed, "codebook/" + spec_tag),
                                       config.partition.mixed_correspondence);
      bundles.push_back(std::move(bundle));
    }
  }

  SweepReport report;
  report.config_hash = cfg_hash;
  report.version = kVersion;
  report.train_snr_db = config.channel.snr_db;
  report.n_episodes = config.sweep.n_episodes;
  report.n_seeds = static_cast<int>(config.sweep.seeds.size());

  struct CellJob {
    CellKey key;
    const PartitionBundle* bundle = nullptr;  // null for baselines
  };
  std::vector<CellJob> jobs;
  for (SweepPolicy policy : config.sweep.policies) {
    const bool equalizing =
        policy == SweepPolicy::Semantic || policy == SweepPolicy::Effectiveness;
    for (std::size_t b = 0; b < (equalizing ? bundles.size() : std::size_t{1}); ++b) {
      for (double snr : config.sweep.snr_grid_db) {
        for (std::uint64_t seed : config.sweep.seeds) {
          CellJob job;
          job.key.policy = policy;
          job.key.has_partition = equalizing;
          if (equalizing) {
            job.key.partition = bundles[b].spec;
            job.bundle = &bundles[b];
          }
          job.key.snr_db = snr;
          job.key.seed = seed;
          jobs.push_back(job);
        }
      }
    }
  }

  report.cells.resize(jobs.size());

  const auto run_job = [&](std::size_t j) {
    const CellJob& job = jobs[j];
    SweepCell& cell = report.cells[j];
    cell.key = job.key;

    std::filesystem::path cache_path;
    if (!cache_dir.empty()) {
      cache_path = cell_cache_path(cache_dir, job.key, cfg_hash);
      if (load_cached_cell(cache_path, job.key, cfg_hash, config.sweep.n_episodes, cell)) {
        return;
      }
    }

    Rng rng = make_rng(config.master_seed, job.key.tag());
    const ChannelConfig channel{job.key.snr_db};
    cell.episodes.reserve(config.sweep.n_episodes);
    for (int e = 0; e < config.sweep.n_episodes; ++e) {
      EpisodeResult result;
      switch (job.key.policy) {
        case SweepPolicy::Matched:
          result = matched_episode(target, config.grid, channel, config.dqn.gamma, rng);
          break;
        case SweepPolicy::Identity:
          result = equalized_episode(source, target, nullptr, nullptr, nullptr,
                                     SelectionPolicy::Identity, config.grid, channel,
                                     config.dqn.gamma, rng);
          break;
        case SweepPolicy::Semantic:
          result = equalized_episode(source, target, &job.bundle->source, &job.bundle->target,
                                     &job.bundle->codebook, SelectionPolicy::Semantic,
                                     config.grid, channel, config.dqn.gamma, rng);
          break;
        case SweepPolicy::Effectiveness:
          result = equalized_episode(source, target, &job.bundle->source, &job.bundle->target,
                                     &job.bundle->codebook, SelectionPolicy::Effectiveness,
                                     config.grid, channel, config.dqn.gamma, rng);
          break;
      }
      cell.episodes.push_back(result);
    }
    cell.stats = aggregate(cell.episodes);
    if (!cache_path.empty()) {
      store_cached_cell(cache_path, job.key, cfg_hash, cell);
    }
  };

  threads = std::max(1, threads);
  if (threads == 1 || jobs.size() <= 1) {
    for (std::size_t j = 0; j < jobs.size(); ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int worker_count = std::min<std::size_t>(threads, jobs.size());
    workers.reserve(worker_count);
    for (int w = 0; w < worker_count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t j = next.fetch_add(1); j < jobs.size(); j = next.fetch_add(1)) {
          run_job(j);
        }
      });
    }
    for (std::thread& worker : workers) worker.join();
  }

  return report;
}

std::vector<OrderingAssertion> ordering_check(const SweepReport& report) {
  // Seed-mean success per (policy, partition, snr).
  struct MeanAcc {
    double sum = 0.0;
    int count = 0;
  };
  std::map<std::tuple<SweepPolicy, PartitionKind, int, double>, MeanAcc> means;
  std::vector<double> snrs;
  for (const SweepCell& cell : report.cells) {
    if (!cell.key.has_partition) continue;
    auto& acc = means[{cell.key.policy, cell.key.partition.kind, cell.key.partition.n_c,
                       cell.key.snr_db}];
    acc.sum += cell.stats.success_rate;
    ++acc.count;
    if (std::find(snrs.begin(), snrs.end(), cell.key.snr_db) == snrs.end()) {
      snrs.push_back(cell.key.snr_db);
    }
  }

  const auto mean_of = [&](SweepPolicy policy, PartitionKind kind, int n_c,
                           double snr) -> const MeanAcc* {
    const auto it = means.find({policy, kind, n_c, snr});
    return it == means.end() ? nullptr : &it->second;
  };

  std::vector<OrderingAssertion> assertions;
  const bool low_confidence = report.n_seeds < 2;
  for (SweepPolicy policy : {SweepPolicy::Semantic, SweepPolicy::Effectiveness}) {
    for (double snr : snrs) {
      if (snr < report.train_snr_db - 1e-9) continue;
      const MeanAcc* hard4 = mean_of(policy, PartitionKind::Hard, 4, snr);
      const MeanAcc* soft4 = mean_of(policy, PartitionKind::Soft, 4, snr);
      const MeanAcc* soft6 = mean_of(policy, PartitionKind::Soft, 6, snr);
      const MeanAcc* soft8 = mean_of(policy, PartitionKind::Soft, 8, snr);
      if (hard4 == nullptr || soft4 == nullptr || soft6 == nullptr || soft8 == nullptr) {
        continue;
      }
      const double m_hard4 = hard4->sum / hard4->count;
      const double m_soft4 = soft4->sum / soft4->count;
      const double m_soft6 = soft6->sum / soft6->count;
      const double m_soft8 = soft8->sum / soft8->count;
      OrderingAssertion top;
      top.policy = std::string(sweep_policy_name(policy));
      top.snr_db = snr;
      top.relation = "soft8>=hard4";
      top.lhs = m_soft8;
      top.rhs = m_hard4;
      top.pass = m_soft8 >= m_hard4;
      top.low_confidence = low_confidence;
      assertions.push_back(top);

      OrderingAssertion bottom;
      bottom.policy = top.policy;
      bottom.snr_db = snr;
      bottom.relation = "hard4>=max(soft4,soft6)";
      bottom.lhs = m_hard4;
      bottom.rhs = std::max(m_soft4, m_soft6);
      bottom.pass = bottom.lhs >= bottom.rhs;
      bottom.low_confidence = low_confidence;
      assertions.push_back(bottom);
    }
  }
  if (assertions.empty()) {
    throw UsageError(
        "ordering_check: report has no policy covering hard-4 and soft-{4,6,8} at SNRs >= the "
        "training SNR");
  }
  return assertions;
}

void write_sweep_report_csv(const std::filesystem::path& path, const SweepReport& report) {
  CsvWriter csv(path,
                {"policy", "kind", "n_c", "snr_db", "seed", "success_rate", "mean_steps",
                 "mean_return", "ci_half_width"},
                {std::string(report.version) + " config_hash=" + hash_to_hex(report.config_hash)});
  for (const SweepCell& cell : report.cells) {
    csv.write_row({std::string(sweep_policy_name(cell.key.policy)), partition_label(cell.key),
                   std::to_string(partition_n_c(cell.key)), format_double(cell.key.snr_db),
                   std::to_string(cell.key.seed), format_double(cell.stats.success_rate),
                   format_double(cell.stats.mean_steps), format_double(cell.stats.mean_return),
                   format_double(cell.stats.ci_half_width)});
  }
}

void write_episodes_csv_gz(const std::filesystem::path& path, const SweepReport& report) {
  GzipTextFile gz(path);
  gz.append("# " + std::string(report.version) +
            " config_hash=" + hash_to_hex(report.config_hash) + "\n");
  gz.append("policy,kind,n_c,snr_db,seed,episode,success,steps,discounted_return\n");
  for (const SweepCell& cell : report.cells) {
    const std::string prefix = std::string(sweep_policy_name(cell.key.policy)) + "," +
                               partition_label(cell.key) + "," +
                               std::to_string(partition_n_c(cell.key)) + "," +
                               format_double(cell.key.snr_db) + "," +
                               std::to_string(cell.key.seed) + ",";
    for (std::size_t e = 0; e < cell.episodes.size(); ++e) {
      const EpisodeResult& episode = cell.episodes[e];
      gz.append(prefix + std::to_string(e) + "," + (episode.success ? "1" : "0") + "," +
                std::to_string(episode.steps) + "," + format_double(episode.discounted_return) +
                "\n");
    }
  }
  gz.close();
}

void write_ordering_csv(const std::filesystem::path& path,
                        const std::vector<OrderingAssertion>& assertions,
                        std::uint64_t config_hash) {
  CsvWriter csv(path, {"policy", "snr_db", "relation", "lhs", "rhs", "pass", "low_confidence"},
                {std::string(kVersion) + " config_hash=" + hash_to_hex(config_hash)});
  for (const OrderingAssertion& a : assertions) {
    csv.write_row({a.policy, format_double(a.snr_db), a.relation, format_double(a.lhs),
                   format_double(a.rhs), a.pass ? "1" : "0", a.low_confidence ? "1" : "0"});
  }
}

void write_partition_csv(const std::filesystem::path& path, const Partition& partition,
                         std::uint64_t config_hash) {
  CsvWriter csv(path, {"state", "symbol_x", "symbol_y", "atom_id", "action_label"},
                {std::string(kVersion) + " config_hash=" + hash_to_hex(config_hash)});
  struct Row {
    int state;
    const Atom* atom;
    const Symbol* symbol;
  };
  std::vector<Row> rows;
  for (const Atom& atom : partition.atoms) {
    for (std::size_t i = 0; i < atom.state_indices.size(); ++i) {
      rows.push_back({atom.state_indices[i], &atom, &atom.symbols[i]});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.state < b.state; });
  for (const Row& row : rows) {
    std::string label;
    for (Action a : row.atom->action_labels) {
      if (!label.empty()) label += '+';
      label += action_letter(a);
    }
    csv.write_row({std::to_string(row.state), format_double(row.symbol->x()),
                   format_double(row.symbol->y()), std::to_string(row.atom->id), label});
  }
}

void write_pca_csv(const std::filesystem::path& path, const Language& lang,
                   const GridConfig& grid, std::uint64_t config_hash) {
  const std::vector<Observation> states = enumerate_states(grid);
  std::vector<Eigen::VectorXd> points;
  std::vector<Action> greedy;
  points.reserve(states.size());
  for (const Observation& obs : states) {
    const Symbol x = encode(lang, obs);
    const ActionValues q = action_values(lang, x);
    points.emplace_back(q);
    greedy.push_back(argmax_action(q));
  }
  const PcaProjection projection = pca_project(points);
  CsvWriter csv(path, {"state", "pc1", "pc2", "greedy_action"},
                {std::string(kVersion) + " config_hash=" + hash_to_hex(config_hash)});
  for (std::size_t i = 0; i < states.size(); ++i) {
    csv.write_row({std::to_string(i), format_double(projection.coords[i].x()),
                   format_double(projection.coords[i].y()),
                   std::string(action_letter(greedy[i]))});
  }
}

void write_transfer_csv(const std::filesystem::path& path, const TransformCodebook& cb,
                        std::uint64_t config_hash) {
  CsvWriter csv(path, {"source_atom", "map_target_atom", "eval_target_atom", "transfer"},
                {std::string(kVersion) + " config_hash=" + hash_to_hex(config_hash)});
  for (int p = 0; p < cb.source_atoms; ++p) {
    for (int q = 0; q < cb.target_atoms; ++q) {
      for (int j = 0; j < cb.target_atoms; ++j) {
        csv.write_row({std::to_string(p), std::to_string(q), std::to_string(j),
                       format_double(cb.transfer_at(p, q, j))});
      }
    }
  }
}

}  // namespace semeq
