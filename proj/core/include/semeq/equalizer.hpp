#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "semeq/channel.hpp"
#include "semeq/gridworld.hpp"
#include "semeq/language.hpp"
#include "semeq/partition.hpp"
#include "semeq/rng.hpp"
#include "semeq/types.hpp"

namespace semeq {

/// Affine transformation of the semantic plane, x -> linear*x + offset.
struct AffineMap {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();

  Symbol operator()(const Symbol& x) const { return linear * x + offset; }
  static AffineMap identity() { return {}; }
};

/// Closed-form optimal-transport map between Gaussian approximations of two
/// atoms' empirical semantic distributions:
///   T(x) = m_t + A (x - m_s),
///   A = S^{-1/2} (S^{1/2} Sigma_t S^{1/2})^{1/2} S^{-1/2},  S = Sigma_s.
/// Covariances are regularized with +1e-6 I. A is symmetric positive
/// definite; throws NumericalError if a covariance stays singular.
AffineMap fit_atom_map(const Atom& source, const Atom& target);

/// Optional channel-noise jitter for transfer estimation: each support point
/// is perturbed `samples_per_point` times at `snr_db` before the map is
/// applied. Zero keeps the estimate noiseless and deterministic.
struct TransferJitter {
  int samples_per_point = 0;
  double snr_db = 5.0;
};

/// Fraction of the source atom's support that `map` lands in each target
/// atom (indexed by atom id). Entries are nonnegative and sum to 1.
Eigen::VectorXd transfer_distribution(const AffineMap& map, const Atom& source,
                                      const Partition& target_partition,
                                      const Language& target_lang,
                                      const TransferJitter& jitter = {}, Rng* rng = nullptr);

/// Fraction of the source atom's mass that `map` carries into the given
/// target atom; the information-transfer score of the map for this pair.
double estimate_transfer(const AffineMap& map, const Atom& source, int target_atom_id,
                         const Partition& target_partition, const Language& target_lang,
                         const TransferJitter& jitter = {}, Rng* rng = nullptr);

/// How source atoms are matched to target atoms when the two partitions are
/// not of the same kind.
enum class MixedCorrespondence { NearestCentroid, LabelIntersection };

/// The fitted maps for every (source atom, target atom) pair plus cached
/// transfer estimates and the source->target atom correspondence.
///
/// maps[p * target_atoms + q] is the map fitted for pair (p, q);
/// transfer[(p * target_atoms + q) * target_atoms + j] is the fraction of
/// atom p's mass that this map lands in target atom j.
struct TransformCodebook {
  int source_atoms = 0;
  int target_atoms = 0;
  std::vector<AffineMap> maps;
  std::vector<double> transfer;
  std::vector<int> correspondence;  // one target atom per source atom
  std::uint64_t source_partition_hash = 0;
  std::uint64_t target_partition_hash = 0;

  int map_count() const { return source_atoms * target_atoms; }
  const AffineMap& map(int p, int q) const { return maps[p * target_atoms + q]; }
  double transfer_at(int p, int q, int j) const {
    return transfer[(static_cast<std::size_t>(p) * target_atoms + q) * target_atoms + j];
  }
};

/// Fits all J_s * J_t maps, fills the transfer tensor, and derives the atom
/// correspondence: matching action labels for hard/hard pairs, nearest
/// action-value centroid otherwise (LabelIntersection first when requested).
TransformCodebook build_codebook(const Language& source_lang, const Partition& source_partition,
                                 const Language& target_lang, const Partition& target_partition,
                                 const TransferJitter& jitter = {}, std::uint64_t seed = 0,
                                 MixedCorrespondence mixed = MixedCorrespondence::NearestCentroid);

/// Semantic-alignment selection: maximizes, over the codebook, the weighted
/// transferred mass into the corresponding target atom. Each map is scored
/// on its fitted source atom, weights[p] * transfer(p->kappa(p)). Returns
/// the map index; ties break toward the lowest (source, target) pair.
int select_map_semantic(const TransformCodebook& cb, const Eigen::VectorXd& weights);

/// Effectiveness selection: maximizes the weighted transferred mass into
/// target atoms scored by their action value for the current observation,
/// weights[p] * sum_j transfer(p,q,j) * target_atom_values[j].
int select_map_effectiveness(const TransformCodebook& cb, const Eigen::VectorXd& weights,
                             const Eigen::VectorXd& target_atom_values);

/// Average of obs_q over the atom's greedy-action histogram: the atom-level
/// action value of the current observation.
double atom_q_value(const Atom& target_atom, const ActionValues& obs_q);

enum class SelectionPolicy { Semantic, Effectiveness, Identity };

struct EpisodeResult {
  bool success = false;
  int steps = 0;
  double discounted_return = 0.0;
};

/// One cross-language episode: the source language encodes, a codebook map
/// chosen by the policy transforms the symbol, the channel perturbs it, and
/// the target language decodes greedily. Identity bypasses the codebook
/// (partitions and codebook may then be null).
EpisodeResult equalized_episode(const Language& source_lang, const Language& target_lang,
                                const Partition* source_partition,
                                const Partition* target_partition, const TransformCodebook* cb,
                                SelectionPolicy policy, const GridConfig& grid,
                                const ChannelConfig& channel, double gamma, Rng& rng);

/// Same-language baseline episode.
EpisodeResult matched_episode(const Language& lang, const GridConfig& grid,
                              const ChannelConfig& channel, double gamma, Rng& rng);

}  // namespace semeq
