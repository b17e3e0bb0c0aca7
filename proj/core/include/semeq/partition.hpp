#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "semeq/language.hpp"
#include "semeq/types.hpp"

namespace semeq {

/// A labeled subdivision of the semantic space with empirical support.
struct Atom {
  int id = 0;
  std::vector<int> state_indices;        // positions in the enumerated state list
  std::vector<Symbol> symbols;           // noiseless encodings of the support states
  std::vector<ActionValues> q_vectors;   // action values at those symbols
  ActionValues q_centroid = ActionValues::Zero();
  std::vector<Action> action_labels;     // ascending action index
  Symbol semantic_mean = Symbol::Zero();
  Eigen::Matrix2d semantic_cov = Eigen::Matrix2d::Zero();
  std::array<int, kNumActions> action_histogram{};  // greedy action counts over support

  int support_size() const { return static_cast<int>(state_indices.size()); }
};

enum class PartitionKind { Hard, Soft };

std::string_view partition_kind_name(PartitionKind kind);

struct Partition {
  PartitionKind kind = PartitionKind::Hard;
  std::vector<Atom> atoms;
  int requested_clusters = 0;    // n_c for soft partitions, 0 for hard
  double ambiguity_epsilon = 0.15;
  std::uint64_t language_hash = 0;

  int n_atoms() const { return static_cast<int>(atoms.size()); }
};

struct KmeansResult {
  std::vector<int> assignments;
  std::vector<Eigen::VectorXd> centroids;
  double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding, `restarts` independent starts,
/// and empty-cluster repair by promoting the point farthest from its
/// centroid. Runs to an assignment fixpoint (at most 300 iterations) and
/// returns the restart with minimal within-cluster sum of squares.
/// `inertia_trace`, when given, records the inertia after every Lloyd
/// update of the first restart.
KmeansResult kmeans(const std::vector<Eigen::VectorXd>& points, int k, int restarts,
                    std::uint64_t seed, std::vector<double>* inertia_trace = nullptr);

/// One atom per greedy action occurring over the noiseless encodings of
/// `states`; every hard atom carries that single action as its label.
Partition build_hard_partition(const Language& lang, const std::vector<Observation>& states,
                               double ambiguity_epsilon = 0.15);

/// Clusters the action-value vectors of `states` with k-means (k = n_c) and
/// carries the clusters over to the semantic space. Atom labels are every
/// action whose centroid value sits within ambiguity_epsilon of the centroid
/// maximum, relative to the centroid's value range.
Partition build_soft_partition(const Language& lang, const std::vector<Observation>& states,
                               int n_c, std::uint64_t seed, double ambiguity_epsilon = 0.15,
                               int restarts = 10);

/// Probability-like weights over atoms for an action-value vector. Soft
/// partitions use normalized inverse distances to the cluster centroids;
/// hard partitions return the indicator of the atom labeled with argmax(q).
Eigen::VectorXd membership_weights(const Partition& partition, const ActionValues& q);

/// Atom id owning a (possibly transformed or noisy) semantic symbol, judged
/// by the language's action values at that symbol.
int classify_symbol(const Partition& partition, const Language& lang, const Symbol& y);

/// Mean over all support points of the fraction of their k nearest
/// neighbors (semantic-space Euclidean) that share the point's atom. A
/// shape-regularity proxy: compact atoms score higher.
double knn_same_atom_fraction(const Partition& partition, int k = 5);

struct PcaProjection {
  std::vector<Eigen::Vector2d> coords;
  Eigen::MatrixXd directions;      // one leading principal direction per column
  Eigen::VectorXd eigenvalues;     // all sample-covariance eigenvalues, descending
  double explained_fraction = 0.0; // share of total variance in the two directions
};

/// Projection onto the two leading principal directions of the sample
/// covariance. Deterministic sign convention: each direction's first nonzero
/// component is positive. Requires at least 3 points.
PcaProjection pca_project(const std::vector<Eigen::VectorXd>& points);

}  // namespace semeq
