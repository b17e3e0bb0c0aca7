#include "semeq/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "semeq/errors.hpp"
#include "semeq/serialize.hpp"

namespace semeq {

namespace {

constexpr double kInverseDistanceFloor = 1e-12;
constexpr int kMaxLloydIterations = 300;

std::vector<Eigen::VectorXd> kmeanspp_init(const std::vector<Eigen::VectorXd>& points, int k,
                                           Rng& rng) {
  std::vector<Eigen::VectorXd> centroids;
  centroids.reserve(k);
  centroids.push_back(points[uniform_below(rng, points.size())]);
  std::vector<double> dist_sq(points.size(), 0.0);
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) {
        best = std::min(best, (points[i] - c).squaredNorm());
      }
      dist_sq[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double threshold = uniform01(rng) * total;
      double cumulative = 0.0;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        cumulative += dist_sq[i];
        if (cumulative > threshold) {
          pick = i;
          break;
        }
      }
    } else {
      pick = uniform_below(rng, points.size());
    }
    centroids.push_back(points[pick]);
  }
  return centroids;
}

int nearest_centroid(const Eigen::VectorXd& point, const std::vector<Eigen::VectorXd>& centroids) {
  int best = 0;
  double best_d = (point - centroids[0]).squaredNorm();
  for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
    const double d = (point - centroids[c]).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double within_cluster_ss(const std::vector<Eigen::VectorXd>& points,
                         const std::vector<int>& assignments,
                         const std::vector<Eigen::VectorXd>& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += (points[i] - centroids[assignments[i]]).squaredNorm();
  }
  return total;
}

KmeansResult run_lloyd(const std::vector<Eigen::VectorXd>& points, int k, Rng& rng,
                       std::vector<double>* inertia_trace) {
  KmeansResult result;
  result.centroids = kmeanspp_init(points, k, rng);
  result.assignments.assign(points.size(), -1);

  std::vector<int> counts(k, 0);
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    std::vector<int> next(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      next[i] = nearest_centroid(points[i], result.centroids);
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (int a : next) ++counts[a];

    // Empty-cluster repair: promote the point farthest from its centroid.
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      double worst = -1.0;
      std::size_t worst_i = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (counts[next[i]] <= 1) continue;
        const double d = (points[i] - result.centroids[next[i]]).squaredNorm();
        if (d > worst) {
          worst = d;
          worst_i = i;
        }
      }
      if (worst < 0.0) break;  // nothing movable
      --counts[next[worst_i]];
      next[worst_i] = c;
      ++counts[c];
      result.centroids[c] = points[worst_i];
    }

    const bool converged = (next == result.assignments);
    result.assignments = std::move(next);
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(points[0].size());
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (result.assignments[i] == c) sum += points[i];
      }
      result.centroids[c] = sum / counts[c];
    }
    if (inertia_trace != nullptr) {
      inertia_trace->push_back(within_cluster_ss(points, result.assignments, result.centroids));
    }
    if (converged) break;
  }
  result.inertia = within_cluster_ss(points, result.assignments, result.centroids);
  return result;
}

void accumulate_atom_stats(Atom& atom, bool centroid_from_members) {
  const int n = atom.support_size();
  ActionValues q_sum = ActionValues::Zero();
  Symbol mean = Symbol::Zero();
  for (int i = 0; i < n; ++i) {
    q_sum += atom.q_vectors[i];
    mean += atom.symbols[i];
    ++atom.action_histogram[static_cast<int>(argmax_action(atom.q_vectors[i]))];
  }
  mean /= n;
  atom.semantic_mean = mean;
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  if (n >= 2) {
    for (int i = 0; i < n; ++i) {
      const Symbol d = atom.symbols[i] - mean;
      cov += d * d.transpose();
    }
    cov /= (n - 1);
  }
  atom.semantic_cov = cov;
  if (centroid_from_members) {
    atom.q_centroid = q_sum / n;
  }
}

std::vector<Action> labels_from_centroid(const ActionValues& centroid, double epsilon) {
  const double max_q = centroid.maxCoeff();
  const double min_q = centroid.minCoeff();
  const double slack = epsilon * (max_q - min_q);
  std::vector<Action> labels;
  for (int a = 0; a < kNumActions; ++a) {
    if (max_q - centroid(a) <= slack) labels.push_back(static_cast<Action>(a));
  }
  return labels;
}

}  // namespace

std::string_view partition_kind_name(PartitionKind kind) {
  return kind == PartitionKind::Hard ? "hard" : "soft";
}

KmeansResult kmeans(const std::vector<Eigen::VectorXd>& points, int k, int restarts,
                    std::uint64_t seed, std::vector<double>* inertia_trace) {
  if (points.empty()) throw UsageError("kmeans: no points");
  if (k < 1 || k > static_cast<int>(points.size())) {
    throw UsageError("kmeans: k must be in [1, number of points]");
  }
  if (restarts < 1) throw UsageError("kmeans: restarts must be >= 1");
  for (const auto& p : points) {
    if (p.size() != points[0].size()) throw UsageError("kmeans: mixed point dimensions");
  }

  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(seed, "kmeans/restart/" + std::to_string(r));
    KmeansResult candidate =
        run_lloyd(points, k, rng, (r == 0) ? inertia_trace : nullptr);
    if (candidate.inertia < best.inertia) {
      best = std::move(candidate);
    }
  }
  return best;
}

Partition build_hard_partition(const Language& lang, const std::vector<Observation>& states,
                               double ambiguity_epsilon) {
  if (states.empty()) throw UsageError("build_hard_partition: no states");

  std::vector<std::vector<int>> members(kNumActions);
  std::vector<Symbol> symbols(states.size());
  std::vector<ActionValues> qs(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    symbols[i] = encode(lang, states[i]);
    qs[i] = action_values(lang, symbols[i]);
    members[static_cast<int>(argmax_action(qs[i]))].push_back(static_cast<int>(i));
  }

  Partition partition;
  partition.kind = PartitionKind::Hard;
  partition.requested_clusters = 0;
  partition.ambiguity_epsilon = ambiguity_epsilon;
  partition.language_hash = language_hash(lang);
  for (int a = 0; a < kNumActions; ++a) {
    if (members[a].empty()) continue;
    Atom atom;
    atom.id = partition.n_atoms();
    atom.action_labels = {static_cast<Action>(a)};
    for (int idx : members[a]) {
      atom.state_indices.push_back(idx);
      atom.symbols.push_back(symbols[idx]);
      atom.q_vectors.push_back(qs[idx]);
    }
    accumulate_atom_stats(atom, /*centroid_from_members=*/true);
    partition.atoms.push_back(std::move(atom));
  }
  return partition;
}

Partition build_soft_partition(const Language& lang, const std::vector<Observation>& states,
                               int n_c, std::uint64_t seed, double ambiguity_epsilon,
                               int restarts) {
  if (states.empty()) throw UsageError("build_soft_partition: no states");
  if (n_c < 2) throw UsageError("build_soft_partition: n_c must be >= 2");
  if (n_c > static_cast<int>(states.size())) {
    throw UsageError("build_soft_partition: n_c exceeds the number of states");
  }

  std::vector<Symbol> symbols(states.size());
  std::vector<ActionValues> qs(states.size());
  std::vector<Eigen::VectorXd> points(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    symbols[i] = encode(lang, states[i]);
    qs[i] = action_values(lang, symbols[i]);
    points[i] = qs[i];
  }

  const KmeansResult clusters = kmeans(points, n_c, restarts, seed);

  std::vector<std::vector<int>> members(n_c);
  for (std::size_t i = 0; i < points.size(); ++i) {
    members[clusters.assignments[i]].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < n_c; ++c) {
    if (members[c].empty()) {
      throw Error("build_soft_partition: empty cluster survived repair");
    }
  }

  // Canonical atom order: lexicographically by cluster centroid, so the
  // partition does not depend on the k-means seeding path.
  std::vector<int> order(n_c);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = clusters.centroids[a];
    const auto& cb = clusters.centroids[b];
    for (Eigen::Index d = 0; d < ca.size(); ++d) {
      if (ca(d) != cb(d)) return ca(d) < cb(d);
    }
    return members[a].front() < members[b].front();
  });

  Partition partition;
  partition.kind = PartitionKind::Soft;
  partition.requested_clusters = n_c;
  partition.ambiguity_epsilon = ambiguity_epsilon;
  partition.language_hash = language_hash(lang);
  for (int rank = 0; rank < n_c; ++rank) {
    const int c = order[rank];
    Atom atom;
    atom.id = rank;
    atom.q_centroid = clusters.centroids[c];
    for (int idx : members[c]) {
      atom.state_indices.push_back(idx);
      atom.symbols.push_back(symbols[idx]);
      atom.q_vectors.push_back(qs[idx]);
    }
    atom.action_labels = labels_from_centroid(atom.q_centroid, ambiguity_epsilon);
    accumulate_atom_stats(atom, /*centroid_from_members=*/false);
    partition.atoms.push_back(std::move(atom));
  }
  return partition;
}

namespace {

int hard_atom_for_action(const Partition& partition, Action action) {
  for (const Atom& atom : partition.atoms) {
    if (atom.action_labels.size() == 1 && atom.action_labels[0] == action) {
      return atom.id;
    }
  }
  return -1;
}

int nearest_atom(const Partition& partition, const ActionValues& q) {
  int best = 0;
  double best_d = (q - partition.atoms[0].q_centroid).squaredNorm();
  for (int i = 1; i < partition.n_atoms(); ++i) {
    const double d = (q - partition.atoms[i].q_centroid).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

Eigen::VectorXd membership_weights(const Partition& partition, const ActionValues& q) {
  if (partition.atoms.empty()) throw UsageError("membership_weights: empty partition");
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(partition.n_atoms());
  if (partition.kind == PartitionKind::Hard) {
    int atom = hard_atom_for_action(partition, argmax_action(q));
    if (atom < 0) atom = nearest_atom(partition, q);  // action never occurred at build time
    weights(atom) = 1.0;
    return weights;
  }
  for (int i = 0; i < partition.n_atoms(); ++i) {
    const double d = (q - partition.atoms[i].q_centroid).norm();
    weights(i) = 1.0 / (d + kInverseDistanceFloor);
  }
  weights /= weights.sum();
  return weights;
}

int classify_symbol(const Partition& partition, const Language& lang, const Symbol& y) {
  if (partition.atoms.empty()) throw UsageError("classify_symbol: empty partition");
  const ActionValues q = action_values(lang, y);
  if (partition.kind == PartitionKind::Hard) {
    const int atom = hard_atom_for_action(partition, argmax_action(q));
    if (atom >= 0) return atom;
  }
  return nearest_atom(partition, q);
}

double knn_same_atom_fraction(const Partition& partition, int k) {
  std::vector<Symbol> points;
  std::vector<int> owner;
  for (const Atom& atom : partition.atoms) {
    for (const Symbol& s : atom.symbols) {
      points.push_back(s);
      owner.push_back(atom.id);
    }
  }
  const int n = static_cast<int>(points.size());
  if (n < 2) throw UsageError("knn_same_atom_fraction: need at least 2 support points");
  k = std::min(k, n - 1);

  double total = 0.0;
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      dist[j] = {(points[i] - points[j]).squaredNorm(), j};
    }
    dist[i].first = std::numeric_limits<double>::infinity();  // exclude self
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    int same = 0;
    for (int j = 0; j < k; ++j) {
      if (owner[dist[j].second] == owner[i]) ++same;
    }
    total += static_cast<double>(same) / k;
  }
  return total / n;
}

}  // namespace semeq
