#include "semeq/equalizer.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "semeq/errors.hpp"
#include "semeq/serialize.hpp"

namespace semeq {

namespace {

constexpr double kCovRegularization = 1e-6;
constexpr double kSingularDetFloor = 1e-12;

Eigen::Matrix2d symmetric_sqrt(const Eigen::Matrix2d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m);
  Eigen::Vector2d values = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * values.cwiseSqrt().asDiagonal() *
         solver.eigenvectors().transpose();
}

Eigen::Matrix2d symmetric_inv_sqrt(const Eigen::Matrix2d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(m);
  const Eigen::Vector2d values = solver.eigenvalues();
  if (values.minCoeff() <= kSingularDetFloor) {
    throw NumericalError("fit_atom_map: singular covariance after regularization");
  }
  return solver.eigenvectors() * values.cwiseSqrt().cwiseInverse().asDiagonal() *
         solver.eigenvectors().transpose();
}

}  // namespace

AffineMap fit_atom_map(const Atom& source, const Atom& target) {
  if (source.support_size() < 3 || target.support_size() < 3) {
    throw UsageError("fit_atom_map: both atoms need at least 3 support points");
  }
  const Eigen::Matrix2d reg = kCovRegularization * Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d cov_s = source.semantic_cov + reg;
  const Eigen::Matrix2d cov_t = target.semantic_cov + reg;

  const Eigen::Matrix2d sqrt_s = symmetric_sqrt(cov_s);
  const Eigen::Matrix2d inv_sqrt_s = symmetric_inv_sqrt(cov_s);
  const Eigen::Matrix2d inner = symmetric_sqrt(sqrt_s * cov_t * sqrt_s);

  AffineMap map;
  map.linear = inv_sqrt_s * inner * inv_sqrt_s;
  // Symmetrize away the eigendecomposition round-off.
  map.linear = 0.5 * (map.linear + map.linear.transpose().eval());
  if (std::abs(map.linear.determinant()) <= kSingularDetFloor) {
    throw NumericalError("fit_atom_map: transport matrix is singular");
  }
  map.offset = target.semantic_mean - map.linear * source.semantic_mean;
  return map;
}

Eigen::VectorXd transfer_distribution(const AffineMap& map, const Atom& source,
                                      const Partition& target_partition,
                                      const Language& target_lang, const TransferJitter& jitter,
                                      Rng* rng) {
  if (source.support_size() == 0) {
    throw UsageError("transfer_distribution: source atom has empty support");
  }
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(target_partition.n_atoms());
  long long total = 0;
  if (jitter.samples_per_point > 0) {
    if (rng == nullptr) {
      throw UsageError("transfer_distribution: jitter requires a random stream");
    }
    const ChannelConfig noise{jitter.snr_db};
    for (const Symbol& x : source.symbols) {
      for (int s = 0; s < jitter.samples_per_point; ++s) {
        const Symbol jittered = transmit(x, noise, *rng);
        ++counts(classify_symbol(target_partition, target_lang, map(jittered)));
        ++total;
      }
    }
  } else {
    for (const Symbol& x : source.symbols) {
      ++counts(classify_symbol(target_partition, target_lang, map(x)));
      ++total;
    }
  }
  return counts / static_cast<double>(total);
}

double estimate_transfer(const AffineMap& map, const Atom& source, int target_atom_id,
                         const Partition& target_partition, const Language& target_lang,
                         const TransferJitter& jitter, Rng* rng) {
  if (target_atom_id < 0 || target_atom_id >= target_partition.n_atoms()) {
    throw UsageError("estimate_transfer: target atom id out of range");
  }
  return transfer_distribution(map, source, target_partition, target_lang, jitter,
                               rng)(target_atom_id);
}

namespace {

int nearest_centroid_atom(const Partition& partition, const ActionValues& q) {
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

int correspondence_for(const Atom& source_atom, const Partition& source_partition,
                       const Partition& target_partition, MixedCorrespondence mixed) {
  const bool both_hard = source_partition.kind == PartitionKind::Hard &&
                         target_partition.kind == PartitionKind::Hard;
  if (both_hard) {
    for (const Atom& candidate : target_partition.atoms) {
      if (candidate.action_labels == source_atom.action_labels) return candidate.id;
    }
    return nearest_centroid_atom(target_partition, source_atom.q_centroid);
  }
  const bool mixed_kinds = source_partition.kind != target_partition.kind;
  if (mixed_kinds && mixed == MixedCorrespondence::LabelIntersection) {
    int best = -1;
    std::size_t best_overlap = 0;
    for (const Atom& candidate : target_partition.atoms) {
      std::size_t overlap = 0;
      for (Action a : source_atom.action_labels) {
        for (Action b : candidate.action_labels) {
          if (a == b) ++overlap;
        }
      }
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = candidate.id;
      }
    }
    if (best >= 0) return best;
  }
  return nearest_centroid_atom(target_partition, source_atom.q_centroid);
}

}  // namespace

TransformCodebook build_codebook(const Language& source_lang, const Partition& source_partition,
                                 const Language& target_lang, const Partition& target_partition,
                                 const TransferJitter& jitter, std::uint64_t seed,
                                 MixedCorrespondence mixed) {
  (void)source_lang;
  if (source_partition.atoms.empty() || target_partition.atoms.empty()) {
    throw UsageError("build_codebook: empty partition");
  }
  TransformCodebook cb;
  cb.source_atoms = source_partition.n_atoms();
  cb.target_atoms = target_partition.n_atoms();
  cb.maps.resize(static_cast<std::size_t>(cb.source_atoms) * cb.target_atoms);
  cb.transfer.assign(
      static_cast<std::size_t>(cb.source_atoms) * cb.target_atoms * cb.target_atoms, 0.0);
  cb.source_partition_hash = partition_hash(source_partition);
  cb.target_partition_hash = partition_hash(target_partition);

  for (int p = 0; p < cb.source_atoms; ++p) {
    for (int q = 0; q < cb.target_atoms; ++q) {
      AffineMap map;
      try {
        map = fit_atom_map(source_partition.atoms[p], target_partition.atoms[q]);
      } catch (const Error& e) {
        throw NumericalError("build_codebook: fit failed for pair (" + std::to_string(p) + "," +
                             std::to_string(q) + "): " + e.what());
      }
      cb.maps[static_cast<std::size_t>(p) * cb.target_atoms + q] = map;
      Rng rng = make_rng(seed, "codebook/transfer/" + std::to_string(p) + "/" + std::to_string(q));
      const Eigen::VectorXd row =
          transfer_distribution(map, source_partition.atoms[p], target_partition, target_lang,
                                jitter, jitter.samples_per_point > 0 ? &rng : nullptr);
      for (int j = 0; j < cb.target_atoms; ++j) {
        cb.transfer[(static_cast<std::size_t>(p) * cb.target_atoms + q) * cb.target_atoms + j] =
            row(j);
      }
    }
  }

  cb.correspondence.resize(cb.source_atoms);
  for (int p = 0; p < cb.source_atoms; ++p) {
    cb.correspondence[p] =
        correspondence_for(source_partition.atoms[p], source_partition, target_partition, mixed);
  }
  return cb;
}

namespace {

void validate_weights(const TransformCodebook& cb, const Eigen::VectorXd& weights) {
  if (weights.size() != cb.source_atoms) {
    throw UsageError("selection policy: weight vector length mismatch");
  }
  if (weights.minCoeff() < 0.0 || std::abs(weights.sum() - 1.0) > 1e-6) {
    throw UsageError("selection policy: weights must be nonnegative and sum to 1");
  }
}

}  // namespace

int select_map_semantic(const TransformCodebook& cb, const Eigen::VectorXd& weights) {
  validate_weights(cb, weights);
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < cb.source_atoms; ++p) {
    for (int q = 0; q < cb.target_atoms; ++q) {
      const double score = weights(p) * cb.transfer_at(p, q, cb.correspondence[p]);
      if (score > best_score) {
        best_score = score;
        best = p * cb.target_atoms + q;
      }
    }
  }
  return best;
}

int select_map_effectiveness(const TransformCodebook& cb, const Eigen::VectorXd& weights,
                             const Eigen::VectorXd& target_atom_values) {
  validate_weights(cb, weights);
  if (target_atom_values.size() != cb.target_atoms) {
    throw UsageError("select_map_effectiveness: target value vector length mismatch");
  }
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < cb.source_atoms; ++p) {
    for (int q = 0; q < cb.target_atoms; ++q) {
      double transported = 0.0;
      for (int j = 0; j < cb.target_atoms; ++j) {
        transported += cb.transfer_at(p, q, j) * target_atom_values(j);
      }
      const double score = weights(p) * transported;
      if (score > best_score) {
        best_score = score;
        best = p * cb.target_atoms + q;
      }
    }
  }
  return best;
}

double atom_q_value(const Atom& target_atom, const ActionValues& obs_q) {
  const int n = target_atom.support_size();
  if (n == 0) throw UsageError("atom_q_value: empty atom");
  double total = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    total += target_atom.action_histogram[a] * obs_q(a);
  }
  return total / n;
}

}  // namespace semeq
