#include "semeq/equalizer.hpp"
#include "semeq/errors.hpp"

namespace semeq {

EpisodeResult equalized_episode(const Language& source_lang, const Language& target_lang,
                                const Partition* source_partition,
                                const Partition* target_partition, const TransformCodebook* cb,
                                SelectionPolicy policy, const GridConfig& grid,
                                const ChannelConfig& channel, double gamma, Rng& rng) {
  if (policy != SelectionPolicy::Identity &&
      (source_partition == nullptr || target_partition == nullptr || cb == nullptr)) {
    throw UsageError("equalized_episode: policy requires partitions and a codebook");
  }

  Episode episode(grid);
  Observation obs = episode.reset(rng);
  EpisodeResult result;
  double discount = 1.0;
  while (!episode.done()) {
    Symbol x = encode(source_lang, obs);
    if (policy != SelectionPolicy::Identity) {
      const ActionValues source_q = action_values(source_lang, x);
      const Eigen::VectorXd weights = membership_weights(*source_partition, source_q);
      int map_index;
      if (policy == SelectionPolicy::Semantic) {
        map_index = select_map_semantic(*cb, weights);
      } else {
        // Evaluation idealization: the target language's view of the current
        // observation is computed transmitter-side from the target checkpoint.
        const ActionValues obs_q = action_values(target_lang, encode(target_lang, obs));
        Eigen::VectorXd values(target_partition->n_atoms());
        for (int j = 0; j < target_partition->n_atoms(); ++j) {
          values(j) = atom_q_value(target_partition->atoms[j], obs_q);
        }
        map_index = select_map_effectiveness(*cb, weights, values);
      }
      x = cb->maps[map_index](x);
    }
    const Symbol y = transmit(x, channel, rng);
    const auto step = episode.step(greedy_action(target_lang, y));
    result.discounted_return += discount * step.reward;
    discount *= gamma;
    obs = step.obs;
  }
  result.steps = episode.steps();
  result.success = (obs.agent == obs.treasure);
  return result;
}

EpisodeResult matched_episode(const Language& lang, const GridConfig& grid,
                              const ChannelConfig& channel, double gamma, Rng& rng) {
  return equalized_episode(lang, lang, nullptr, nullptr, nullptr, SelectionPolicy::Identity, grid,
                           channel, gamma, rng);
}

}  // namespace semeq
