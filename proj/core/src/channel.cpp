#include "semeq/channel.hpp"

#include <cmath>

namespace semeq {

double noise_power(const ChannelConfig& config) {
  if (config.snr_db >= kNoiselessSnrDb) return 0.0;
  return std::pow(10.0, -config.snr_db / 10.0);
}

Symbol transmit(const Symbol& x, const ChannelConfig& config, Rng& rng) {
  const double power = noise_power(config);
  if (power == 0.0) return x;
  const double sigma = std::sqrt(power / 2.0);
  const auto [n0, n1] = gaussian_pair(rng);
  return {x.x() + sigma * n0, x.y() + sigma * n1};
}

}  // namespace semeq
