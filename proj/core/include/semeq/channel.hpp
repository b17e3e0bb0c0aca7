#pragma once

#include "semeq/rng.hpp"
#include "semeq/types.hpp"

namespace semeq {

struct ChannelConfig {
  double snr_db = 5.0;
};

/// SNR values at or above this are treated as a noiseless channel.
inline constexpr double kNoiselessSnrDb = 200.0;

/// Total noise power 10^(-snr_db/10) against unit signal power; 0 in the
/// noiseless regime.
double noise_power(const ChannelConfig& config);

/// Adds zero-mean Gaussian noise with variance noise_power/2 per real
/// dimension: the 2-D symbol is treated as one unit-power complex symbol.
Symbol transmit(const Symbol& x, const ChannelConfig& config, Rng& rng);

}  // namespace semeq
