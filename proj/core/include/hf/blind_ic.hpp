#pragma once

#include "hf/channel.hpp"
#include "hf/grid.hpp"
#include "hf/rx_ofdm.hpp"
#include "hf/types.hpp"

#include <string>
#include <vector>

namespace hf {

/// One candidate configuration of the OFDM user: modulation order plus the
/// subset of OFDM columns it is assumed to occupy (empty = all of them).
struct Hypothesis {
    unsigned order = 16;
    std::vector<std::size_t> occupancy;
    std::string id;
};

struct HypothesisScore {
    std::string id;
    unsigned order = 0;
    double score = 0.0;
};

struct BlindResult {
    std::size_t chosen_index = 0;
    Hypothesis chosen;
    CplxVec cleaned;
    std::vector<HypothesisScore> scores;
};

/**
 * Re-modulates hard OFDM decisions through the transmit builder path and
 * returns the M x N interference grid for cancellation. Columns outside
 * `occupancy` contribute nothing. Shared by the explicit-signaling and blind
 * cancellation paths so the two stay bit-identical on matching inputs.
 */
CMat rebuild_ofdm_interference(const std::vector<OfdmSymbolEstimate>& estimates, unsigned order,
                               const FrameGeometry& g, const OccupancyMask& mask,
                               const std::vector<std::size_t>& occupancy = {});

/**
 * Hypothesis-test cancellation: for every pool entry, demodulate the OFDM
 * columns under that configuration, reconstruct its interference, and score
 * ||r - delta_r||^2 restricted to the OFDM sample positions. The minimal
 * score wins; ties break toward the lowest modulation order. Returns the
 * cleaned frame of the winner.
 */
BlindResult blind_cancel(const CplxVec& r, const ChannelRealization& ch, const FrameGeometry& g,
                         const OccupancyMask& mask, const NoiseModel& noise,
                         const std::vector<Hypothesis>& pool,
                         OfdmDopplerRef ref = OfdmDopplerRef::post_cp_start);

}  // namespace hf
