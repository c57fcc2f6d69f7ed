#pragma once

#include "hf/channel.hpp"
#include "hf/grid.hpp"
#include "hf/types.hpp"

#include <vector>

namespace hf {

/**
 * Single-tap MMSE estimate of one OFDM symbol. soft_symbols are the raw
 * Eq-style MMSE outputs (biased toward zero by |h|^2/(|h|^2+sigma^2));
 * post_eq_noise_var is the variance of that output and mmse_bias the shrink
 * factor, which together calibrate the soft demapper.
 */
struct OfdmSymbolEstimate {
    CplxVec soft_symbols;                 ///< length M - L_cp
    std::vector<double> post_eq_noise_var;  ///< sigma^2 |h|^2 / (|h|^2 + sigma^2)^2
    std::vector<double> mmse_bias;          ///< |h|^2 / (|h|^2 + sigma^2)
    std::size_t symbol_index = 0;
};

/// Doppler time reference used inside the per-symbol frequency response.
enum class OfdmDopplerRef { post_cp_start, mid_symbol };

/**
 * CP removal, size-(M-L_cp) DFT, per-bin MMSE division. r_n is the received
 * M-sample block; h_n the per-bin response from ofdm_freq_response (its
 * length fixes M - L_cp).
 */
OfdmSymbolEstimate detect_ofdm_symbol(const CplxVec& r_n, const CplxVec& h_n,
                                      const NoiseModel& noise, std::size_t symbol_index = 0);

/**
 * Slices every OFDM column out of the received frame and runs the single-tap
 * detector with that column's own frequency response. Validates that the CP
 * covers the channel delay spread.
 */
std::vector<OfdmSymbolEstimate> detect_ofdm_frame(const CplxVec& r, const ChannelRealization& ch,
                                                  const FrameGeometry& g, const OccupancyMask& mask,
                                                  const NoiseModel& noise,
                                                  OfdmDopplerRef ref = OfdmDopplerRef::post_cp_start);

/// Frequency response with a selectable Doppler time reference (the default
/// post-CP start keeps the static case bit-exact; mid-symbol halves the
/// intra-symbol phase drift under Doppler).
CplxVec ofdm_freq_response_ref(const ChannelRealization& ch, std::size_t symbol_index,
                               const FrameGeometry& g, OfdmDopplerRef ref);

}  // namespace hf
