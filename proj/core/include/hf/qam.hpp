#pragma once

#include "hf/types.hpp"

#include <cstdint>
#include <vector>

namespace hf {

using BitVec = std::vector<std::uint8_t>;  // one bit per entry, values 0/1

/// Bits per symbol for a supported square QAM order (4, 16, 64).
std::size_t qam_bits_per_symbol(unsigned order);

/**
 * Gray-mapped square QAM with unit average symbol energy. Bits are consumed
 * in groups of log2(order); the first half of a group selects the I level,
 * the second half the Q level, each through a reflected Gray code.
 */
CplxVec qam_map(const BitVec& bits, unsigned order);

/// Minimum-distance hard decisions (per-axis nearest level).
BitVec qam_hard_demap(const CplxVec& symbols, unsigned order);

/// Nearest constellation point (used for decision-feedback loops).
cplx qam_slice(cplx symbol, unsigned order);

/**
 * Max-log bit LLRs, log P(b=0)/P(b=1): positive LLR means bit 0. One noise
 * variance per symbol (total complex variance). The per-axis Gray structure
 * makes this exactly equal to a brute-force search over the constellation.
 */
std::vector<double> qam_llr(const CplxVec& symbols, const std::vector<double>& noise_var,
                            unsigned order);

/// LLR variant with a per-symbol amplitude scale on the constellation
/// (fading bias from an MMSE equalizer); scale 1 reduces to qam_llr.
std::vector<double> qam_llr_scaled(const CplxVec& symbols, const std::vector<double>& noise_var,
                                   const std::vector<double>& amp_scale, unsigned order);

}  // namespace hf
