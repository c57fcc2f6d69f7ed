#pragma once

#include "hf/grid.hpp"
#include "hf/qam.hpp"
#include "hf/types.hpp"

namespace hf {

struct ModulationOrders {
    unsigned otfs = 16;
    unsigned ofdm = 16;
};

/**
 * One assembled frame: the delay-Doppler payload, the pre-precoding OFDM
 * payload, the combined time-frequency grid and its time samples, and the
 * payload bits for BER scoring. samples == heisenberg(x) exactly.
 *
 * Power convention: unit-energy constellations plus the unitary transform
 * chain (and the 1/sqrt(r) replication scale) give every occupied time
 * column unit average sample power in expectation, for both components, so
 * no data-dependent scaling is applied anywhere. Keeping the chain strictly
 * linear is what lets the receivers invert it exactly and the interference
 * canceller re-modulate hard decisions through the identical builder path.
 */
struct HybridFrame {
    FrameGeometry geometry;
    OccupancyMask mask;
    ModulationOrders orders;

    CMat s_dd;       ///< M x n_dd_eff DD payload symbols (empty if no DD part)
    CMat s_tf_raw;   ///< (M - L_cp) x |ofdm_columns| pre-precoding payload
    CMat x;          ///< M x N combined time-frequency grid
    CplxVec samples; ///< length M*N

    CplxVec otfs_samples;  ///< DD component alone (exact zeros on OFDM columns)
    CplxVec ofdm_samples;  ///< OFDM component alone

    BitVec otfs_bits;
    BitVec ofdm_bits;
};

/// Payload sizes in bits for a mask and modulation orders.
std::size_t otfs_payload_bits(const FrameGeometry& g, const OccupancyMask& mask, unsigned order);
std::size_t ofdm_payload_bits(const FrameGeometry& g, const OccupancyMask& mask, unsigned order);

/**
 * Full mapping chain for the DD component: symbols -> Doppler replication ->
 * symplectic transform. Returns the M x N time-frequency grid with exact
 * zeros outside the DD columns.
 */
CMat otfs_component_tf(const CMat& s_dd, const FrameGeometry& g, const OccupancyMask& mask);

/**
 * Full mapping chain for the OFDM component: per-column CP precoding ->
 * time-dimension zero interpolation. The exact code path the interference
 * canceller re-runs on hard decisions.
 */
CMat ofdm_component_tf(const CMat& s_bar, const FrameGeometry& g, const OccupancyMask& mask);

/// Builds the hybrid frame from payload bits (bit counts must fill the grids
/// exactly; throws "bit-count mismatch" otherwise).
HybridFrame build_hybrid_frame(const BitVec& otfs_bits, const BitVec& ofdm_bits,
                               const FrameGeometry& g, const ModulationOrders& orders);

/// Standalone baselines: kind otfs_only fills all N columns with the DD
/// component (r_eff = 1), kind ofdm_only fills all N columns with CP-precoded
/// symbols.
HybridFrame build_standalone(FrameKind kind, const BitVec& bits, const FrameGeometry& g,
                             unsigned order);

}  // namespace hf
