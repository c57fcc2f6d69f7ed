#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hf {

/**
 * Frame geometry shared by the whole signal chain.
 *
 * A frame is an M x N time-frequency grid (M subcarriers / delay bins,
 * N OFDM symbols). N_dd of the N time columns carry the delay-Doppler
 * component, the remaining N_tf carry CP-precoded OFDM symbols. The two
 * interleave with period r = N / N_dd: column k*r is a DD column, the
 * N_s = r - 1 columns after it form one OFDM slot.
 *
 * Immutable after validation; safe to share across worker threads.
 */
struct FrameGeometry {
    std::size_t M = 0;       ///< subcarrier / delay-bin count
    std::size_t N = 0;       ///< OFDM-symbol / Doppler-bin count
    std::size_t N_dd = 0;    ///< time columns occupied by the DD component
    std::size_t N_tf = 0;    ///< time columns occupied by OFDM
    std::size_t N_s = 0;     ///< consecutive OFDM symbols per slot (= r - 1)
    std::size_t L_cp = 0;    ///< CP length in samples, 0 < L_cp < M
    double delta_f = 0.0;    ///< subcarrier spacing, Hz
    double f_c = 0.0;        ///< carrier frequency, Hz

    // Derived on validation.
    std::size_t r = 0;       ///< replication factor N / N_dd
    double f_s = 0.0;        ///< sample rate M * delta_f
    double T_s = 0.0;        ///< sample period 1 / f_s

    std::size_t frame_len() const { return M * N; }
    std::size_t ofdm_symbol_len() const { return M - L_cp; }
};

/// Which frame flavor a mask (and the frames built on it) describes.
enum class FrameKind { hybrid, otfs_only, ofdm_only };

/**
 * Assignment of time columns to the two components, plus the sample index
 * range each column occupies inside the length-MN frame.
 *
 * For a hybrid frame the DD columns are {0, r, 2r, ...}; for the standalone
 * baselines one of the sets is empty and the other covers all N columns.
 */
struct OccupancyMask {
    FrameKind kind = FrameKind::hybrid;
    std::vector<std::size_t> otfs_columns;
    std::vector<std::size_t> ofdm_columns;
    std::size_t n_dd_eff = 0;  ///< |otfs_columns|; Doppler width of the DD grid
    std::size_t r_eff = 0;     ///< column spacing of the DD component (0 if none)

    bool is_otfs_column(std::size_t col) const;
    /// Sample range [first, last) of time column `col`.
    std::pair<std::size_t, std::size_t> column_range(std::size_t col, const FrameGeometry& g) const {
        return {col * g.M, (col + 1) * g.M};
    }
};

/**
 * Validates raw frame parameters and precomputes the derived fields.
 * Throws std::invalid_argument naming the violated identity:
 * N_dd + N_tf = N, N_dd * N_s = N_tf, integer replication factor,
 * 0 < L_cp < M, positive spacing/carrier.
 */
FrameGeometry validate_geometry(std::size_t M, std::size_t N, std::size_t N_dd,
                                std::size_t N_tf, std::size_t L_cp,
                                double delta_f, double f_c);

/// Re-validates an already-validated geometry (idempotence helper).
FrameGeometry validate_geometry(const FrameGeometry& g);

/// Hybrid occupancy: DD columns {k*r}, OFDM columns the complement.
OccupancyMask hybrid_mask(const FrameGeometry& g);

/// All N columns carry the DD component (r_eff = 1, no replication).
OccupancyMask standalone_otfs_mask(const FrameGeometry& g);

/// All N columns carry CP-precoded OFDM symbols.
OccupancyMask standalone_ofdm_mask(const FrameGeometry& g);

OccupancyMask mask_for(const FrameGeometry& g, FrameKind kind);

}  // namespace hf
