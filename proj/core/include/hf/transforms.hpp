#pragma once

#include "hf/grid.hpp"
#include "hf/types.hpp"

namespace hf {

enum class DftDirection { forward, inverse };

/**
 * Unitary DFT of arbitrary length (1/sqrt(K) scaling both directions, so
 * forward o inverse = identity and Parseval holds exactly). Power-of-two
 * lengths run radix-2 in place; other lengths go through Bluestein's
 * algorithm. This is the single convention carrier for every F_M / F_N in
 * the signal chain.
 */
CplxVec unitary_dft(const CplxVec& x, DftDirection dir);

/// In-place variant over a raw range (len >= 1).
void unitary_dft_inplace(cplx* data, std::size_t len, DftDirection dir);

/**
 * Doppler-dimension replication: tiles the M x N_dd grid r times along the
 * column axis with a 1/sqrt(r) scale, so the replicated grid carries the
 * same energy as the input. Column j of the output is column (j mod N_dd)
 * of the input. Inverse-DFT'ing the output rows concentrates the spectrum
 * on the multiples-of-r columns, which is what frees the in-between time
 * columns for OFDM.
 */
CMat replicate_doppler(const CMat& s_dd, const FrameGeometry& g);

/// Variant for an arbitrary replication factor (used by standalone frames, r=1).
CMat replicate_doppler(const CMat& s_dd, std::size_t r);

enum class IsfftDirection { dd_to_tf, tf_to_dd };

/**
 * Symplectic transform pair between the delay-Doppler and time-frequency
 * grids: dd_to_tf computes F_M * X * F_N^H, tf_to_dd computes
 * F_M^H * X * F_N. Both factors unitary; the two directions invert each
 * other exactly.
 */
CMat isfft(const CMat& grid_in, IsfftDirection dir);

enum class HeisenbergDirection { tf_to_time, time_to_tf };

/**
 * Per-column transform between the time-frequency grid and time samples
 * (rectangular pulse, so no windowing): tf_to_time applies the inverse
 * unitary size-M DFT to each column and concatenates column-major;
 * time_to_tf (the Wigner direction) inverts it.
 */
CplxVec heisenberg_tf_to_time(const CMat& x_tf);
CMat heisenberg_time_to_tf(const CplxVec& samples, const FrameGeometry& g);

/**
 * Time-dimension zero interpolation: copies the M x N_tf input columns in
 * order into the OFDM columns of an M x N grid and leaves the DD columns
 * zero. Equals S_tf * (I_{N_dd} (x) [0_{N_s x 1}, I_{N_s}]).
 */
CMat interpolate_time_zeros(const CMat& s_tf, const FrameGeometry& g, const OccupancyMask& mask);

/**
 * CP-embedding precoder: x = F_M * B_cp * F_{M-L_cp}^H * s_bar, where B_cp
 * prepends the last L_cp entries. The size-M inverse DFT of the output is
 * a CP-prefixed time block whose trailing M-L_cp samples are the OFDM
 * user's own size-(M-L_cp) inverse DFT of s_bar.
 */
struct CpPrecoder {
    std::size_t M = 0;
    std::size_t L_cp = 0;
    std::size_t payload_len() const { return M - L_cp; }
};

CpPrecoder make_cp_precoder(const FrameGeometry& g);

/// s_bar has length M - L_cp; returns the length-M frequency-domain column.
CplxVec cp_precode(const CplxVec& s_bar, const CpPrecoder& p);

/// Discards the first L_cp samples of a length-M time block (the left
/// inverse of B_cp).
CplxVec cp_remove(const CplxVec& r_n, const CpPrecoder& p);

}  // namespace hf
