#pragma once

#include "hf/channel.hpp"
#include "hf/grid.hpp"
#include "hf/types.hpp"

#include <vector>

namespace hf {

enum class OtfsMethod { tfds, tdic };

struct DdDiagnostics {
    double residual_interference_energy = 0.0;  ///< receiver-side proxy, see module docs
    int iterations = 0;
    bool converged = true;
};

/// Equalized delay-Doppler observations, M x n_dd, plus per-delay-row noise
/// variance estimates for soft demapping.
struct DdEstimate {
    CMat y_dd;
    OtfsMethod method = OtfsMethod::tfds;
    DdDiagnostics diag;
    std::vector<double> noise_var_rows;  ///< length M, variance per delay row
};

/**
 * Element-wise time-frequency MMSE (the low-complexity separation step):
 * Y_hat = (H_tf^* o (F_M R)) / (|H_tf|^2 + sigma^2) with R the M x N
 * time-sample matrix of the received frame.
 */
CMat tfds_equalize(const CplxVec& r, const CMat& h_tf, const NoiseModel& noise);

/**
 * Drops the OFDM columns of an equalized TF grid, transforms to the DD
 * domain, and collapses the r-fold Doppler periodicity to M x n_dd (bins
 * [0, n_dd), rescaled by sqrt(r) to undo the replication scaling).
 */
DdEstimate tfds_extract_dd(const CMat& y_hat, const FrameGeometry& g, const OccupancyMask& mask,
                           const NoiseModel& noise);

/**
 * Time-domain interference cancellation: subtracts H_t applied to the
 * re-modulated OFDM component. x_tf_hat must come from the same builder
 * path as the transmitter (hard decisions -> CP precode -> per-column
 * normalization), i.e. ofdm_component_tf output.
 */
CplxVec tdic_cancel(const CplxVec& r, const SparseHt& H_t, const CMat& x_tf_hat,
                    const FrameGeometry& g, const OccupancyMask& mask);

/// Plain (unequalized) DD transform of a cleaned frame, tfds_extract_dd-style;
/// the usual input to the detectors' sanity checks.
CMat dd_transform(const CplxVec& frame, const FrameGeometry& g, const OccupancyMask& mask);

/**
 * Matrix-free linear operator from the M x n_dd DD payload to the received
 * samples at the DD columns' positions, with the transmit chain and the
 * channel taps folded in. The per-tap structure stays separable: the DD
 * component's time samples are the row-wise inverse DFT of the DD grid, and
 * each tap contributes a delay shift with a Doppler phase that factors over
 * (column, row). Cross-column coupling exists only at r_eff = 1, where DD
 * columns are adjacent in time.
 */
class EffectiveChannel {
public:
    EffectiveChannel(const ChannelRealization& ch, const FrameGeometry& g,
                     const OccupancyMask& mask);

    /// y = A x (x: M x n_dd DD symbols; y: M x n_dd received samples).
    CMat apply(const CMat& x_dd) const;
    /// x = A^H y.
    CMat adjoint(const CMat& y) const;

    /// Sum of |gain|^2 over the taps that actually reach delay row m
    /// (used for per-row SNR bookkeeping and the MRC denominators).
    const std::vector<double>& row_tap_energy() const { return row_energy_; }

    const FrameGeometry& geometry() const { return geom_; }
    const OccupancyMask& mask() const { return mask_; }
    std::size_t n_dd() const { return n_dd_; }

    /// Delay-time image of a DD grid (row-wise inverse DFT) and its inverse.
    CMat dd_to_delay_time(const CMat& x_dd) const;
    CMat delay_time_to_dd(const CMat& z) const;

    struct Tap {
        cplx gain;
        std::size_t delay = 0;
        double doppler_hz = 0.0;
        std::vector<cplx> col_phase;  ///< exp(j 2 pi nu c_t M T_s) per DD column
        std::vector<cplx> row_phase;  ///< exp(j 2 pi nu m T_s) per delay row
    };
    const std::vector<Tap>& taps() const { return taps_; }
    bool cross_column() const { return cross_column_; }
    bool cyclic_wrap() const { return cyclic_wrap_; }

private:
    FrameGeometry geom_;
    OccupancyMask mask_;
    std::size_t n_dd_ = 0;
    bool cross_column_ = false;  // r_eff == 1: tail spills into the next DD column
    bool cyclic_wrap_ = false;   // cyclic mode at r_eff == 1: last column wraps to first
    std::vector<Tap> taps_;
    std::vector<double> row_energy_;
};

/// Received samples at the DD columns, as an M x n_dd matrix.
CMat extract_otfs_columns(const CplxVec& frame, const FrameGeometry& g, const OccupancyMask& mask);

/**
 * Regularized least squares on the effective operator,
 * (A^H A + sigma^2 I) x = A^H y, solved by conjugate gradients
 * (relative residual 1e-6, at most max_iters iterations). Non-convergence
 * is flagged on the returned estimate, not thrown.
 */
DdEstimate detect_otfs_lmmse(const CplxVec& r_clean, const EffectiveChannel& eff,
                             const NoiseModel& noise, int max_iters = 200, double tol = 1e-6);

/**
 * Iterative rake detector: per-delay-row maximum-ratio combining across the
 * channel's delay branches with hard-decision feedback after every sweep.
 * Stops when the delay-time iterate changes by less than 1e-4 (relative) or
 * after max_iters sweeps; always returns the best iterate with the
 * convergence flag set accordingly.
 */
DdEstimate detect_otfs_mrc_dfe(const CplxVec& r_clean, const ChannelRealization& ch,
                               const FrameGeometry& g, const OccupancyMask& mask,
                               const NoiseModel& noise, unsigned order, int max_iters = 15);

}  // namespace hf
