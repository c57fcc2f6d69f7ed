#pragma once

#include "hf/grid.hpp"
#include "hf/types.hpp"

#include <random>
#include <string>
#include <vector>

namespace hf {

/// One propagation path. delay_samples = round(delay_ns * f_s); the detection
/// pipeline treats taps as on-grid, so all phase formulas use the rounded
/// delay (delay_samples * T_s), not the raw nanosecond value.
struct ChannelTap {
    cplx gain{0.0, 0.0};
    double delay_ns = 0.0;
    std::size_t delay_samples = 0;
    double doppler_hz = 0.0;
};

/// Frame-edge handling: linear treats samples before the frame as zero;
/// cyclic wraps indices mod M*N.
enum class EdgeMode { linear, cyclic };

/// Doppler phase reference: delayed rides the delayed signal,
/// exp(j 2 pi nu (q - l) T_s); absolute uses the receive instant q.
enum class PhaseRef { delayed, absolute };

struct ChannelRealization {
    std::vector<ChannelTap> taps;
    EdgeMode mode = EdgeMode::linear;
    PhaseRef phase_ref = PhaseRef::delayed;
    std::string profile;
    double nu_max = 0.0;

    std::size_t max_delay_samples() const;
};

struct NoiseModel {
    double sigma2 = 0.0;  ///< complex noise variance per sample, > 0
};

/// Delay/power profile entry as read from a profile file.
struct ProfileTap {
    double delay_ns = 0.0;
    double power_db = 0.0;
};

struct ChannelProfile {
    std::string name;
    std::vector<ProfileTap> taps;  ///< linear powers normalized to sum 1 on load
};

/**
 * Loads a profile file: one "delay_ns power_db" pair per line, '#' comments
 * and blank lines ignored, order irrelevant. Total linear power is
 * normalized to 1.
 */
ChannelProfile load_profile_file(const std::string& path, const std::string& name = "");

/// Resolves "identity" (single 0 ns / 0 dB tap), "epa"/"eva"/"etu" (shipped
/// data files) or an explicit file path. data_dir empty = default search
/// (HF_DATA_DIR env var, then the build-tree data directory).
ChannelProfile resolve_profile(const std::string& name_or_path, const std::string& data_dir = "");

/// Maximum Doppler shift for a velocity in km/h at carrier f_c.
double max_doppler_hz(double velocity_kmh, double f_c);

/**
 * Samples one realization: per-tap circularly-symmetric Gaussian gain with the
 * profile's (normalized) power, Doppler ~ U(0, nu_max). Deterministic given
 * the rng stream. Validates the CP against the delay spread whenever the
 * geometry carries OFDM columns.
 */
ChannelRealization sample_realization(const ChannelProfile& profile, double velocity_kmh,
                                      const FrameGeometry& g, std::mt19937_64& rng,
                                      EdgeMode mode = EdgeMode::linear,
                                      PhaseRef phase_ref = PhaseRef::delayed,
                                      bool require_cp_cover = true,
                                      bool on_grid_doppler = false);

/// Direct per-sample channel application r[q] = sum_i g_i e^{j2pi nu_i (q-l_i) T_s} s[q-l_i].
/// Noise is not added here.
CplxVec apply_channel(const CplxVec& frame, const ChannelRealization& ch, const FrameGeometry& g);

/// Sparse time-domain channel matrix, row-indexed: row q holds (col, value)
/// entries at q - l_i (wrapped in cyclic mode, dropped in linear mode).
struct SparseHt {
    std::size_t dim = 0;
    std::vector<std::vector<std::pair<std::uint32_t, cplx>>> rows;

    CplxVec multiply(const CplxVec& x) const;
};

SparseHt build_Ht(const ChannelRealization& ch, const FrameGeometry& g);

/// Ideal-pulse time-frequency response: H_tf[m,n] = sum_i g_i
/// e^{j2pi nu_i n M T_s} e^{-j2pi m l_i / M} (symbol-start Doppler reference).
CMat build_Htf(const ChannelRealization& ch, const FrameGeometry& g);

/// Per-subcarrier response seen by the CP-precoded OFDM symbol n, length
/// M - L_cp; Doppler phase referenced to the post-CP start (n*M + L_cp)*T_s,
/// shifted by extra_ref_samples when the caller wants mid-symbol referencing.
CplxVec ofdm_freq_response(const ChannelRealization& ch, std::size_t symbol_index,
                           const FrameGeometry& g, double extra_ref_samples = 0.0);

/// Adds i.i.d. circularly-symmetric complex Gaussian noise of variance sigma2.
CplxVec add_awgn(const CplxVec& frame, const NoiseModel& noise, std::mt19937_64& rng);

/**
 * Simplified threshold pilot estimator. The pilot frame is a standalone-OTFS
 * frame carrying a single pulse of amplitude pilot_amp at DD bin (l_p, k_p).
 * DD bins with magnitude > kappa * sigma are read as taps relative to the
 * pilot position (integer delays, on-grid Doppler). Throws when no bin
 * crosses the threshold.
 */
ChannelRealization estimate_dd_channel(const CplxVec& received_pilot, const FrameGeometry& g,
                                       const NoiseModel& noise, double kappa,
                                       std::size_t l_p = 0, std::size_t k_p = 0,
                                       double pilot_amp = 1.0,
                                       std::size_t max_delay = 0);

/// Builds the time-domain pilot frame the estimator expects.
CplxVec build_pilot_frame(const FrameGeometry& g, std::size_t l_p, std::size_t k_p,
                          double pilot_amp);

}  // namespace hf
