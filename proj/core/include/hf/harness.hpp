#pragma once

#include "hf/blind_ic.hpp"
#include "hf/channel.hpp"
#include "hf/grid.hpp"
#include "hf/ldpc.hpp"
#include "hf/rx_ofdm.hpp"
#include "hf/tx_builder.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hf {

enum class Receiver { tfds, tdic, blind_tdic, genie_tdic };
enum class Detector { lmmse, mrc_dfe };
enum class CsiMode { perfect, estimated };
enum class Coding { none, ldpc };

std::string to_string(Receiver r);
std::string to_string(Detector d);
std::string to_string(CsiMode c);
std::string to_string(Coding c);
std::string to_string(FrameKind k);

/// Everything one Monte-Carlo sweep needs. The shipped default configuration
/// file carries the reference system parameters (28 GHz, 60 kHz spacing,
/// 512 x 16 grid split 8/8, 16QAM, EVA).
struct SimConfig {
    FrameGeometry geometry;
    FrameKind frame_kind = FrameKind::hybrid;

    std::string channel_profile = "eva";
    std::vector<double> velocities_kmh{300.0};
    EdgeMode edge_mode = EdgeMode::linear;
    PhaseRef phase_ref = PhaseRef::delayed;
    bool on_grid_doppler = false;

    std::vector<double> snr_db;
    Receiver receiver = Receiver::tdic;
    Detector detector = Detector::lmmse;
    CsiMode csi = CsiMode::perfect;
    Coding coding = Coding::none;
    OfdmDopplerRef ofdm_doppler_ref = OfdmDopplerRef::post_cp_start;

    ModulationOrders modulation;

    std::size_t frames_per_point = 100;
    std::size_t target_bit_errors = 500;
    std::uint64_t master_seed = 1;
    int workers = 1;

    std::vector<Hypothesis> blind_pool;  ///< defaults to {QPSK,16QAM,64QAM}, full occupancy

    double pilot_kappa = 4.0;
    std::size_t pilot_l = 0;
    std::size_t pilot_k = 0;
    double pilot_amp = 0.0;  ///< 0 = automatic: sqrt(M*N), same per-sample power as data

    std::string data_dir;    ///< profile/code search dir; empty = default
    std::string ldpc_file;   ///< empty = data_dir/ldpc_r12_n16368.alist
};

/// Table-reference defaults (hybrid 512x16, 8/8 split, L_cp 160, 16QAM, EVA).
SimConfig default_config();

/// Reads a JSON config file; missing keys fall back to default_config().
SimConfig load_config(const std::string& path);

/// One (SNR, receiver, channel, speed) measurement row.
struct BerRecord {
    double snr_db = 0.0;
    double velocity_kmh = 0.0;
    std::string receiver;
    std::string channel;
    std::string detector;
    std::string coding;
    std::string csi;
    double ber_otfs_raw = 0.0;
    double ber_ofdm_raw = 0.0;
    double ber_otfs_coded = 0.0;  ///< NaN when coding is off or component absent
    double ber_ofdm_coded = 0.0;
    std::uint64_t bits_otfs_raw = 0;
    std::uint64_t bits_ofdm_raw = 0;
    std::uint64_t bits_otfs_coded = 0;
    std::uint64_t bits_ofdm_coded = 0;
    std::uint64_t err_otfs_raw = 0;
    std::uint64_t err_ofdm_raw = 0;
    std::uint64_t err_otfs_coded = 0;
    std::uint64_t err_ofdm_coded = 0;
    std::uint64_t frames = 0;
    std::uint64_t seed = 0;
};

/// Per-frame error counts from one full tx -> channel -> rx pass.
struct TrialCounts {
    std::uint64_t otfs_raw_err = 0, otfs_raw_bits = 0;
    std::uint64_t ofdm_raw_err = 0, ofdm_raw_bits = 0;
    std::uint64_t otfs_coded_err = 0, otfs_coded_bits = 0;
    std::uint64_t ofdm_coded_err = 0, ofdm_coded_bits = 0;
    bool blind_correct = false;  ///< blind receiver picked the true order
};

/// Derived-seed roles; streams are mt19937_64 seeded from
/// (master seed, frame index, role) so results are order- and
/// parallelism-independent.
enum class RngRole : std::uint64_t {
    otfs_bits = 1,
    ofdm_bits = 2,
    channel = 3,
    noise = 4,
    pilot_noise = 5,
};

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t frame_index, RngRole role);

/// Loaded per-process context (LDPC code, channel profile) shared by trials.
class SimContext {
public:
    explicit SimContext(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const ChannelProfile& profile() const { return profile_; }
    const CodeSpec* code() const { return code_ ? &*code_ : nullptr; }
    const LdpcEncoder* encoder() const { return encoder_ ? &*encoder_ : nullptr; }
    double pilot_amplitude() const;

private:
    SimConfig cfg_;
    ChannelProfile profile_;
    std::optional<CodeSpec> code_;
    std::optional<LdpcEncoder> encoder_;
};

/// One frame at one (snr, velocity) operating point.
TrialCounts run_trial(const SimContext& ctx, double snr_db, double velocity_kmh,
                      std::uint64_t frame_index);

/// Full sweep over snr x velocity; per point, frames accumulate until the
/// frame budget or the target bit-error count is reached (batch-aligned so
/// the output is byte-identical for any worker count).
std::vector<BerRecord> run_sweep(const SimConfig& cfg);

enum class ResultFormat { csv, json };

void emit_results(const std::vector<BerRecord>& records, ResultFormat fmt, const std::string& path);
std::vector<BerRecord> load_results(const std::string& path);

/// Groups records into per-series BER-vs-SNR tables for plotting,
/// one column per (receiver, channel, velocity, metric) series.
std::string rebin_for_plot(const std::vector<BerRecord>& records, const std::string& metric);

}  // namespace hf
