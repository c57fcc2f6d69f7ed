#include "hf/harness.hpp"

#include "hf/rx_otfs.hpp"
#include "hf/transforms.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace hf {

using nlohmann::json;

std::string to_string(Receiver r) {
    switch (r) {
        case Receiver::tfds: return "tfds";
        case Receiver::tdic: return "tdic";
        case Receiver::blind_tdic: return "blind_tdic";
        case Receiver::genie_tdic: return "genie_tdic";
    }
    return "?";
}
std::string to_string(Detector d) { return d == Detector::lmmse ? "lmmse" : "mrc_dfe"; }
std::string to_string(CsiMode c) { return c == CsiMode::perfect ? "perfect" : "estimated"; }
std::string to_string(Coding c) { return c == Coding::none ? "none" : "ldpc"; }
std::string to_string(FrameKind k) {
    switch (k) {
        case FrameKind::hybrid: return "hybrid";
        case FrameKind::otfs_only: return "otfs";
        case FrameKind::ofdm_only: return "ofdm";
    }
    return "?";
}

namespace {

Receiver receiver_from(const std::string& s) {
    if (s == "tfds") return Receiver::tfds;
    if (s == "tdic") return Receiver::tdic;
    if (s == "blind_tdic") return Receiver::blind_tdic;
    if (s == "genie_tdic") return Receiver::genie_tdic;
    throw std::invalid_argument("config: unknown receiver '" + s + "'");
}
Detector detector_from(const std::string& s) {
    if (s == "lmmse") return Detector::lmmse;
    if (s == "mrc_dfe") return Detector::mrc_dfe;
    throw std::invalid_argument("config: unknown detector '" + s + "'");
}
CsiMode csi_from(const std::string& s) {
    if (s == "perfect") return CsiMode::perfect;
    if (s == "estimated") return CsiMode::estimated;
    throw std::invalid_argument("config: unknown csi mode '" + s + "'");
}
Coding coding_from(const std::string& s) {
    if (s == "none") return Coding::none;
    if (s == "ldpc") return Coding::ldpc;
    throw std::invalid_argument("config: unknown coding '" + s + "'");
}
FrameKind kind_from(const std::string& s) {
    if (s == "hybrid") return FrameKind::hybrid;
    if (s == "otfs") return FrameKind::otfs_only;
    if (s == "ofdm") return FrameKind::ofdm_only;
    throw std::invalid_argument("config: unknown frame kind '" + s + "'");
}

std::string default_data_dir_path() {
    if (const char* env = std::getenv("HF_DATA_DIR")) return env;
#ifdef HF_SOURCE_DATA_DIR
    return HF_SOURCE_DATA_DIR;
#else
    return ".";
#endif
}

}  // namespace

SimConfig default_config() {
    SimConfig cfg;
    cfg.geometry = validate_geometry(512, 16, 8, 8, 160, 60e3, 28e9);
    cfg.snr_db = {14, 16, 18, 20, 22, 24, 26};
    cfg.velocities_kmh = {3, 30, 200, 300, 500};
    cfg.modulation = ModulationOrders{16, 16};
    cfg.blind_pool = {{4, {}, "qpsk"}, {16, {}, "16qam"}, {64, {}, "64qam"}};
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json j;
    in >> j;

    SimConfig cfg = default_config();
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        cfg.geometry = validate_geometry(
            g.value("M", 512u), g.value("N", 16u), g.value("N_dd", 8u), g.value("N_tf", 8u),
            g.value("L_cp", 160u), g.value("delta_f", 60e3), g.value("f_c", 28e9));
    }
    if (j.contains("frame_kind")) cfg.frame_kind = kind_from(j["frame_kind"]);
    if (j.contains("channel")) {
        const auto& c = j["channel"];
        cfg.channel_profile = c.value("profile", cfg.channel_profile);
        if (c.contains("velocities_kmh"))
            cfg.velocities_kmh = c["velocities_kmh"].get<std::vector<double>>();
        if (c.contains("edge_mode"))
            cfg.edge_mode = c["edge_mode"] == "cyclic" ? EdgeMode::cyclic : EdgeMode::linear;
        if (c.contains("phase_ref"))
            cfg.phase_ref = c["phase_ref"] == "absolute" ? PhaseRef::absolute : PhaseRef::delayed;
        cfg.on_grid_doppler = c.value("on_grid_doppler", cfg.on_grid_doppler);
    }
    if (j.contains("snr_db")) cfg.snr_db = j["snr_db"].get<std::vector<double>>();
    if (j.contains("receiver")) cfg.receiver = receiver_from(j["receiver"]);
    if (j.contains("detector")) cfg.detector = detector_from(j["detector"]);
    if (j.contains("csi")) cfg.csi = csi_from(j["csi"]);
    if (j.contains("coding")) cfg.coding = coding_from(j["coding"]);
    if (j.contains("ofdm_doppler_ref"))
        cfg.ofdm_doppler_ref = j["ofdm_doppler_ref"] == "mid_symbol" ? OfdmDopplerRef::mid_symbol
                                                                     : OfdmDopplerRef::post_cp_start;
    if (j.contains("modulation")) {
        cfg.modulation.otfs = j["modulation"].value("otfs", 16u);
        cfg.modulation.ofdm = j["modulation"].value("ofdm", 16u);
    }
    cfg.frames_per_point = j.value("frames_per_point", cfg.frames_per_point);
    cfg.target_bit_errors = j.value("target_bit_errors", cfg.target_bit_errors);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("blind_pool")) {
        cfg.blind_pool.clear();
        for (const auto& h : j["blind_pool"]) {
            Hypothesis hyp;
            hyp.order = h.value("order", 16u);
            if (h.contains("occupancy")) hyp.occupancy = h["occupancy"].get<std::vector<std::size_t>>();
            hyp.id = h.value("id", std::to_string(hyp.order) + "qam");
            cfg.blind_pool.push_back(std::move(hyp));
        }
    }
    if (j.contains("pilot")) {
        const auto& p = j["pilot"];
        cfg.pilot_kappa = p.value("kappa", cfg.pilot_kappa);
        cfg.pilot_l = p.value("l", cfg.pilot_l);
        cfg.pilot_k = p.value("k", cfg.pilot_k);
        cfg.pilot_amp = p.value("amplitude", cfg.pilot_amp);
    }
    cfg.data_dir = j.value("data_dir", cfg.data_dir);
    cfg.ldpc_file = j.value("ldpc_file", cfg.ldpc_file);

    if (cfg.snr_db.empty()) throw std::invalid_argument("config: SNR list must be non-empty");
    if (cfg.frames_per_point == 0) throw std::invalid_argument("config: frame count must be >= 1");
    return cfg;
}

std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t frame_index, RngRole role) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    };
    std::uint64_t s = mix(master_seed);
    s = mix(s ^ frame_index);
    s = mix(s ^ static_cast<std::uint64_t>(role));
    return std::mt19937_64(s);
}

SimContext::SimContext(const SimConfig& cfg) : cfg_(cfg) {
    const std::string dir = cfg.data_dir.empty() ? default_data_dir_path() : cfg.data_dir;
    profile_ = resolve_profile(cfg.channel_profile, dir);
    if (cfg.coding == Coding::ldpc) {
        const std::string file =
            cfg.ldpc_file.empty() ? dir + "/ldpc_r12_n16368.alist" : cfg.ldpc_file;
        code_ = load_alist(file);
        encoder_.emplace(*code_);
    }
}

double SimContext::pilot_amplitude() const {
    if (cfg_.pilot_amp > 0.0) return cfg_.pilot_amp;
    return std::sqrt(static_cast<double>(cfg_.geometry.frame_len()));
}

// ---------------------------------------------------------------------------
// Coded payload assembly (rate matching by shortening)
// ---------------------------------------------------------------------------

namespace {

constexpr double kShortenedLlr = 1e12;

struct CodedSegment {
    std::size_t msg_len = 0;  // information bits carried
    std::size_t tx_len = 0;   // transmitted bits: msg_len + (n - k)
};

struct CodedPayload {
    BitVec tx_bits;
    std::vector<BitVec> messages;
    std::vector<CodedSegment> segments;
    std::size_t filler_bits = 0;
};

BitVec random_bits(std::size_t count, std::mt19937_64& rng) {
    BitVec bits(count);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    return bits;
}

// Tile a bit budget with rate-1/2 codewords: whole codewords first, then one
// shortened codeword if the remainder can still carry information, otherwise
// random filler (scored only by the raw BER).
CodedPayload make_coded_payload(std::size_t budget, const LdpcEncoder& enc, std::mt19937_64& rng) {
    const std::size_t n = enc.code().n;
    const std::size_t k = enc.code().k;
    CodedPayload out;
    std::size_t placed = 0;
    while (budget - placed >= n) {
        out.segments.push_back({k, n});
        placed += n;
    }
    const std::size_t rem = budget - placed;
    if (rem > n - k) {
        out.segments.push_back({rem - (n - k), rem});
        placed += rem;
    } else {
        out.filler_bits = rem;
    }

    out.tx_bits.reserve(budget);
    for (const auto& seg : out.segments) {
        BitVec msg = random_bits(seg.msg_len, rng);
        BitVec full_msg = msg;
        full_msg.resize(k, 0);  // shortened tail = known zeros
        BitVec cw = enc.encode(full_msg);
        out.tx_bits.insert(out.tx_bits.end(), cw.begin(),
                           cw.begin() + static_cast<std::ptrdiff_t>(seg.msg_len));
        out.tx_bits.insert(out.tx_bits.end(), cw.begin() + static_cast<std::ptrdiff_t>(k), cw.end());
        out.messages.push_back(std::move(msg));
    }
    if (out.filler_bits > 0) {
        BitVec filler = random_bits(out.filler_bits, rng);
        out.tx_bits.insert(out.tx_bits.end(), filler.begin(), filler.end());
    }
    return out;
}

// Decode every segment of a coded payload given the LLRs of the transmitted
// bits; returns (errors, bits) over the carried messages.
std::pair<std::uint64_t, std::uint64_t> decode_coded(const CodedPayload& payload,
                                                     const std::vector<double>& llrs,
                                                     const CodeSpec& code) {
    const std::size_t n = code.n;
    const std::size_t k = code.k;
    std::uint64_t errs = 0, bits = 0;
    std::size_t off = 0;
    for (std::size_t s = 0; s < payload.segments.size(); ++s) {
        const auto& seg = payload.segments[s];
        std::vector<double> full(n, kShortenedLlr);  // shortened bits: strong zeros
        std::copy(llrs.begin() + static_cast<std::ptrdiff_t>(off),
                  llrs.begin() + static_cast<std::ptrdiff_t>(off + seg.msg_len), full.begin());
        std::copy(llrs.begin() + static_cast<std::ptrdiff_t>(off + seg.msg_len),
                  llrs.begin() + static_cast<std::ptrdiff_t>(off + seg.tx_len),
                  full.begin() + static_cast<std::ptrdiff_t>(k));
        auto res = ldpc_decode(full, code);
        for (std::size_t i = 0; i < seg.msg_len; ++i)
            errs += res.message[i] != payload.messages[s][i];
        bits += seg.msg_len;
        off += seg.tx_len;
    }
    return {errs, bits};
}

std::uint64_t count_bit_errors(const BitVec& a, const BitVec& b) {
    std::uint64_t e = 0;
    const std::size_t len = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < len; ++i) e += a[i] != b[i];
    return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// run_trial
// ---------------------------------------------------------------------------

TrialCounts run_trial(const SimContext& ctx, double snr_db, double velocity_kmh,
                      std::uint64_t frame_index) {
    const SimConfig& cfg = ctx.config();
    const FrameGeometry& g = cfg.geometry;
    const OccupancyMask mask = mask_for(g, cfg.frame_kind);
    const bool has_otfs = mask.n_dd_eff > 0;
    const bool has_ofdm = !mask.ofdm_columns.empty();

    const NoiseModel noise{std::pow(10.0, -snr_db / 10.0)};

    try {
        // Payloads.
        auto rng_otfs = make_stream(cfg.master_seed, frame_index, RngRole::otfs_bits);
        auto rng_ofdm = make_stream(cfg.master_seed, frame_index, RngRole::ofdm_bits);
        const std::size_t otfs_budget = has_otfs ? otfs_payload_bits(g, mask, cfg.modulation.otfs) : 0;
        const std::size_t ofdm_budget = has_ofdm ? ofdm_payload_bits(g, mask, cfg.modulation.ofdm) : 0;

        CodedPayload otfs_payload, ofdm_payload;
        BitVec otfs_bits, ofdm_bits;
        if (cfg.coding == Coding::ldpc) {
            if (has_otfs) {
                otfs_payload = make_coded_payload(otfs_budget, *ctx.encoder(), rng_otfs);
                otfs_bits = otfs_payload.tx_bits;
            }
            if (has_ofdm) {
                ofdm_payload = make_coded_payload(ofdm_budget, *ctx.encoder(), rng_ofdm);
                ofdm_bits = ofdm_payload.tx_bits;
            }
        } else {
            otfs_bits = random_bits(otfs_budget, rng_otfs);
            ofdm_bits = random_bits(ofdm_budget, rng_ofdm);
        }

        // Frame.
        HybridFrame frame;
        switch (cfg.frame_kind) {
            case FrameKind::hybrid:
                frame = build_hybrid_frame(otfs_bits, ofdm_bits, g, cfg.modulation);
                break;
            case FrameKind::otfs_only:
                frame = build_standalone(FrameKind::otfs_only, otfs_bits, g, cfg.modulation.otfs);
                break;
            case FrameKind::ofdm_only:
                frame = build_standalone(FrameKind::ofdm_only, ofdm_bits, g, cfg.modulation.ofdm);
                break;
        }

        // Channel and noise.
        auto rng_ch = make_stream(cfg.master_seed, frame_index, RngRole::channel);
        ChannelRealization ch =
            sample_realization(ctx.profile(), velocity_kmh, g, rng_ch, cfg.edge_mode,
                               cfg.phase_ref, /*require_cp_cover=*/has_ofdm, cfg.on_grid_doppler);
        auto rng_noise = make_stream(cfg.master_seed, frame_index, RngRole::noise);
        CplxVec y = add_awgn(apply_channel(frame.samples, ch, g), noise, rng_noise);

        // CSI.
        ChannelRealization ch_rx = ch;
        if (cfg.csi == CsiMode::estimated) {
            const double amp = ctx.pilot_amplitude();
            CplxVec pilot = build_pilot_frame(g, cfg.pilot_l, cfg.pilot_k, amp);
            auto rng_pilot = make_stream(cfg.master_seed, frame_index, RngRole::pilot_noise);
            CplxVec pilot_rx = add_awgn(apply_channel(pilot, ch, g), noise, rng_pilot);
            ch_rx = estimate_dd_channel(pilot_rx, g, noise, cfg.pilot_kappa, cfg.pilot_l,
                                        cfg.pilot_k, amp, /*max_delay=*/g.L_cp);
            ch_rx.mode = ch.mode;
            ch_rx.phase_ref = ch.phase_ref;
        }

        TrialCounts counts;

        // OFDM side: symbol-by-symbol detection.
        std::vector<OfdmSymbolEstimate> ofdm_ests;
        if (has_ofdm) {
            ofdm_ests = detect_ofdm_frame(y, ch_rx, g, mask, noise, cfg.ofdm_doppler_ref);
            CplxVec soft;
            std::vector<double> var, bias;
            soft.reserve(ofdm_budget);
            for (const auto& est : ofdm_ests) {
                soft.insert(soft.end(), est.soft_symbols.begin(), est.soft_symbols.end());
                var.insert(var.end(), est.post_eq_noise_var.begin(), est.post_eq_noise_var.end());
                bias.insert(bias.end(), est.mmse_bias.begin(), est.mmse_bias.end());
            }
            const BitVec hard = qam_hard_demap(soft, cfg.modulation.ofdm);
            counts.ofdm_raw_err = count_bit_errors(hard, frame.ofdm_bits);
            counts.ofdm_raw_bits = frame.ofdm_bits.size();
            if (cfg.coding == Coding::ldpc) {
                const auto llrs = qam_llr_scaled(soft, var, bias, cfg.modulation.ofdm);
                std::tie(counts.ofdm_coded_err, counts.ofdm_coded_bits) =
                    decode_coded(ofdm_payload, llrs, *ctx.code());
            }
        }

        // DD side.
        if (has_otfs) {
            DdEstimate est;
            if (cfg.receiver == Receiver::tfds) {
                const CMat h_tf = build_Htf(ch_rx, g);
                est = tfds_extract_dd(tfds_equalize(y, h_tf, noise), g, mask, noise);
            } else {
                CplxVec r_clean = y;
                if (has_ofdm) {
                    if (cfg.receiver == Receiver::blind_tdic) {
                        BlindResult blind = blind_cancel(y, ch_rx, g, mask, noise, cfg.blind_pool,
                                                         cfg.ofdm_doppler_ref);
                        counts.blind_correct = blind.chosen.order == cfg.modulation.ofdm;
                        r_clean = std::move(blind.cleaned);
                    } else {
                        CMat x_tf_hat =
                            cfg.receiver == Receiver::genie_tdic
                                ? ofdm_component_tf(frame.s_tf_raw, g, mask)
                                : rebuild_ofdm_interference(ofdm_ests, cfg.modulation.ofdm, g, mask);
                        r_clean = tdic_cancel(y, build_Ht(ch_rx, g), x_tf_hat, g, mask);
                    }
                }
                if (cfg.detector == Detector::lmmse) {
                    const EffectiveChannel eff(ch_rx, g, mask);
                    est = detect_otfs_lmmse(r_clean, eff, noise);
                } else {
                    est = detect_otfs_mrc_dfe(r_clean, ch_rx, g, mask, noise, cfg.modulation.otfs);
                }
            }

            const CplxVec& soft = est.y_dd.data();
            const BitVec hard = qam_hard_demap(soft, cfg.modulation.otfs);
            counts.otfs_raw_err = count_bit_errors(hard, frame.otfs_bits);
            counts.otfs_raw_bits = frame.otfs_bits.size();
            if (cfg.coding == Coding::ldpc) {
                std::vector<double> var(soft.size());
                for (std::size_t i = 0; i < soft.size(); ++i)
                    var[i] = est.noise_var_rows[i % g.M];
                const auto llrs = qam_llr(soft, var, cfg.modulation.otfs);
                std::tie(counts.otfs_coded_err, counts.otfs_coded_bits) =
                    decode_coded(otfs_payload, llrs, *ctx.code());
            }
        }
        return counts;
    } catch (const std::exception& e) {
        throw std::runtime_error("frame " + std::to_string(frame_index) + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// run_sweep
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kBatch = 16;  // fixed batch size keeps early stopping
                                    // independent of the worker count

void accumulate(TrialCounts& total, const TrialCounts& c) {
    total.otfs_raw_err += c.otfs_raw_err;
    total.otfs_raw_bits += c.otfs_raw_bits;
    total.ofdm_raw_err += c.ofdm_raw_err;
    total.ofdm_raw_bits += c.ofdm_raw_bits;
    total.otfs_coded_err += c.otfs_coded_err;
    total.otfs_coded_bits += c.otfs_coded_bits;
    total.ofdm_coded_err += c.ofdm_coded_err;
    total.ofdm_coded_bits += c.ofdm_coded_bits;
}

bool enough_errors(const TrialCounts& t, const SimConfig& cfg, bool has_otfs, bool has_ofdm) {
    const std::uint64_t target = cfg.target_bit_errors;
    if (has_otfs && t.otfs_raw_err < target) return false;
    if (has_ofdm && t.ofdm_raw_err < target) return false;
    if (cfg.coding == Coding::ldpc) {
        if (has_otfs && t.otfs_coded_err < target) return false;
        if (has_ofdm && t.ofdm_coded_err < target) return false;
    }
    return true;
}

double ber_or_nan(std::uint64_t err, std::uint64_t bits) {
    return bits > 0 ? static_cast<double>(err) / static_cast<double>(bits)
                    : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

std::vector<BerRecord> run_sweep(const SimConfig& cfg) {
    const SimContext ctx(cfg);
    const OccupancyMask mask = mask_for(cfg.geometry, cfg.frame_kind);
    const bool has_otfs = mask.n_dd_eff > 0;
    const bool has_ofdm = !mask.ofdm_columns.empty();
    const int workers = std::max(1, cfg.workers);

    std::vector<BerRecord> records;
    for (double v : cfg.velocities_kmh) {
        for (double snr : cfg.snr_db) {
            TrialCounts total;
            std::uint64_t frames = 0;
            while (frames < cfg.frames_per_point &&
                   !enough_errors(total, cfg, has_otfs, has_ofdm)) {
                const std::size_t batch =
                    std::min<std::size_t>(kBatch, cfg.frames_per_point - frames);
                std::vector<TrialCounts> results(batch);
                if (workers == 1 || batch == 1) {
                    for (std::size_t i = 0; i < batch; ++i)
                        results[i] = run_trial(ctx, snr, v, frames + i);
                } else {
                    std::vector<std::thread> pool;
                    std::vector<std::exception_ptr> errors(workers);
                    for (int w = 0; w < workers; ++w) {
                        pool.emplace_back([&, w]() {
                            try {
                                for (std::size_t i = static_cast<std::size_t>(w); i < batch;
                                     i += static_cast<std::size_t>(workers))
                                    results[i] = run_trial(ctx, snr, v, frames + i);
                            } catch (...) {
                                errors[static_cast<std::size_t>(w)] = std::current_exception();
                            }
                        });
                    }
                    for (auto& t : pool) t.join();
                    for (auto& e : errors)
                        if (e) std::rethrow_exception(e);
                }
                for (const auto& c : results) accumulate(total, c);
                frames += batch;
            }

            BerRecord rec;
            rec.snr_db = snr;
            rec.velocity_kmh = v;
            rec.receiver = to_string(cfg.receiver);
            rec.channel = ctx.profile().name;
            rec.detector = to_string(cfg.detector);
            rec.coding = to_string(cfg.coding);
            rec.csi = to_string(cfg.csi);
            rec.err_otfs_raw = total.otfs_raw_err;
            rec.err_ofdm_raw = total.ofdm_raw_err;
            rec.err_otfs_coded = total.otfs_coded_err;
            rec.err_ofdm_coded = total.ofdm_coded_err;
            rec.bits_otfs_raw = total.otfs_raw_bits;
            rec.bits_ofdm_raw = total.ofdm_raw_bits;
            rec.bits_otfs_coded = total.otfs_coded_bits;
            rec.bits_ofdm_coded = total.ofdm_coded_bits;
            rec.ber_otfs_raw = ber_or_nan(total.otfs_raw_err, total.otfs_raw_bits);
            rec.ber_ofdm_raw = ber_or_nan(total.ofdm_raw_err, total.ofdm_raw_bits);
            rec.ber_otfs_coded = ber_or_nan(total.otfs_coded_err, total.otfs_coded_bits);
            rec.ber_ofdm_coded = ber_or_nan(total.ofdm_coded_err, total.ofdm_coded_bits);
            rec.frames = frames;
            rec.seed = cfg.master_seed;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

}  // namespace hf
