// hfsim: link-level BER sweeps for the hybrid DD/OFDM frame structure.
//
// Subcommands:
//   sweep     run a Monte-Carlo BER sweep from a config file (+ overrides)
//   selftest  run the built-in invariant checks
//   plotdata  re-bin a results file into per-series BER-vs-SNR tables

#include "hf/harness.hpp"
#include "hf/rx_otfs.hpp"
#include "hf/transforms.hpp"
#include "hf/tx_builder.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace hf;

int run_selftest();

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hybrid DD/OFDM frame link-level simulator"};
    app.require_subcommand(1);

    // --- sweep ---
    auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo BER sweep");
    std::string config_path, out_path = "results.csv", format = "csv";
    std::string snr_list, speed_list, receiver, channel, coding, detector, csi, kind;
    std::uint64_t seed = 0;
    bool has_seed = false;
    int workers = 0;
    long frames = 0;
    sweep->add_option("--config", config_path, "config file (JSON)");
    sweep->add_option("--out", out_path, "output path")->capture_default_str();
    sweep->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sweep->add_option("--seed", seed, "master seed")->each([&](const std::string&) { has_seed = true; });
    sweep->add_option("--workers", workers, "worker threads");
    sweep->add_option("--snr", snr_list, "comma-separated SNR list (dB), overrides config");
    sweep->add_option("--speed", speed_list, "comma-separated velocity list (km/h)");
    sweep->add_option("--receiver", receiver, "tfds|tdic|blind_tdic|genie_tdic");
    sweep->add_option("--channel", channel, "identity|epa|eva|etu|<profile file>");
    sweep->add_option("--coding", coding, "none|ldpc");
    sweep->add_option("--detector", detector, "lmmse|mrc_dfe");
    sweep->add_option("--csi", csi, "perfect|estimated");
    sweep->add_option("--frame-kind", kind, "hybrid|otfs|ofdm");
    sweep->add_option("--frames", frames, "frame budget per point");

    // --- selftest ---
    auto* self = app.add_subcommand("selftest", "run the invariant suite");

    // --- plotdata ---
    auto* plot = app.add_subcommand("plotdata", "re-bin results for plotting");
    std::string in_path, metric = "ber_otfs_raw", plot_out;
    plot->add_option("--in", in_path, "results file (csv or json)")->required();
    plot->add_option("--metric", metric,
                     "ber_otfs_raw|ber_ofdm_raw|ber_otfs_coded|ber_ofdm_coded")
        ->capture_default_str();
    plot->add_option("--out", plot_out, "output csv (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*self) return run_selftest();

        if (*plot) {
            const auto records = load_results(in_path);
            const std::string table = rebin_for_plot(records, metric);
            if (plot_out.empty()) {
                std::cout << table;
            } else {
                std::ofstream out(plot_out);
                if (!out) throw std::runtime_error("cannot write " + plot_out);
                out << table;
            }
            return 0;
        }

        SimConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
        if (!snr_list.empty()) cfg.snr_db = parse_list(snr_list);
        if (!speed_list.empty()) cfg.velocities_kmh = parse_list(speed_list);
        if (has_seed) cfg.master_seed = seed;
        if (workers > 0) cfg.workers = workers;
        if (frames > 0) cfg.frames_per_point = static_cast<std::size_t>(frames);
        if (!receiver.empty()) {
            if (receiver == "tfds") cfg.receiver = Receiver::tfds;
            else if (receiver == "tdic") cfg.receiver = Receiver::tdic;
            else if (receiver == "blind_tdic") cfg.receiver = Receiver::blind_tdic;
            else if (receiver == "genie_tdic") cfg.receiver = Receiver::genie_tdic;
            else throw std::runtime_error("unknown receiver: " + receiver);
        }
        if (!channel.empty()) cfg.channel_profile = channel;
        if (!coding.empty()) {
            if (coding == "none") cfg.coding = Coding::none;
            else if (coding == "ldpc") cfg.coding = Coding::ldpc;
            else throw std::runtime_error("unknown coding: " + coding);
        }
        if (!detector.empty()) {
            if (detector == "lmmse") cfg.detector = Detector::lmmse;
            else if (detector == "mrc_dfe") cfg.detector = Detector::mrc_dfe;
            else throw std::runtime_error("unknown detector: " + detector);
        }
        if (!csi.empty()) {
            if (csi == "perfect") cfg.csi = CsiMode::perfect;
            else if (csi == "estimated") cfg.csi = CsiMode::estimated;
            else throw std::runtime_error("unknown csi mode: " + csi);
        }
        if (!kind.empty()) {
            if (kind == "hybrid") cfg.frame_kind = FrameKind::hybrid;
            else if (kind == "otfs") cfg.frame_kind = FrameKind::otfs_only;
            else if (kind == "ofdm") cfg.frame_kind = FrameKind::ofdm_only;
            else throw std::runtime_error("unknown frame kind: " + kind);
        }

        const auto records = run_sweep(cfg);
        emit_results(records, format == "json" ? ResultFormat::json : ResultFormat::csv, out_path);
        std::cerr << "wrote " << records.size() << " records to " << out_path << "\n";
        for (const auto& r : records) {
            std::printf("snr %5.1f dB  v %5.0f km/h  %-10s  otfs_raw %.3e  ofdm_raw %.3e  frames %llu\n",
                        r.snr_db, r.velocity_kmh, r.receiver.c_str(), r.ber_otfs_raw,
                        r.ber_ofdm_raw, static_cast<unsigned long long>(r.frames));
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

namespace {

struct Check {
    const char* name;
    bool ok;
};

int run_selftest() {
    std::vector<Check> checks;
    std::mt19937_64 rng(12345);
    auto randn = [&]() {
        std::normal_distribution<double> d(0.0, 1.0);
        return cplx{d(rng), d(rng)};
    };

    const FrameGeometry g = validate_geometry(64, 8, 4, 4, 16, 60e3, 28e9);
    const OccupancyMask mask = hybrid_mask(g);

    // DFT round trip + Parseval
    {
        CplxVec x(48);
        for (auto& v : x) v = randn();
        auto X = unitary_dft(x, DftDirection::forward);
        auto back = unitary_dft(X, DftDirection::inverse);
        const bool rt = max_abs_diff(back, x) < 1e-12;
        const bool pars = std::abs(energy(x) - energy(X)) < 1e-10;
        checks.push_back({"unitary dft round trip", rt});
        checks.push_back({"unitary dft parseval", pars});
    }
    // interpolation/replication duality
    {
        const std::size_t l = 6, r = 4;
        CplxVec s(l);
        for (auto& v : s) v = randn();
        CplxVec interp(l * r, cplx{0, 0});
        for (std::size_t i = 0; i < l; ++i) interp[i * r] = s[i];
        auto lhs = unitary_dft(interp, DftDirection::inverse);
        auto small = unitary_dft(s, DftDirection::inverse);
        double err = 0.0;
        for (std::size_t i = 0; i < l * r; ++i)
            err = std::max(err, std::abs(lhs[i] - small[i % l] / std::sqrt(double(r))));
        checks.push_back({"zero-interpolation tiling identity", err < 1e-10});
    }
    // transmit orthogonality + loopback
    {
        std::uniform_int_distribution<int> bit(0, 1);
        BitVec ob(otfs_payload_bits(g, mask, 16)), fb(ofdm_payload_bits(g, mask, 16));
        for (auto& b : ob) b = static_cast<std::uint8_t>(bit(rng));
        for (auto& b : fb) b = static_cast<std::uint8_t>(bit(rng));
        auto frame = build_hybrid_frame(ob, fb, g, {16, 16});
        cplx ip{0, 0};
        for (std::size_t i = 0; i < frame.otfs_samples.size(); ++i)
            ip += std::conj(frame.otfs_samples[i]) * frame.ofdm_samples[i];
        checks.push_back({"component time orthogonality", std::abs(ip) < 1e-10});

        const NoiseModel tiny{1e-30};
        ChannelRealization ident;
        ident.taps.push_back(ChannelTap{cplx{1.0, 0.0}, 0.0, 0, 0.0});
        auto est = tfds_extract_dd(tfds_equalize(frame.samples, build_Htf(ident, g), tiny), g,
                                   mask, tiny);
        BitVec hard = qam_hard_demap(est.y_dd.data(), 16);
        checks.push_back({"identity-channel loopback (dd payload)", hard == ob});
    }
    // channel vs matrix oracle
    {
        ChannelRealization ch;
        ch.taps = {{randn(), 0.0, 0, 321.5}, {0.5 * randn(), 97.6, 3, 1234.5}};
        CplxVec s(g.frame_len());
        for (auto& v : s) v = randn();
        bool ok = true;
        for (EdgeMode mode : {EdgeMode::linear, EdgeMode::cyclic}) {
            ch.mode = mode;
            auto direct = apply_channel(s, ch, g);
            auto via = build_Ht(ch, g).multiply(s);
            ok = ok && max_abs_diff(direct, via) < 1e-9;
        }
        checks.push_back({"apply_channel == H_t multiply (both modes)", ok});
    }
    // determinism
    {
        hf::SimConfig cfg = default_config();
        cfg.geometry = g;
        cfg.snr_db = {20};
        cfg.velocities_kmh = {30};
        cfg.frames_per_point = 2;
        cfg.channel_profile = "epa";
        auto a = run_trial(SimContext(cfg), 20, 30, 0);
        auto b = run_trial(SimContext(cfg), 20, 30, 0);
        checks.push_back({"trial determinism",
                          a.otfs_raw_err == b.otfs_raw_err && a.ofdm_raw_err == b.ofdm_raw_err});
    }

    int failed = 0;
    for (const auto& c : checks) {
        std::printf("[%s] %s\n", c.ok ? "PASS" : "FAIL", c.name);
        if (!c.ok) ++failed;
    }
    std::printf("%zu checks, %d failed\n", checks.size(), failed);
    return failed == 0 ? 0 : 1;
}

}  // namespace
