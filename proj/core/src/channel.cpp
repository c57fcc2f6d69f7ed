#include "hf/channel.hpp"

#include "hf/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::size_t ChannelRealization::max_delay_samples() const {
    std::size_t m = 0;
    for (const auto& t : taps) m = std::max(m, t.delay_samples);
    return m;
}

ChannelProfile load_profile_file(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("channel profile: cannot open " + path);
    ChannelProfile p;
    p.name = name.empty() ? path : name;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double delay_ns = 0.0, power_db = 0.0;
        if (ls >> delay_ns >> power_db) p.taps.push_back({delay_ns, power_db});
    }
    if (p.taps.empty()) throw std::runtime_error("channel profile: empty profile " + path);
    double total = 0.0;
    for (const auto& t : p.taps) total += std::pow(10.0, t.power_db / 10.0);
    const double adjust_db = 10.0 * std::log10(total);
    for (auto& t : p.taps) t.power_db -= adjust_db;
    return p;
}

namespace {

std::string default_data_dir() {
    if (const char* env = std::getenv("HF_DATA_DIR")) return env;
#ifdef HF_SOURCE_DATA_DIR
    return HF_SOURCE_DATA_DIR;
#else
    return ".";
#endif
}

}  // namespace

ChannelProfile resolve_profile(const std::string& name_or_path, const std::string& data_dir) {
    if (name_or_path == "identity") {
        ChannelProfile p;
        p.name = "identity";
        p.taps.push_back({0.0, 0.0});
        return p;
    }
    std::string lower = name_or_path;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower == "epa" || lower == "eva" || lower == "etu") {
        const std::string dir = data_dir.empty() ? default_data_dir() : data_dir;
        return load_profile_file(dir + "/" + lower + ".txt", lower);
    }
    return load_profile_file(name_or_path);
}

double max_doppler_hz(double velocity_kmh, double f_c) {
    return (velocity_kmh / 3.6) * f_c / kSpeedOfLight;
}

ChannelRealization sample_realization(const ChannelProfile& profile, double velocity_kmh,
                                      const FrameGeometry& g, std::mt19937_64& rng,
                                      EdgeMode mode, PhaseRef phase_ref,
                                      bool require_cp_cover, bool on_grid_doppler) {
    if (profile.taps.empty()) throw std::invalid_argument("sample_realization: empty profile");
    if (velocity_kmh < 0.0) throw std::invalid_argument("sample_realization: negative velocity");

    ChannelRealization ch;
    ch.mode = mode;
    ch.phase_ref = phase_ref;
    ch.profile = profile.name;
    ch.nu_max = max_doppler_hz(velocity_kmh, g.f_c);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double doppler_bin = 1.0 / (static_cast<double>(g.N) * g.M * g.T_s);

    for (const auto& pt : profile.taps) {
        ChannelTap tap;
        const double p_lin = std::pow(10.0, pt.power_db / 10.0);
        const double s = std::sqrt(p_lin / 2.0);
        tap.gain = cplx{s * gauss(rng), s * gauss(rng)};
        tap.delay_ns = pt.delay_ns;
        tap.delay_samples = static_cast<std::size_t>(std::llround(pt.delay_ns * 1e-9 * g.f_s));
        tap.doppler_hz = ch.nu_max > 0.0 ? uni(rng) * ch.nu_max : 0.0;
        if (on_grid_doppler) tap.doppler_hz = std::round(tap.doppler_hz / doppler_bin) * doppler_bin;
        ch.taps.push_back(tap);
    }

    if (require_cp_cover && g.N_tf > 0 && ch.max_delay_samples() >= g.L_cp)
        throw std::runtime_error("channel: CP shorter than delay spread (max " +
                                 std::to_string(ch.max_delay_samples()) + " samples, L_cp " +
                                 std::to_string(g.L_cp) + ")");
    return ch;
}

namespace {

inline cplx tap_phase(const ChannelTap& t, const ChannelRealization& ch, double T_s, long q) {
    const double ref = ch.phase_ref == PhaseRef::delayed
                           ? static_cast<double>(q - static_cast<long>(t.delay_samples))
                           : static_cast<double>(q);
    const double ang = kTwoPi * t.doppler_hz * ref * T_s;
    return {std::cos(ang), std::sin(ang)};
}

}  // namespace

CplxVec apply_channel(const CplxVec& frame, const ChannelRealization& ch, const FrameGeometry& g) {
    const std::size_t len = g.frame_len();
    if (frame.size() != len) throw std::invalid_argument("apply_channel: frame length != M*N");
    for (const auto& t : ch.taps)
        if (t.delay_samples >= len) throw std::invalid_argument("apply_channel: tap delay >= M*N");

    CplxVec out(len, cplx{0.0, 0.0});
    for (const auto& t : ch.taps) {
        const long l = static_cast<long>(t.delay_samples);
        for (std::size_t q = 0; q < len; ++q) {
            long src = static_cast<long>(q) - l;
            if (src < 0) {
                if (ch.mode == EdgeMode::linear) continue;
                src += static_cast<long>(len);
            }
            out[q] += t.gain * tap_phase(t, ch, g.T_s, static_cast<long>(q)) *
                      frame[static_cast<std::size_t>(src)];
        }
    }
    return out;
}

CplxVec SparseHt::multiply(const CplxVec& x) const {
    if (x.size() != dim) throw std::invalid_argument("SparseHt: vector length mismatch");
    CplxVec y(dim, cplx{0.0, 0.0});
    for (std::size_t q = 0; q < dim; ++q)
        for (const auto& [c, v] : rows[q]) y[q] += v * x[c];
    return y;
}

SparseHt build_Ht(const ChannelRealization& ch, const FrameGeometry& g) {
    const std::size_t len = g.frame_len();
    for (const auto& t : ch.taps)
        if (t.delay_samples >= len) throw std::invalid_argument("build_Ht: tap delay >= M*N");

    SparseHt H;
    H.dim = len;
    H.rows.resize(len);
    for (const auto& t : ch.taps) {
        const long l = static_cast<long>(t.delay_samples);
        for (std::size_t q = 0; q < len; ++q) {
            long src = static_cast<long>(q) - l;
            if (src < 0) {
                if (ch.mode == EdgeMode::linear) continue;
                src += static_cast<long>(len);
            }
            const cplx val = t.gain * tap_phase(t, ch, g.T_s, static_cast<long>(q));
            auto& row = H.rows[q];
            bool merged = false;
            for (auto& [c, v] : row) {
                if (c == static_cast<std::uint32_t>(src)) {
                    v += val;
                    merged = true;
                    break;
                }
            }
            if (!merged) row.emplace_back(static_cast<std::uint32_t>(src), val);
        }
    }
    return H;
}

CMat build_Htf(const ChannelRealization& ch, const FrameGeometry& g) {
    CMat H(g.M, g.N);
    for (const auto& t : ch.taps) {
        const double l = static_cast<double>(t.delay_samples);
        for (std::size_t n = 0; n < g.N; ++n) {
            const double ang_t = kTwoPi * t.doppler_hz * static_cast<double>(n * g.M) * g.T_s;
            const cplx ph_t{std::cos(ang_t), std::sin(ang_t)};
            for (std::size_t m = 0; m < g.M; ++m) {
                const double ang_f = -kTwoPi * static_cast<double>(m) * l / static_cast<double>(g.M);
                H(m, n) += t.gain * ph_t * cplx{std::cos(ang_f), std::sin(ang_f)};
            }
        }
    }
    return H;
}

CplxVec ofdm_freq_response(const ChannelRealization& ch, std::size_t symbol_index,
                           const FrameGeometry& g, double extra_ref_samples) {
    if (symbol_index >= g.N) throw std::invalid_argument("ofdm_freq_response: symbol index out of range");
    const std::size_t P = g.ofdm_symbol_len();
    const double t_n =
        (static_cast<double>(symbol_index * g.M + g.L_cp) + extra_ref_samples) * g.T_s;
    CplxVec h(P, cplx{0.0, 0.0});
    for (const auto& t : ch.taps) {
        const double ang_d = kTwoPi * t.doppler_hz * t_n;
        const cplx ph_d{std::cos(ang_d), std::sin(ang_d)};
        const double l = static_cast<double>(t.delay_samples);
        for (std::size_t k = 0; k < P; ++k) {
            const double ang = -kTwoPi * static_cast<double>(k) * l / static_cast<double>(P);
            h[k] += t.gain * ph_d * cplx{std::cos(ang), std::sin(ang)};
        }
    }
    return h;
}

CplxVec add_awgn(const CplxVec& frame, const NoiseModel& noise, std::mt19937_64& rng) {
    if (noise.sigma2 <= 0.0) throw std::invalid_argument("add_awgn: sigma2 must be positive");
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise.sigma2 / 2.0));
    CplxVec out(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i)
        out[i] = frame[i] + cplx{gauss(rng), gauss(rng)};
    return out;
}

CplxVec build_pilot_frame(const FrameGeometry& g, std::size_t l_p, std::size_t k_p,
                          double pilot_amp) {
    if (l_p >= g.M || k_p >= g.N) throw std::invalid_argument("pilot: bin outside the M x N grid");
    // Standalone-OTFS frame (r = 1): DD grid -> ISFFT -> Heisenberg, which
    // collapses to a row-wise inverse DFT of the DD grid.
    CMat dd(g.M, g.N);
    dd(l_p, k_p) = cplx{pilot_amp, 0.0};
    CMat tf = isfft(dd, IsfftDirection::dd_to_tf);
    return heisenberg_tf_to_time(tf);
}

ChannelRealization estimate_dd_channel(const CplxVec& received_pilot, const FrameGeometry& g,
                                       const NoiseModel& noise, double kappa,
                                       std::size_t l_p, std::size_t k_p, double pilot_amp,
                                       std::size_t max_delay) {
    if (received_pilot.size() != g.frame_len())
        throw std::invalid_argument("estimate_dd_channel: frame length != M*N");
    if (noise.sigma2 <= 0.0) throw std::invalid_argument("estimate_dd_channel: sigma2 must be positive");
    if (pilot_amp <= 0.0) throw std::invalid_argument("estimate_dd_channel: pilot amplitude must be positive");
    if (max_delay == 0) max_delay = g.M / 2;

    // Back to the DD domain: Wigner per column, then the symplectic inverse.
    CMat tf = heisenberg_time_to_tf(received_pilot, g);
    CMat dd = isfft(tf, IsfftDirection::tf_to_dd);

    const double threshold = kappa * std::sqrt(noise.sigma2);
    const double doppler_bin = 1.0 / (static_cast<double>(g.N) * g.M * g.T_s);

    ChannelRealization ch;
    ch.mode = EdgeMode::linear;
    ch.profile = "estimated";
    for (std::size_t m = 0; m < g.M; ++m) {
        for (std::size_t t = 0; t < g.N; ++t) {
            if (std::abs(dd(m, t)) <= threshold) continue;
            const std::size_t l = (m + g.M - l_p) % g.M;
            if (l > max_delay) continue;  // outside the plausible delay window
            long k = static_cast<long>((t + g.N - k_p) % g.N);
            if (k > static_cast<long>(g.N / 2)) k -= static_cast<long>(g.N);

            ChannelTap tap;
            tap.delay_samples = l;
            tap.delay_ns = static_cast<double>(l) * g.T_s * 1e9;
            tap.doppler_hz = static_cast<double>(k) * doppler_bin;
            // Expected unit response at the pulse position carries the phase
            // exp(j 2 pi k l_p / (M N)); divide it out along with the amplitude.
            const double ang = kTwoPi * static_cast<double>(k) * static_cast<double>(l_p) /
                               static_cast<double>(g.M * g.N);
            tap.gain = dd(m, t) * cplx{std::cos(ang), -std::sin(ang)} / pilot_amp;
            ch.taps.push_back(tap);
            ch.nu_max = std::max(ch.nu_max, std::abs(tap.doppler_hz));
        }
    }
    if (ch.taps.empty())
        throw std::runtime_error("estimate_dd_channel: no DD bin above threshold (empty channel)");
    return ch;
}

}  // namespace hf
