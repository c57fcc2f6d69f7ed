#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hf/channel.hpp"
#include "hf/transforms.hpp"
#include "hf/tx_builder.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace hf;

namespace {
const std::string kDataDir = HF_TEST_DATA_DIR;
}

TEST_CASE("profile loading normalizes total power and ignores comments") {
    const auto eva = load_profile_file(kDataDir + "/eva.txt", "eva");
    REQUIRE(eva.taps.size() == 9);
    double total = 0.0;
    for (const auto& t : eva.taps) total += std::pow(10.0, t.power_db / 10.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eva.taps.back().delay_ns == 2510.0);
    CHECK_THROWS_AS(load_profile_file(kDataDir + "/nope.txt"), std::runtime_error);
}

TEST_CASE("identity profile resolves without files") {
    const auto p = resolve_profile("identity");
    REQUIRE(p.taps.size() == 1);
    CHECK(p.taps[0].delay_ns == 0.0);
}

TEST_CASE("max Doppler arithmetic") {
    CHECK(max_doppler_hz(300.0, 28e9) == doctest::Approx(7777.8).epsilon(0.1 / 7777.8));
    CHECK(max_doppler_hz(0.0, 28e9) == 0.0);
}

TEST_CASE("EVA delays quantize to 77 samples at 30.72 MHz") {
    const auto g = validate_geometry(512, 16, 8, 8, 160, 60e3, 28e9);
    const auto eva = load_profile_file(kDataDir + "/eva.txt", "eva");
    auto rng = hft::rng(41);
    auto ch = sample_realization(eva, 120.0, g, rng);
    CHECK(ch.max_delay_samples() == 77);
    // zero velocity: all Doppler exactly zero
    auto ch0 = sample_realization(eva, 0.0, g, rng);
    for (const auto& t : ch0.taps) CHECK(t.doppler_hz == 0.0);
    // Doppler bounded by nu_max
    for (const auto& t : ch.taps) {
        CHECK(t.doppler_hz >= 0.0);
        CHECK(t.doppler_hz <= ch.nu_max);
    }
}

TEST_CASE("ETU delay spread exceeding the CP is rejected by name") {
    const auto g = validate_geometry(512, 16, 8, 8, 64, 60e3, 28e9);
    const auto etu = load_profile_file(kDataDir + "/etu.txt", "etu");
    auto rng = hft::rng(42);
    CHECK_THROWS_WITH_AS(sample_realization(etu, 30.0, g, rng),
                         doctest::Contains("CP shorter than delay spread"), std::runtime_error);
    // pure-DD frames skip the CP validation
    auto ch = sample_realization(etu, 30.0, g, rng, EdgeMode::linear, PhaseRef::delayed,
                                 /*require_cp_cover=*/false);
    CHECK(ch.max_delay_samples() == 154);
}

TEST_CASE("realization sampling is deterministic per stream") {
    const auto g = validate_geometry(64, 8, 4, 4, 16, 60e3, 28e9);
    const auto eva = load_profile_file(kDataDir + "/eva.txt", "eva");
    auto r1 = hft::rng(43), r2 = hft::rng(43);
    auto a = sample_realization(eva, 120.0, g, r1, EdgeMode::linear, PhaseRef::delayed, false);
    auto b = sample_realization(eva, 120.0, g, r2, EdgeMode::linear, PhaseRef::delayed, false);
    for (std::size_t i = 0; i < a.taps.size(); ++i) {
        CHECK(a.taps[i].gain == b.taps[i].gain);
        CHECK(a.taps[i].doppler_hz == b.taps[i].doppler_hz);
    }
}

TEST_CASE("identity channel and pure delay shift") {
    const auto g = hft::small_geometry();
    auto rng = hft::rng(44);
    auto s = hft::random_vec(g.frame_len(), rng);

    auto out = apply_channel(s, hft::identity_channel(), g);
    CHECK(max_abs_diff(out, s) < 1e-15);

    ChannelRealization shift;
    shift.taps.push_back(hft::tap(cplx{1, 0}, 3, 0.0));
    auto shifted = apply_channel(s, shift, g);
    for (std::size_t q = 0; q < 3; ++q) CHECK(shifted[q] == cplx{0.0, 0.0});
    for (std::size_t q = 3; q < s.size(); ++q) CHECK(std::abs(shifted[q] - s[q - 3]) < 1e-15);
}

TEST_CASE("matrix oracle: apply_channel equals H_t multiplication, both modes") {
    const auto g = hft::small_geometry();
    auto rng = hft::rng(45);
    std::uniform_int_distribution<std::size_t> delay(0, 12);
    std::uniform_real_distribution<double> dop(0.0, 5000.0);
    for (int trial = 0; trial < 20; ++trial) {
        ChannelRealization ch;
        const int ntaps = 1 + int(rng() % 4);
        for (int i = 0; i < ntaps; ++i)
            ch.taps.push_back(hft::tap(0.7 * hft::randn_c(rng), delay(rng), dop(rng)));
        ch.mode = trial % 2 ? EdgeMode::cyclic : EdgeMode::linear;
        ch.phase_ref = trial % 3 ? PhaseRef::delayed : PhaseRef::absolute;
        auto s = hft::random_vec(g.frame_len(), rng);
        auto direct = apply_channel(s, ch, g);
        auto via = build_Ht(ch, g).multiply(s);
        CHECK(max_abs_diff(direct, via) < 1e-9);
    }
}

TEST_CASE("H_t structure: identity and per-row nonzeros at q - l") {
    const auto g = validate_geometry(8, 4, 2, 2, 2, 60e3, 28e9);
    auto H = build_Ht(hft::identity_channel(), g);
    for (std::size_t q = 0; q < H.dim; ++q) {
        REQUIRE(H.rows[q].size() == 1);
        CHECK(H.rows[q][0].first == q);
        CHECK(std::abs(H.rows[q][0].second - cplx{1.0, 0.0}) < 1e-15);
    }

    ChannelRealization ch;
    ch.taps.push_back(hft::tap(cplx{0.5, 0.25}, 3, 1000.0));
    ch.taps.push_back(hft::tap(cplx{0.25, 0}, 5, 0.0));
    auto H2 = build_Ht(ch, g);
    for (std::size_t q = 0; q < H2.dim; ++q) {
        for (const auto& [c, v] : H2.rows[q]) {
            CHECK((q - c == 3 || q - c == 5));
        }
        std::size_t expect = (q >= 5) ? 2 : (q >= 3 ? 1 : 0);
        CHECK(H2.rows[q].size() == expect);
    }
}

TEST_CASE("zero-Doppler cyclic H_t is a frame-level circulant") {
    const auto g = validate_geometry(8, 4, 2, 2, 2, 60e3, 28e9);
    ChannelRealization ch;
    ch.mode = EdgeMode::cyclic;
    ch.taps.push_back(hft::tap(cplx{0.8, 0.1}, 0, 0.0));
    ch.taps.push_back(hft::tap(cplx{0.3, -0.2}, 3, 0.0));
    auto H = build_Ht(ch, g);
    const std::size_t L = H.dim;
    for (std::size_t q = 0; q < L; ++q) {
        for (const auto& [c, v] : H.rows[q]) {
            const std::size_t lag = (q + L - c) % L;
            // same value for the same lag on every row
            const auto& ref = H.rows[0];
            for (const auto& [c0, v0] : ref)
                if ((0 + L - c0) % L == lag) CHECK(std::abs(v - v0) < 1e-15);
        }
    }
}

TEST_CASE("ideal-pulse TF response: flat, linear phase, DFT oracle") {
    const auto g = hft::small_geometry();
    auto flat = build_Htf(hft::identity_channel(), g);
    for (const auto& v : flat.data()) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);

    ChannelRealization one_tap;
    one_tap.taps.push_back(hft::tap(cplx{1, 0}, 5, 0.0));
    auto H = build_Htf(one_tap, g);
    for (std::size_t n = 0; n < g.N; ++n)
        for (std::size_t m = 0; m < g.M; ++m) {
            const double ang = -2.0 * std::numbers::pi * double(m) * 5.0 / double(g.M);
            CHECK(std::abs(H(m, n) - cplx{std::cos(ang), std::sin(ang)}) < 1e-12);
        }

    // zero-Doppler multi-tap: every column equals the size-M DFT of the
    // impulse response (non-unitary grid response)
    ChannelRealization multi;
    auto rng = hft::rng(46);
    multi.taps.push_back(hft::tap(hft::randn_c(rng), 0, 0.0));
    multi.taps.push_back(hft::tap(hft::randn_c(rng), 4, 0.0));
    multi.taps.push_back(hft::tap(hft::randn_c(rng), 9, 0.0));
    auto Hm = build_Htf(multi, g);
    CplxVec imp(g.M, cplx{0, 0});
    for (const auto& t : multi.taps) imp[t.delay_samples] += t.gain;
    auto resp = unitary_dft(imp, DftDirection::forward);
    for (auto& v : resp) v *= std::sqrt(double(g.M));
    for (std::size_t n = 0; n < g.N; ++n)
        for (std::size_t m = 0; m < g.M; ++m) CHECK(std::abs(Hm(m, n) - resp[m]) < 1e-9);
}

TEST_CASE("per-symbol frequency response: identity, unimodular Doppler") {
    const auto g = hft::small_geometry();
    auto h = ofdm_freq_response(hft::identity_channel(), 1, g);
    REQUIRE(h.size() == g.ofdm_symbol_len());
    for (const auto& v : h) CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);

    ChannelRealization dop;
    dop.taps.push_back(hft::tap(cplx{1, 0}, 0, 3000.0));
    auto hd = ofdm_freq_response(dop, 3, g);
    for (const auto& v : hd) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);

    CHECK_THROWS_AS(ofdm_freq_response(dop, g.N, g), std::invalid_argument);
}

TEST_CASE("AWGN: limiting behavior, variance, determinism") {
    const auto g = hft::small_geometry();
    auto rng = hft::rng(47);
    auto s = hft::random_vec(g.frame_len(), rng);

    auto r1 = hft::rng(7);
    auto almost = add_awgn(s, NoiseModel{1e-30}, r1);
    CHECK(max_abs_diff(almost, s) < 1e-12);

    // sample variance over 1e6 samples at sigma2 = 1
    CplxVec zeros(1u << 20, cplx{0, 0});
    auto r2 = hft::rng(8);
    auto noisy = add_awgn(zeros, NoiseModel{1.0}, r2);
    CHECK(energy(noisy) / double(zeros.size()) == doctest::Approx(1.0).epsilon(0.01));

    auto r3a = hft::rng(9), r3b = hft::rng(9);
    auto n1 = add_awgn(s, NoiseModel{0.25}, r3a);
    auto n2 = add_awgn(s, NoiseModel{0.25}, r3b);
    CHECK(max_abs_diff(n1, n2) == 0.0);

    CHECK_THROWS_AS(add_awgn(s, NoiseModel{0.0}, r3a), std::invalid_argument);
}

TEST_CASE("channel energy is preserved in expectation over realizations") {
    const auto g = validate_geometry(32, 8, 4, 4, 8, 60e3, 28e9);
    ChannelProfile prof;
    prof.name = "synthetic";
    prof.taps = {{0.0, 0.0}, {60.0, -3.0}, {120.0, -6.0}};
    double total = 0.0;
    for (auto& t : prof.taps) total += std::pow(10.0, t.power_db / 10.0);
    for (auto& t : prof.taps) t.power_db -= 10.0 * std::log10(total);

    auto rng = hft::rng(48);
    auto s = hft::random_vec(g.frame_len(), rng);
    const double es = energy(s);
    double acc = 0.0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        auto ch = sample_realization(prof, 60.0, g, rng, EdgeMode::cyclic);
        acc += energy(apply_channel(s, ch, g));
    }
    CHECK(acc / trials / es == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("pilot estimator recovers an on-grid channel exactly (cyclic)") {
    const auto g = validate_geometry(64, 8, 8, 0, 8, 60e3, 28e9);
    const double doppler_bin = 1.0 / (double(g.N) * double(g.M) * g.T_s);
    const std::size_t l_p = 4, k_p = 1;

    ChannelRealization ch;
    ch.mode = EdgeMode::cyclic;
    const cplx true_gain{0.6, -0.3};
    ch.taps.push_back(hft::tap(true_gain, 5, 2.0 * doppler_bin));

    auto pilot = build_pilot_frame(g, l_p, k_p, 1.0);
    auto rx = apply_channel(pilot, ch, g);
    const NoiseModel tiny{1e-20};
    auto est = estimate_dd_channel(rx, g, tiny, 3.0, l_p, k_p, 1.0);
    REQUIRE(est.taps.size() == 1);
    CHECK(est.taps[0].delay_samples == 5);
    CHECK(est.taps[0].doppler_hz == doctest::Approx(2.0 * doppler_bin));
    CHECK(std::abs(est.taps[0].gain - true_gain) < 1e-6);
}

TEST_CASE("pilot estimator: identity channel gives a single unit tap") {
    const auto g = validate_geometry(64, 8, 8, 0, 8, 60e3, 28e9);
    auto pilot = build_pilot_frame(g, 0, 0, 1.0);
    auto rx = apply_channel(pilot, hft::identity_channel(), g);
    auto est = estimate_dd_channel(rx, g, NoiseModel{1e-20}, 3.0, 0, 0, 1.0);
    REQUIRE(est.taps.size() == 1);
    CHECK(est.taps[0].delay_samples == 0);
    CHECK(est.taps[0].doppler_hz == 0.0);
    CHECK(std::abs(est.taps[0].gain - cplx{1.0, 0.0}) < 1e-9);
}

TEST_CASE("pilot estimator: pure noise raises the empty-channel error") {
    const auto g = validate_geometry(16, 8, 8, 0, 4, 60e3, 28e9);
    CplxVec silent(g.frame_len(), cplx{0, 0});
    auto rng = hft::rng(49);
    int empties = 0;
    for (int t = 0; t < 20; ++t) {
        auto rx = add_awgn(silent, NoiseModel{0.01}, rng);
        try {
            estimate_dd_channel(rx, g, NoiseModel{0.01}, 3.0, 0, 0, 1.0);
        } catch (const std::runtime_error&) {
            ++empties;
        }
    }
    CHECK(empties >= 15);  // high probability on a 128-bin grid
}
