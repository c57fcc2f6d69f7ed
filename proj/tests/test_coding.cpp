#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hf/ldpc.hpp"
#include "hf/qam.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdio>

using namespace hf;

namespace {
const char* kAlist = HF_TEST_DATA_DIR "/ldpc_r12_n16368.alist";
}

// ---------------------------------------------------------------------------
// QAM
// ---------------------------------------------------------------------------

TEST_CASE("QPSK Gray constellation: unit energy, adjacent points differ in one bit") {
    BitVec bits{0, 0, 0, 1, 1, 1, 1, 0};
    auto syms = qam_map(bits, 4);
    REQUIRE(syms.size() == 4);
    for (const auto& s : syms) CHECK(std::abs(s) == doctest::Approx(1.0));
    // all four points distinct
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) CHECK(std::abs(syms[i] - syms[j]) > 0.1);
    // Gray property across 16QAM: nearest neighbors differ in exactly 1 bit
    BitVec b16;
    for (int v = 0; v < 16; ++v)
        for (int k = 3; k >= 0; --k) b16.push_back((v >> k) & 1);
    auto s16 = qam_map(b16, 16);
    for (int a = 0; a < 16; ++a) {
        for (int b = 0; b < 16; ++b) {
            const double d = std::abs(s16[a] - s16[b]);
            if (d > 0.0 && d < 2.1 / std::sqrt(10.0)) {
                int diff = 0;
                for (int k = 0; k < 4; ++k) diff += b16[4 * a + k] != b16[4 * b + k];
                CHECK(diff == 1);
            }
        }
    }
}

TEST_CASE("mean symbol energy is 1 for every order") {
    auto g = hft::rng(21);
    for (unsigned order : {4u, 16u, 64u}) {
        auto bits = hft::random_bits(qam_bits_per_symbol(order) * 100000, g);
        auto syms = qam_map(bits, order);
        double e = 0.0;
        for (const auto& s : syms) e += std::norm(s);
        CHECK(e / double(syms.size()) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("map -> hard demap is the identity on bits") {
    auto g = hft::rng(22);
    for (unsigned order : {4u, 16u, 64u}) {
        auto bits = hft::random_bits(qam_bits_per_symbol(order) * 500, g);
        CHECK(qam_hard_demap(qam_map(bits, order), order) == bits);
    }
    CHECK_THROWS_AS(qam_map(BitVec{1, 0, 1}, 16), std::invalid_argument);
    CHECK_THROWS_AS(qam_map(BitVec{1, 0}, 8), std::invalid_argument);
}

TEST_CASE("LLR signs match bits on clean symbols with large magnitudes") {
    auto g = hft::rng(23);
    for (unsigned order : {4u, 16u, 64u}) {
        auto bits = hft::random_bits(qam_bits_per_symbol(order) * 64, g);
        auto syms = qam_map(bits, order);
        std::vector<double> var(syms.size(), 1e-4);
        auto llr = qam_llr(syms, var, order);
        REQUIRE(llr.size() == bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            CHECK(std::abs(llr[i]) > 100.0);
            CHECK((llr[i] > 0 ? 0 : 1) == bits[i]);
        }
    }
}

TEST_CASE("midpoint between two points differing in one bit gives zero LLR") {
    // 16QAM axis levels are (-3,-1,+1,+3)/sqrt(10); halfway between +1 and +3
    // the second axis bit is undecidable, the first is not.
    const double s = 1.0 / std::sqrt(10.0);
    CplxVec sym{cplx{2.0 * s, 3.0 * s}};
    std::vector<double> var{0.5};
    auto llr = qam_llr(sym, var, 16);
    CHECK(std::abs(llr[1]) < 1e-9);
    CHECK(std::abs(llr[0]) > 0.1);
}

TEST_CASE("max-log LLR decisions match brute-force minimum distance") {
    auto g = hft::rng(24);
    for (unsigned order : {4u, 16u, 64u}) {
        const std::size_t bps = qam_bits_per_symbol(order);
        BitVec all;
        for (unsigned v = 0; v < order; ++v)
            for (int k = int(bps) - 1; k >= 0; --k) all.push_back((v >> k) & 1);
        auto points = qam_map(all, order);

        auto noisy = hft::random_bits(bps * 2500, g);
        auto syms = qam_map(noisy, order);
        std::normal_distribution<double> n(0.0, 0.35);
        for (auto& s : syms) s += cplx{n(g), n(g)};
        std::vector<double> var(syms.size(), 2 * 0.35 * 0.35);
        auto llr = qam_llr(syms, var, order);

        for (std::size_t si = 0; si < syms.size(); ++si) {
            std::size_t best = 0;
            double bestd = 1e300;
            for (std::size_t p = 0; p < points.size(); ++p) {
                const double d = std::norm(syms[si] - points[p]);
                if (d < bestd) { bestd = d; best = p; }
            }
            for (std::size_t k = 0; k < bps; ++k) {
                const int llr_bit = llr[si * bps + k] > 0 ? 0 : 1;
                CHECK(llr_bit == all[best * bps + k]);
            }
        }
    }
}

TEST_CASE("LLR rejects non-positive variances") {
    CplxVec sym{cplx{1.0, 0.0}};
    CHECK_THROWS_AS(qam_llr(sym, {0.0}, 4), std::invalid_argument);
    CHECK_THROWS_AS(qam_llr(sym, {-1.0}, 4), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// LDPC
// ---------------------------------------------------------------------------

TEST_CASE("shipped code loads with the advertised frame") {
    const auto code = load_alist(kAlist);
    CHECK(code.n == 16368);
    CHECK(code.k == 8184);
    CHECK(code.num_checks() == 8184);
    CHECK(double(code.k) / double(code.n) == doctest::Approx(0.5));
}

TEST_CASE("alist save/load round trip") {
    const auto code = load_alist(kAlist);
    const std::string tmp = "roundtrip.alist";
    save_alist(code, tmp);
    const auto again = load_alist(tmp);
    CHECK(again.n == code.n);
    CHECK(again.k == code.k);
    CHECK(again.row_cols == code.row_cols);
    CHECK(again.col_rows == code.col_rows);
    std::remove(tmp.c_str());
}

TEST_CASE("encoder: zero message, parity satisfaction, linearity") {
    const auto code = load_alist(kAlist);
    const LdpcEncoder enc(code);

    BitVec zero(code.k, 0);
    auto zcw = enc.encode(zero);
    CHECK(std::count(zcw.begin(), zcw.end(), 1) == 0);

    auto g = hft::rng(25);
    auto m1 = hft::random_bits(code.k, g);
    auto m2 = hft::random_bits(code.k, g);
    auto c1 = enc.encode(m1);
    auto c2 = enc.encode(m2);
    CHECK(ldpc_check(code, c1));
    CHECK(ldpc_check(code, c2));

    BitVec mx(code.k);
    for (std::size_t i = 0; i < code.k; ++i) mx[i] = m1[i] ^ m2[i];
    auto cx = enc.encode(mx);
    for (std::size_t i = 0; i < code.n; ++i) CHECK(cx[i] == (c1[i] ^ c2[i]));

    CHECK_THROWS_AS(enc.encode(BitVec(code.k - 1, 0)), std::invalid_argument);
}

TEST_CASE("decoder: noiseless convergence in one iteration") {
    const auto code = load_alist(kAlist);
    const LdpcEncoder enc(code);
    auto g = hft::rng(26);
    auto msg = hft::random_bits(code.k, g);
    auto cw = enc.encode(msg);
    std::vector<double> llr(code.n);
    for (std::size_t i = 0; i < code.n; ++i) llr[i] = cw[i] ? -20.0 : 20.0;
    auto res = ldpc_decode(llr, code);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(res.message == msg);
}

TEST_CASE("decoder corrects flipped low-confidence bits") {
    const auto code = load_alist(kAlist);
    const LdpcEncoder enc(code);
    auto g = hft::rng(27);
    auto msg = hft::random_bits(code.k, g);
    auto cw = enc.encode(msg);
    std::vector<double> llr(code.n);
    for (std::size_t i = 0; i < code.n; ++i) llr[i] = cw[i] ? -8.0 : 8.0;
    llr[1234] = cw[1234] ? 0.5 : -0.5;  // flipped, low magnitude
    llr[77] = cw[77] ? 1.0 : -1.0;      // flipped
    auto res = ldpc_decode(llr, code);
    CHECK(res.converged);
    CHECK(res.message == msg);
}

TEST_CASE("decoder flags pure noise as unconverged") {
    const auto code = load_alist(kAlist);
    auto g = hft::rng(28);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> llr(code.n);
    for (auto& v : llr) v = n(g);
    auto res = ldpc_decode(llr, code, 20);
    CHECK(!res.converged);
    CHECK(res.iterations == 20);
}

TEST_CASE("round trip is exact at zero noise for many random messages") {
    const auto code = load_alist(kAlist);
    const LdpcEncoder enc(code);
    auto g = hft::rng(29);
    for (int t = 0; t < 1000; ++t) {
        auto msg = hft::random_bits(code.k, g);
        auto cw = enc.encode(msg);
        REQUIRE(ldpc_check(code, cw));
        if (t % 100 == 0) {
            std::vector<double> llr(code.n);
            for (std::size_t i = 0; i < code.n; ++i) llr[i] = cw[i] ? -15.0 : 15.0;
            auto res = ldpc_decode(llr, code);
            REQUIRE(res.converged);
            REQUIRE(res.message == msg);
        }
    }
}

TEST_CASE("decoder pulls BER to zero in the waterfall where raw BER is high") {
    // BPSK over AWGN at Eb/N0 1.6 dB: raw hard-decision BER ~ 6e-2.
    const auto code = load_alist(kAlist);
    const LdpcEncoder enc(code);
    auto g = hft::rng(30);
    const double esn0 = std::pow(10.0, 1.6 / 10.0);  // Es/N0 = 2 R Eb/N0 = Eb/N0 at R=1/2
    const double sigma = std::sqrt(1.0 / esn0);
    std::normal_distribution<double> noise(0.0, sigma);

    std::size_t raw_err = 0, coded_err = 0;
    for (int t = 0; t < 3; ++t) {
        auto msg = hft::random_bits(code.k, g);
        auto cw = enc.encode(msg);
        std::vector<double> llr(code.n);
        for (std::size_t i = 0; i < code.n; ++i) {
            const double tx = cw[i] ? -1.0 : 1.0;
            const double y = tx + noise(g);
            raw_err += (y < 0) != (cw[i] == 1);
            llr[i] = 2.0 * y / (sigma * sigma);
        }
        auto res = ldpc_decode(llr, code);
        for (std::size_t i = 0; i < code.k; ++i) coded_err += res.message[i] != msg[i];
    }
    CHECK(raw_err > 500);
    CHECK(coded_err == 0);
}
