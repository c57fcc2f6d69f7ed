#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hf/transforms.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace hf;

TEST_CASE("impulse transforms to a flat unitary spectrum") {
    CplxVec x{1, 0, 0, 0};
    auto X = unitary_dft(x, DftDirection::forward);
    for (const auto& v : X) CHECK(std::abs(v - cplx{0.5, 0.0}) < 1e-14);
}

TEST_CASE("forward/inverse round trip and Parseval") {
    auto g = hft::rng(1);
    for (std::size_t len : {1u, 2u, 8u, 11u, 16u, 48u, 352u, 512u}) {
        auto x = hft::random_vec(len, g);
        auto X = unitary_dft(x, DftDirection::forward);
        auto back = unitary_dft(X, DftDirection::inverse);
        CHECK(max_abs_diff(back, x) < 1e-12);
        CHECK(std::abs(energy(x) - energy(X)) < 1e-10 * std::max(1.0, energy(x)));
    }
    CHECK_THROWS_AS(unitary_dft({}, DftDirection::forward), std::invalid_argument);
}

TEST_CASE("brute-force DFT oracle at non-power-of-two sizes") {
    auto g = hft::rng(2);
    for (std::size_t len : {3u, 5u, 6u, 22u, 352u}) {
        auto x = hft::random_vec(len, g);
        auto X = unitary_dft(x, DftDirection::forward);
        for (std::size_t k = 0; k < len; ++k) {
            cplx acc{0, 0};
            for (std::size_t n = 0; n < len; ++n) {
                const double a = -2.0 * M_PI * double(n) * double(k) / double(len);
                acc += x[n] * cplx{std::cos(a), std::sin(a)};
            }
            acc /= std::sqrt(double(len));
            CHECK(std::abs(acc - X[k]) < 1e-10);
        }
    }
}

TEST_CASE("Doppler replication tiles columns with 1/sqrt(r)") {
    CMat s(1, 2);
    s(0, 0) = cplx{1.5, -0.25};  // a
    s(0, 1) = cplx{-2.0, 0.75};  // b
    auto out = replicate_doppler(s, 2);
    REQUIRE(out.cols() == 4);
    const double is2 = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out(0, 0) - is2 * s(0, 0)) < 1e-15);
    CHECK(std::abs(out(0, 1) - is2 * s(0, 1)) < 1e-15);
    CHECK(std::abs(out(0, 2) - is2 * s(0, 0)) < 1e-15);
    CHECK(std::abs(out(0, 3) - is2 * s(0, 1)) < 1e-15);

    CMat z(3, 2);
    auto zo = replicate_doppler(z, 4);
    CHECK(energy(zo) == 0.0);
}

TEST_CASE("replicated rows have zero spectrum on non-multiples of r") {
    // row-wise inverse DFT of the replicated grid vanishes off the r-grid
    auto g = hft::rng(3);
    auto s = hft::random_mat(4, 2, g);
    auto rep = replicate_doppler(s, 2);
    for (std::size_t m = 0; m < 4; ++m) {
        CplxVec row(rep.cols());
        for (std::size_t j = 0; j < rep.cols(); ++j) row[j] = rep(m, j);
        auto spec = unitary_dft(row, DftDirection::inverse);
        CHECK(std::abs(spec[1]) < 1e-12);
        CHECK(std::abs(spec[3]) < 1e-12);
    }
}

TEST_CASE("symplectic transform round trip and impulse duality") {
    auto g = hft::rng(4);
    auto x = hft::random_mat(8, 4, g);
    auto tf = isfft(x, IsfftDirection::dd_to_tf);
    auto back = isfft(tf, IsfftDirection::tf_to_dd);
    CHECK(max_abs_diff(back, x) < 1e-12);

    CMat imp(8, 4);
    imp(0, 0) = cplx{1.0, 0.0};
    auto flat = isfft(imp, IsfftDirection::dd_to_tf);
    const double mag = 1.0 / std::sqrt(8.0 * 4.0);
    for (const auto& v : flat.data()) CHECK(std::abs(std::abs(v) - mag) < 1e-12);
}

TEST_CASE("per-column time transform: round trip and locality") {
    const auto geo = hft::small_geometry();
    auto g = hft::rng(5);
    auto x = hft::random_mat(8, 4, g);
    FrameGeometry tiny = validate_geometry(8, 4, 2, 2, 2, 60e3, 28e9);
    auto t = heisenberg_tf_to_time(x);
    auto back = heisenberg_time_to_tf(t, tiny);
    CHECK(max_abs_diff(back, x) < 1e-12);

    CMat one_col(geo.M, geo.N);
    for (std::size_t m = 0; m < geo.M; ++m) one_col(m, 3) = hft::randn_c(g);
    auto tt = heisenberg_tf_to_time(one_col);
    for (std::size_t c = 0; c < geo.N; ++c) {
        double e = 0.0;
        for (std::size_t m = 0; m < geo.M; ++m) e += std::norm(tt[c * geo.M + m]);
        if (c == 3) CHECK(e > 0.0);
        else CHECK(e == 0.0);
    }
}

TEST_CASE("full DD chain occupies only the DD time columns") {
    const auto geo = hft::small_geometry();
    const auto mask = hybrid_mask(geo);
    auto g = hft::rng(6);
    auto s_dd = hft::random_mat(geo.M, geo.N_dd, g);
    auto rep = replicate_doppler(s_dd, geo);
    auto tf = isfft(rep, IsfftDirection::dd_to_tf);
    auto t = heisenberg_tf_to_time(tf);
    for (std::size_t c = 0; c < geo.N; ++c) {
        if (mask.is_otfs_column(c)) continue;
        for (std::size_t m = 0; m < geo.M; ++m)
            CHECK(std::abs(t[c * geo.M + m]) < 1e-12);
    }
}

TEST_CASE("zero interpolation places columns per the mask") {
    FrameGeometry geo = validate_geometry(4, 4, 2, 2, 1, 60e3, 28e9);
    const auto mask = hybrid_mask(geo);
    auto g = hft::rng(7);
    auto s_tf = hft::random_mat(4, 2, g);
    auto out = interpolate_time_zeros(s_tf, geo, mask);
    // N=4, N_dd=2, N_s=1: [0, c0, 0, c1]
    for (std::size_t m = 0; m < 4; ++m) {
        CHECK(out(m, 0) == cplx{0.0, 0.0});
        CHECK(out(m, 2) == cplx{0.0, 0.0});
        CHECK(out(m, 1) == s_tf(m, 0));
        CHECK(out(m, 3) == s_tf(m, 1));
    }

    // dense Kronecker oracle: out = s_tf * (I_{N_dd} (x) [0 | I_{N_s}])
    FrameGeometry geo2 = validate_geometry(3, 6, 2, 4, 1, 60e3, 28e9);
    const auto mask2 = hybrid_mask(geo2);
    auto s2 = hft::random_mat(3, 4, g);
    auto out2 = interpolate_time_zeros(s2, geo2, mask2);
    std::vector<std::vector<double>> sel(4, std::vector<double>(6, 0.0));
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t j = 0; j < 2; ++j) sel[d * 2 + j][d * 3 + 1 + j] = 1.0;
    for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t c = 0; c < 6; ++c) {
            cplx acc{0, 0};
            for (std::size_t j = 0; j < 4; ++j) acc += s2(m, j) * sel[j][c];
            CHECK(std::abs(out2(m, c) - acc) < 1e-15);
        }
    }

    CHECK_THROWS_AS(interpolate_time_zeros(hft::random_mat(4, 3, g), geo, mask),
                    std::invalid_argument);
}

TEST_CASE("CP precoding: impulse block, CP identity, energy split") {
    const std::size_t M = 8, L = 2, P = M - L;
    const CpPrecoder pre{M, L};

    // impulse trace: s_bar = DFT of an impulse -> CP'd impulse block
    CplxVec imp(P, cplx{0, 0});
    imp[0] = cplx{1, 0};
    auto s_bar = unitary_dft(imp, DftDirection::forward);
    auto x = cp_precode(s_bar, pre);
    auto t = unitary_dft(x, DftDirection::inverse);
    for (std::size_t i = 0; i < M; ++i) {
        const double expect = i == L ? 1.0 : 0.0;  // impulse lands after the CP
        CHECK(std::abs(t[i] - cplx{expect, 0.0}) < 1e-12);
    }

    auto g = hft::rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto sb = hft::random_vec(P, g);
        auto fx = cp_precode(sb, pre);
        auto td = unitary_dft(fx, DftDirection::inverse);
        // first L samples replicate the last L
        for (std::size_t i = 0; i < L; ++i) CHECK(std::abs(td[i] - td[M - L + i]) < 1e-12);
        // trailing M-L samples are the user's own inverse DFT
        auto own = unitary_dft(sb, DftDirection::inverse);
        for (std::size_t i = 0; i < P; ++i) CHECK(std::abs(td[L + i] - own[i]) < 1e-12);
        // exact per-instance energy: ||x||^2 = ||s||^2 + ||tail(IDFT(s), L)||^2
        double tail = 0.0;
        for (std::size_t i = P - L; i < P; ++i) tail += std::norm(own[i]);
        CHECK(std::abs(energy(fx) - (energy(sb) + tail)) < 1e-12);
    }

    // mean energy ratio over random draws approaches M / (M - L_cp)
    double ratio_sum = 0.0;
    const int trials = 4000;
    for (int trial = 0; trial < trials; ++trial) {
        auto sb = hft::random_vec(P, g);
        ratio_sum += energy(cp_precode(sb, pre)) / energy(sb);
    }
    CHECK(ratio_sum / trials ==
          doctest::Approx(double(M) / double(P)).epsilon(0.02));

    CHECK_THROWS_AS(cp_precode(hft::random_vec(P + 1, g), pre), std::invalid_argument);
}

TEST_CASE("CP removal discards the prefix and inverts the precoder") {
    const CpPrecoder pre{6, 2};
    CplxVec v{{1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {6, 0}};
    auto out = cp_remove(v, pre);
    REQUIRE(out.size() == 4);
    CHECK(out[0] == cplx{3, 0});
    CHECK(out[3] == cplx{6, 0});

    auto g = hft::rng(9);
    auto sb = hft::random_vec(4, g);
    auto round = cp_remove(unitary_dft(cp_precode(sb, pre), DftDirection::inverse), pre);
    auto own = unitary_dft(sb, DftDirection::inverse);
    CHECK(max_abs_diff(round, own) < 1e-12);

    CplxVec zeros(6, cplx{0, 0});
    CHECK(energy(cp_remove(zeros, pre)) == 0.0);
    CHECK_THROWS_AS(cp_remove(hft::random_vec(5, g), pre), std::invalid_argument);
}

TEST_CASE("interpolation/tiling identity across sizes") {
    auto g = hft::rng(10);
    for (auto [l, i] : {std::pair<std::size_t, std::size_t>{4, 2}, {6, 4}, {5, 3}, {16, 2}}) {
        auto s = hft::random_vec(l, g);
        CplxVec interleaved(l * i, cplx{0, 0});
        for (std::size_t n = 0; n < l; ++n) interleaved[n * i] = s[n];
        auto lhs = unitary_dft(interleaved, DftDirection::inverse);
        auto base = unitary_dft(s, DftDirection::inverse);
        double err = 0.0;
        for (std::size_t n = 0; n < l * i; ++n)
            err = std::max(err, std::abs(lhs[n] - base[n % l] / std::sqrt(double(i))));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("transmit-side supports stay disjoint for random payload grids") {
    const auto geo = hft::small_geometry();
    const auto mask = hybrid_mask(geo);
    auto g = hft::rng(11);
    auto s_dd = hft::random_mat(geo.M, geo.N_dd, g);
    auto s_tf = hft::random_mat(geo.M, geo.N_tf, g);

    auto dd_time = heisenberg_tf_to_time(isfft(replicate_doppler(s_dd, geo), IsfftDirection::dd_to_tf));
    auto tf_time = heisenberg_tf_to_time(interpolate_time_zeros(s_tf, geo, mask));
    cplx ip{0, 0};
    for (std::size_t q = 0; q < dd_time.size(); ++q) ip += std::conj(dd_time[q]) * tf_time[q];
    CHECK(std::abs(ip) < 1e-10);
}
