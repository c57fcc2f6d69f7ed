#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hf/grid.hpp"

#include <stdexcept>

using namespace hf;

TEST_CASE("reference parameters validate with r=2") {
    // [N, M] = [16, 512], split 8/8, 60 kHz spacing at 28 GHz
    const auto g = validate_geometry(512, 16, 8, 8, 160, 60e3, 28e9);
    CHECK(g.r == 2);
    CHECK(g.N_s == 1);
    CHECK(g.f_s == doctest::Approx(30.72e6));
    CHECK(g.T_s == doctest::Approx(1.0 / 30.72e6));
    CHECK(g.frame_len() == 8192);
}

TEST_CASE("pure-DD degenerate frame validates with r=1") {
    const auto g = validate_geometry(4, 4, 4, 0, 2, 15e3, 2e9);
    CHECK(g.r == 1);
    CHECK(g.N_s == 0);
    CHECK(hybrid_mask(g).otfs_columns.size() == 4);
    CHECK(hybrid_mask(g).ofdm_columns.empty());
}

TEST_CASE("non-integer replication factor is rejected by name") {
    CHECK_THROWS_WITH_AS(validate_geometry(512, 16, 5, 11, 160, 60e3, 28e9),
                         doctest::Contains("replication factor not integer"),
                         std::invalid_argument);
}

TEST_CASE("structural identities are enforced") {
    CHECK_THROWS_WITH_AS(validate_geometry(512, 16, 8, 7, 160, 60e3, 28e9),
                         doctest::Contains("N_dd + N_tf != N"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(validate_geometry(512, 16, 8, 8, 512, 60e3, 28e9),
                         doctest::Contains("L_cp >= M"), std::invalid_argument);
    CHECK_THROWS_AS(validate_geometry(512, 16, 8, 8, 0, 60e3, 28e9), std::invalid_argument);
    CHECK_THROWS_AS(validate_geometry(512, 16, 0, 16, 160, 60e3, 28e9), std::invalid_argument);
}

TEST_CASE("validation is idempotent") {
    const auto g = validate_geometry(512, 16, 8, 8, 160, 60e3, 28e9);
    const auto g2 = validate_geometry(g);
    CHECK(g2.M == g.M);
    CHECK(g2.N == g.N);
    CHECK(g2.N_dd == g.N_dd);
    CHECK(g2.N_tf == g.N_tf);
    CHECK(g2.N_s == g.N_s);
    CHECK(g2.L_cp == g.L_cp);
    CHECK(g2.r == g.r);
    CHECK(g2.f_s == g.f_s);
    CHECK(g2.T_s == g.T_s);
}

TEST_CASE("mask columns interleave with period r and partition the frame") {
    for (auto [M, N, N_dd, N_tf] :
         {std::tuple<int, int, int, int>{512, 16, 8, 8}, {512, 16, 4, 12}, {64, 8, 2, 6}}) {
        const auto g = validate_geometry(M, N, N_dd, N_tf, 16, 60e3, 28e9);
        const auto m = hybrid_mask(g);
        REQUIRE(m.otfs_columns.size() == g.N_dd);
        REQUIRE(m.ofdm_columns.size() == g.N_tf);
        // reconstructing from r alone reproduces the mask
        for (std::size_t k = 0; k < g.N_dd; ++k) CHECK(m.otfs_columns[k] == k * g.r);
        // disjoint, union = all columns
        std::vector<bool> seen(g.N, false);
        for (auto c : m.otfs_columns) seen[c] = true;
        for (auto c : m.ofdm_columns) {
            CHECK(!seen[c]);
            seen[c] = true;
        }
        for (bool s : seen) CHECK(s);
    }
}

TEST_CASE("standalone masks cover all columns") {
    const auto g = validate_geometry(64, 8, 4, 4, 16, 60e3, 28e9);
    const auto mo = standalone_otfs_mask(g);
    CHECK(mo.otfs_columns.size() == g.N);
    CHECK(mo.r_eff == 1);
    CHECK(mo.n_dd_eff == g.N);
    const auto mf = standalone_ofdm_mask(g);
    CHECK(mf.ofdm_columns.size() == g.N);
    CHECK(mf.n_dd_eff == 0);
}

TEST_CASE("column sample ranges tile the frame") {
    const auto g = validate_geometry(64, 8, 4, 4, 16, 60e3, 28e9);
    const auto m = hybrid_mask(g);
    std::size_t expect = 0;
    for (std::size_t c = 0; c < g.N; ++c) {
        const auto [first, last] = m.column_range(c, g);
        CHECK(first == expect);
        CHECK(last - first == g.M);
        expect = last;
    }
    CHECK(expect == g.frame_len());
}
