#pragma once

#include "hf/channel.hpp"
#include "hf/grid.hpp"
#include "hf/qam.hpp"
#include "hf/types.hpp"

#include <random>

namespace hft {

using namespace hf;

inline std::mt19937_64 rng(std::uint64_t seed = 42) { return std::mt19937_64(seed); }

inline cplx randn_c(std::mt19937_64& g) {
    std::normal_distribution<double> d(0.0, 1.0);
    return {d(g), d(g)};
}

inline CplxVec random_vec(std::size_t n, std::mt19937_64& g) {
    CplxVec v(n);
    for (auto& x : v) x = randn_c(g);
    return v;
}

inline CMat random_mat(std::size_t r, std::size_t c, std::mt19937_64& g) {
    CMat m(r, c);
    for (auto& x : m.data()) x = randn_c(g);
    return m;
}

inline BitVec random_bits(std::size_t n, std::mt19937_64& g) {
    BitVec b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(g() & 1u);
    return b;
}

inline ChannelRealization identity_channel() {
    ChannelRealization ch;
    ch.taps.push_back(ChannelTap{cplx{1.0, 0.0}, 0.0, 0, 0.0});
    ch.profile = "identity";
    return ch;
}

inline ChannelTap tap(cplx gain, std::size_t delay_samples, double doppler_hz,
                      double f_s = 30.72e6) {
    ChannelTap t;
    t.gain = gain;
    t.delay_samples = delay_samples;
    t.delay_ns = static_cast<double>(delay_samples) / f_s * 1e9;
    t.doppler_hz = doppler_hz;
    return t;
}

/// Small hybrid geometry used across the unit suites (fast, still r = 2).
inline FrameGeometry small_geometry() {
    return validate_geometry(64, 8, 4, 4, 16, 60e3, 28e9);
}

inline std::uint64_t bit_errors(const BitVec& a, const BitVec& b) {
    std::uint64_t e = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) e += a[i] != b[i];
    return e;
}

}  // namespace hft
