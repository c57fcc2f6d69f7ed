#include "hf/qam.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hf {

namespace {

struct Axis {
    std::size_t bits;       // bits per axis
    std::size_t levels;     // 2^bits
    double scale;           // level spacing normalizer: E|s|^2 = 1
};

Axis axis_for(unsigned order) {
    switch (order) {
        case 4:  return {1, 2, 1.0 / std::sqrt(2.0)};
        case 16: return {2, 4, 1.0 / std::sqrt(10.0)};
        case 64: return {3, 8, 1.0 / std::sqrt(42.0)};
        default: throw std::invalid_argument("qam: unsupported modulation order");
    }
}

unsigned gray_encode(unsigned v) { return v ^ (v >> 1); }

// Amplitude level for Gray-coded axis bits: Gray index g -> 2g - (L-1).
double level_for_bits(const Axis& ax, unsigned bits_val) {
    unsigned g = 0;
    // invert gray_encode
    for (unsigned v = 0; v < ax.levels; ++v) {
        if (gray_encode(v) == bits_val) { g = v; break; }
    }
    return (2.0 * g - (static_cast<double>(ax.levels) - 1.0)) * ax.scale;
}

}  // namespace

std::size_t qam_bits_per_symbol(unsigned order) { return 2 * axis_for(order).bits; }

CplxVec qam_map(const BitVec& bits, unsigned order) {
    const Axis ax = axis_for(order);
    const std::size_t bps = 2 * ax.bits;
    if (bits.size() % bps != 0)
        throw std::invalid_argument("qam_map: bit count not divisible by bits-per-symbol");

    // Precompute level table indexed by raw axis bits.
    std::vector<double> table(ax.levels);
    for (unsigned b = 0; b < ax.levels; ++b) table[b] = level_for_bits(ax, b);

    CplxVec out(bits.size() / bps);
    for (std::size_t s = 0; s < out.size(); ++s) {
        unsigned bi = 0, bq = 0;
        for (std::size_t k = 0; k < ax.bits; ++k) bi = (bi << 1) | bits[s * bps + k];
        for (std::size_t k = 0; k < ax.bits; ++k) bq = (bq << 1) | bits[s * bps + ax.bits + k];
        out[s] = cplx{table[bi], table[bq]};
    }
    return out;
}

namespace {

// Axis hard decision: nearest level index (non-Gray index g), returns Gray bits.
unsigned axis_demap(const Axis& ax, double v) {
    const double u = v / ax.scale;  // levels at 2g - (L-1)
    long g = std::lround((u + (static_cast<double>(ax.levels) - 1.0)) / 2.0);
    g = std::max<long>(0, std::min<long>(static_cast<long>(ax.levels) - 1, g));
    return gray_encode(static_cast<unsigned>(g));
}

}  // namespace

BitVec qam_hard_demap(const CplxVec& symbols, unsigned order) {
    const Axis ax = axis_for(order);
    BitVec bits(symbols.size() * 2 * ax.bits);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const unsigned bi = axis_demap(ax, symbols[s].real());
        const unsigned bq = axis_demap(ax, symbols[s].imag());
        for (std::size_t k = 0; k < ax.bits; ++k)
            bits[s * 2 * ax.bits + k] = (bi >> (ax.bits - 1 - k)) & 1u;
        for (std::size_t k = 0; k < ax.bits; ++k)
            bits[s * 2 * ax.bits + ax.bits + k] = (bq >> (ax.bits - 1 - k)) & 1u;
    }
    return bits;
}

cplx qam_slice(cplx symbol, unsigned order) {
    const Axis ax = axis_for(order);
    auto snap = [&](double v) {
        const double u = v / ax.scale;
        long g = std::lround((u + (static_cast<double>(ax.levels) - 1.0)) / 2.0);
        g = std::max<long>(0, std::min<long>(static_cast<long>(ax.levels) - 1, g));
        return (2.0 * g - (static_cast<double>(ax.levels) - 1.0)) * ax.scale;
    };
    return {snap(symbol.real()), snap(symbol.imag())};
}

std::vector<double> qam_llr_scaled(const CplxVec& symbols, const std::vector<double>& noise_var,
                                   const std::vector<double>& amp_scale, unsigned order) {
    const Axis ax = axis_for(order);
    if (noise_var.size() != symbols.size() || amp_scale.size() != symbols.size())
        throw std::invalid_argument("qam_llr: size mismatch");

    // Per-axis max-log: for each axis bit position, min squared distance over
    // levels whose Gray bit is 0 / 1.
    std::vector<double> levels(ax.levels);
    std::vector<unsigned> graybits(ax.levels);
    for (unsigned g = 0; g < ax.levels; ++g) {
        levels[g] = 2.0 * g - (static_cast<double>(ax.levels) - 1.0);
        graybits[g] = gray_encode(g);
    }

    const std::size_t bps = 2 * ax.bits;
    std::vector<double> llr(symbols.size() * bps);
    for (std::size_t s = 0; s < symbols.size(); ++s) {
        const double sigma2 = noise_var[s];
        if (sigma2 <= 0.0) throw std::invalid_argument("qam_llr: noise variance must be positive");
        const double a = amp_scale[s] * ax.scale;
        for (int axis = 0; axis < 2; ++axis) {
            const double y = axis == 0 ? symbols[s].real() : symbols[s].imag();
            for (std::size_t k = 0; k < ax.bits; ++k) {
                double d0 = std::numeric_limits<double>::infinity();
                double d1 = std::numeric_limits<double>::infinity();
                for (unsigned g = 0; g < ax.levels; ++g) {
                    const double d = (y - a * levels[g]) * (y - a * levels[g]);
                    const bool bit = (graybits[g] >> (ax.bits - 1 - k)) & 1u;
                    if (bit) d1 = std::min(d1, d); else d0 = std::min(d0, d);
                }
                llr[s * bps + static_cast<std::size_t>(axis) * ax.bits + k] = (d1 - d0) / sigma2;
            }
        }
    }
    return llr;
}

std::vector<double> qam_llr(const CplxVec& symbols, const std::vector<double>& noise_var,
                            unsigned order) {
    return qam_llr_scaled(symbols, noise_var, std::vector<double>(symbols.size(), 1.0), order);
}

}  // namespace hf
