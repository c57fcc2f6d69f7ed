#include "hf/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hf {

bool OccupancyMask::is_otfs_column(std::size_t col) const {
    return std::binary_search(otfs_columns.begin(), otfs_columns.end(), col);
}

FrameGeometry validate_geometry(std::size_t M, std::size_t N, std::size_t N_dd,
                                std::size_t N_tf, std::size_t L_cp,
                                double delta_f, double f_c) {
    if (M == 0 || N == 0) throw std::invalid_argument("geometry: M and N must be positive");
    if (N_dd == 0) throw std::invalid_argument("geometry: N_dd must be positive");
    if (N_dd + N_tf != N)
        throw std::invalid_argument("geometry: N_dd + N_tf != N (" + std::to_string(N_dd) + "+" +
                                    std::to_string(N_tf) + " != " + std::to_string(N) + ")");
    if (N % N_dd != 0)
        throw std::invalid_argument("geometry: replication factor not integer (N/N_dd = " +
                                    std::to_string(N) + "/" + std::to_string(N_dd) + ")");
    if (N_tf % N_dd != 0)
        throw std::invalid_argument("geometry: N_dd * N_s != N_tf (N_tf not divisible by N_dd)");
    if (L_cp == 0) throw std::invalid_argument("geometry: L_cp must be positive");
    if (L_cp >= M)
        throw std::invalid_argument("geometry: L_cp >= M (" + std::to_string(L_cp) +
                                    " >= " + std::to_string(M) + ")");
    if (delta_f <= 0.0) throw std::invalid_argument("geometry: delta_f must be positive");
    if (f_c <= 0.0) throw std::invalid_argument("geometry: f_c must be positive");

    FrameGeometry g;
    g.M = M;
    g.N = N;
    g.N_dd = N_dd;
    g.N_tf = N_tf;
    g.N_s = N_tf / N_dd;
    g.L_cp = L_cp;
    g.delta_f = delta_f;
    g.f_c = f_c;
    g.r = N / N_dd;
    g.f_s = static_cast<double>(M) * delta_f;
    g.T_s = 1.0 / g.f_s;
    // N = N_dd + N_tf and r = N/N_dd imply N_s = r - 1; keep the cross-check anyway.
    if (g.N_dd * g.N_s != g.N_tf)
        throw std::invalid_argument("geometry: N_dd * N_s != N_tf");
    return g;
}

FrameGeometry validate_geometry(const FrameGeometry& g) {
    return validate_geometry(g.M, g.N, g.N_dd, g.N_tf, g.L_cp, g.delta_f, g.f_c);
}

OccupancyMask hybrid_mask(const FrameGeometry& g) {
    OccupancyMask m;
    m.kind = FrameKind::hybrid;
    for (std::size_t k = 0; k < g.N_dd; ++k) m.otfs_columns.push_back(k * g.r);
    for (std::size_t c = 0; c < g.N; ++c)
        if (c % g.r != 0) m.ofdm_columns.push_back(c);
    m.n_dd_eff = g.N_dd;
    m.r_eff = g.r;
    return m;
}

OccupancyMask standalone_otfs_mask(const FrameGeometry& g) {
    OccupancyMask m;
    m.kind = FrameKind::otfs_only;
    for (std::size_t c = 0; c < g.N; ++c) m.otfs_columns.push_back(c);
    m.n_dd_eff = g.N;
    m.r_eff = 1;
    return m;
}

OccupancyMask standalone_ofdm_mask(const FrameGeometry& g) {
    OccupancyMask m;
    m.kind = FrameKind::ofdm_only;
    for (std::size_t c = 0; c < g.N; ++c) m.ofdm_columns.push_back(c);
    m.n_dd_eff = 0;
    m.r_eff = 0;
    return m;
}

OccupancyMask mask_for(const FrameGeometry& g, FrameKind kind) {
    switch (kind) {
        case FrameKind::hybrid: return hybrid_mask(g);
        case FrameKind::otfs_only: return standalone_otfs_mask(g);
        case FrameKind::ofdm_only: return standalone_ofdm_mask(g);
    }
    throw std::invalid_argument("mask_for: unknown frame kind");
}

}  // namespace hf
