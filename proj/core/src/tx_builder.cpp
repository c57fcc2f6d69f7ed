#include "hf/tx_builder.hpp"

#include "hf/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace hf {

std::size_t otfs_payload_bits(const FrameGeometry& g, const OccupancyMask& mask, unsigned order) {
    return g.M * mask.n_dd_eff * qam_bits_per_symbol(order);
}

std::size_t ofdm_payload_bits(const FrameGeometry& g, const OccupancyMask& mask, unsigned order) {
    return g.ofdm_symbol_len() * mask.ofdm_columns.size() * qam_bits_per_symbol(order);
}

namespace {

CMat map_to_grid(const BitVec& bits, unsigned order, std::size_t rows, std::size_t cols,
                 const char* what) {
    if (bits.size() != rows * cols * qam_bits_per_symbol(order))
        throw std::invalid_argument(std::string(what) + ": bit-count mismatch (need " +
                                    std::to_string(rows * cols * qam_bits_per_symbol(order)) +
                                    ", got " + std::to_string(bits.size()) + ")");
    CplxVec syms = qam_map(bits, order);
    CMat grid(rows, cols);
    grid.data() = std::move(syms);  // column-major fill, delay axis first
    return grid;
}

}  // namespace

CMat otfs_component_tf(const CMat& s_dd, const FrameGeometry& g, const OccupancyMask& mask) {
    if (mask.n_dd_eff == 0) throw std::invalid_argument("otfs_component_tf: mask has no DD columns");
    if (s_dd.rows() != g.M || s_dd.cols() != mask.n_dd_eff)
        throw std::invalid_argument("otfs_component_tf: grid is not M x n_dd");
    CMat rep = replicate_doppler(s_dd, mask.r_eff);
    CMat tf = isfft(rep, IsfftDirection::dd_to_tf);
    // The replication confines the support to the DD columns; force the
    // mathematically-zero columns to exact zeros.
    for (std::size_t c = 0; c < g.N; ++c) {
        if (!mask.is_otfs_column(c)) {
            cplx* col = tf.col(c);
            std::fill(col, col + g.M, cplx{0.0, 0.0});
        }
    }
    return tf;
}

CMat ofdm_component_tf(const CMat& s_bar, const FrameGeometry& g, const OccupancyMask& mask) {
    const std::size_t P = g.ofdm_symbol_len();
    if (s_bar.rows() != P || s_bar.cols() != mask.ofdm_columns.size())
        throw std::invalid_argument("ofdm_component_tf: grid is not (M-L_cp) x N_tf");
    const CpPrecoder pre = make_cp_precoder(g);
    CMat precoded(g.M, s_bar.cols());
    CplxVec col(P);
    for (std::size_t j = 0; j < s_bar.cols(); ++j) {
        std::copy(s_bar.col(j), s_bar.col(j) + P, col.begin());
        CplxVec out = cp_precode(col, pre);
        std::copy(out.begin(), out.end(), precoded.col(j));
    }
    return interpolate_time_zeros(precoded, g, mask);
}

namespace {

HybridFrame assemble(const FrameGeometry& g, OccupancyMask mask, const ModulationOrders& orders,
                     CMat s_dd, CMat s_tf_raw, BitVec otfs_bits, BitVec ofdm_bits) {
    HybridFrame f;
    f.geometry = g;
    f.mask = std::move(mask);
    f.orders = orders;
    f.s_dd = std::move(s_dd);
    f.s_tf_raw = std::move(s_tf_raw);
    f.otfs_bits = std::move(otfs_bits);
    f.ofdm_bits = std::move(ofdm_bits);

    CMat x(g.M, g.N);
    if (f.mask.n_dd_eff > 0) {
        CMat tf_dd = otfs_component_tf(f.s_dd, g, f.mask);
        f.otfs_samples = heisenberg_tf_to_time(tf_dd);
        for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += tf_dd.data()[i];
    } else {
        f.otfs_samples.assign(g.frame_len(), cplx{0.0, 0.0});
    }
    if (!f.mask.ofdm_columns.empty()) {
        CMat tf_tf = ofdm_component_tf(f.s_tf_raw, g, f.mask);
        f.ofdm_samples = heisenberg_tf_to_time(tf_tf);
        for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += tf_tf.data()[i];
    } else {
        f.ofdm_samples.assign(g.frame_len(), cplx{0.0, 0.0});
    }
    f.x = std::move(x);
    f.samples = heisenberg_tf_to_time(f.x);
    return f;
}

}  // namespace

HybridFrame build_hybrid_frame(const BitVec& otfs_bits, const BitVec& ofdm_bits,
                               const FrameGeometry& g, const ModulationOrders& orders) {
    OccupancyMask mask = hybrid_mask(g);
    CMat s_dd = map_to_grid(otfs_bits, orders.otfs, g.M, mask.n_dd_eff, "build_hybrid_frame (otfs)");
    CMat s_bar = map_to_grid(ofdm_bits, orders.ofdm, g.ofdm_symbol_len(), mask.ofdm_columns.size(),
                             "build_hybrid_frame (ofdm)");
    return assemble(g, std::move(mask), orders, std::move(s_dd), std::move(s_bar), otfs_bits,
                    ofdm_bits);
}

HybridFrame build_standalone(FrameKind kind, const BitVec& bits, const FrameGeometry& g,
                             unsigned order) {
    if (kind == FrameKind::otfs_only) {
        OccupancyMask mask = standalone_otfs_mask(g);
        CMat s_dd = map_to_grid(bits, order, g.M, g.N, "build_standalone (otfs)");
        return assemble(g, std::move(mask), ModulationOrders{order, order}, std::move(s_dd),
                        CMat(g.ofdm_symbol_len(), 0), bits, {});
    }
    if (kind == FrameKind::ofdm_only) {
        OccupancyMask mask = standalone_ofdm_mask(g);
        CMat s_bar = map_to_grid(bits, order, g.ofdm_symbol_len(), g.N, "build_standalone (ofdm)");
        return assemble(g, std::move(mask), ModulationOrders{order, order}, CMat(g.M, 0),
                        std::move(s_bar), {}, bits);
    }
    throw std::invalid_argument("build_standalone: kind must be otfs_only or ofdm_only");
}

}  // namespace hf
