#include "hf/rx_ofdm.hpp"

#include "hf/transforms.hpp"

#include <stdexcept>
#include <string>

namespace hf {

OfdmSymbolEstimate detect_ofdm_symbol(const CplxVec& r_n, const CplxVec& h_n,
                                      const NoiseModel& noise, std::size_t symbol_index) {
    const std::size_t M = r_n.size();
    const std::size_t P = h_n.size();
    if (P == 0 || P >= M) throw std::invalid_argument("detect_ofdm_symbol: length mismatch");
    if (noise.sigma2 <= 0.0) throw std::invalid_argument("detect_ofdm_symbol: sigma2 must be positive");

    const CpPrecoder pre{M, M - P};
    CplxVec z = cp_remove(r_n, pre);
    unitary_dft_inplace(z.data(), P, DftDirection::forward);

    OfdmSymbolEstimate est;
    est.symbol_index = symbol_index;
    est.soft_symbols.resize(P);
    est.post_eq_noise_var.resize(P);
    est.mmse_bias.resize(P);
    for (std::size_t k = 0; k < P; ++k) {
        const double h2 = std::norm(h_n[k]);
        const double den = h2 + noise.sigma2;
        est.soft_symbols[k] = std::conj(h_n[k]) * z[k] / den;
        est.mmse_bias[k] = h2 / den;
        double v = noise.sigma2 * h2 / (den * den);
        if (v < 1e-300) v = 1e-300;  // keep the "variances > 0" contract at h = 0
        est.post_eq_noise_var[k] = v;
    }
    return est;
}

CplxVec ofdm_freq_response_ref(const ChannelRealization& ch, std::size_t symbol_index,
                               const FrameGeometry& g, OfdmDopplerRef ref) {
    const double extra = ref == OfdmDopplerRef::mid_symbol
                             ? 0.5 * static_cast<double>(g.ofdm_symbol_len())
                             : 0.0;
    return ofdm_freq_response(ch, symbol_index, g, extra);
}

std::vector<OfdmSymbolEstimate> detect_ofdm_frame(const CplxVec& r, const ChannelRealization& ch,
                                                  const FrameGeometry& g, const OccupancyMask& mask,
                                                  const NoiseModel& noise, OfdmDopplerRef ref) {
    if (r.size() != g.frame_len()) throw std::invalid_argument("detect_ofdm_frame: frame length != M*N");
    if (!mask.ofdm_columns.empty() && ch.max_delay_samples() >= g.L_cp)
        throw std::runtime_error("detect_ofdm_frame: CP shorter than delay spread (max " +
                                 std::to_string(ch.max_delay_samples()) + " samples, L_cp " +
                                 std::to_string(g.L_cp) + ")");

    std::vector<OfdmSymbolEstimate> out;
    out.reserve(mask.ofdm_columns.size());
    CplxVec block(g.M);
    for (std::size_t col : mask.ofdm_columns) {
        const auto [first, last] = mask.column_range(col, g);
        std::copy(r.begin() + static_cast<std::ptrdiff_t>(first),
                  r.begin() + static_cast<std::ptrdiff_t>(last), block.begin());
        CplxVec h_n = ofdm_freq_response_ref(ch, col, g, ref);
        out.push_back(detect_ofdm_symbol(block, h_n, noise, col));
    }
    return out;
}

}  // namespace hf
