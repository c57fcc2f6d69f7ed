#include "hf/blind_ic.hpp"

#include "hf/qam.hpp"
#include "hf/rx_otfs.hpp"
#include "hf/tx_builder.hpp"

#include <algorithm>
#include <stdexcept>

namespace hf {

CMat rebuild_ofdm_interference(const std::vector<OfdmSymbolEstimate>& estimates, unsigned order,
                               const FrameGeometry& g, const OccupancyMask& mask,
                               const std::vector<std::size_t>& occupancy) {
    const std::size_t P = g.ofdm_symbol_len();
    CMat s_bar(P, mask.ofdm_columns.size());

    auto occupied = [&](std::size_t col) {
        return occupancy.empty() ||
               std::find(occupancy.begin(), occupancy.end(), col) != occupancy.end();
    };

    for (const auto& est : estimates) {
        auto it = std::find(mask.ofdm_columns.begin(), mask.ofdm_columns.end(), est.symbol_index);
        if (it == mask.ofdm_columns.end())
            throw std::invalid_argument("rebuild_ofdm_interference: estimate for a non-OFDM column");
        if (!occupied(est.symbol_index)) continue;
        const std::size_t j = static_cast<std::size_t>(it - mask.ofdm_columns.begin());
        for (std::size_t k = 0; k < P; ++k)
            s_bar(k, j) = qam_slice(est.soft_symbols[k], order);
    }
    // Same chain as the transmitter: precode + interpolate + per-column scale.
    return ofdm_component_tf(s_bar, g, mask);
}

BlindResult blind_cancel(const CplxVec& r, const ChannelRealization& ch, const FrameGeometry& g,
                         const OccupancyMask& mask, const NoiseModel& noise,
                         const std::vector<Hypothesis>& pool, OfdmDopplerRef ref) {
    if (pool.empty()) throw std::invalid_argument("blind_cancel: empty hypothesis pool");
    for (const auto& h : pool)
        for (std::size_t c : h.occupancy)
            if (!std::binary_search(mask.ofdm_columns.begin(), mask.ofdm_columns.end(), c))
                throw std::invalid_argument("blind_cancel: hypothesis occupies a non-OFDM column");

    const SparseHt H_t = build_Ht(ch, g);
    const auto estimates = detect_ofdm_frame(r, ch, g, mask, noise, ref);

    BlindResult result;
    result.scores.reserve(pool.size());
    double best_score = 0.0;
    unsigned best_order = 0;
    bool have_best = false;

    for (std::size_t idx = 0; idx < pool.size(); ++idx) {
        const Hypothesis& hyp = pool[idx];
        CMat x_tf_hat = rebuild_ofdm_interference(estimates, hyp.order, g, mask, hyp.occupancy);
        CplxVec cleaned = tdic_cancel(r, H_t, x_tf_hat, g, mask);

        double score = 0.0;
        for (std::size_t col : mask.ofdm_columns) {
            const auto [first, last] = mask.column_range(col, g);
            for (std::size_t q = first; q < last; ++q) score += std::norm(cleaned[q]);
        }
        result.scores.push_back({hyp.id, hyp.order, score});

        const bool better =
            !have_best || score < best_score || (score == best_score && hyp.order < best_order);
        if (better) {
            have_best = true;
            best_score = score;
            best_order = hyp.order;
            result.chosen_index = idx;
            result.chosen = hyp;
            result.cleaned = std::move(cleaned);
        }
    }
    return result;
}

}  // namespace hf
