#include "hf/rx_otfs.hpp"

#include "hf/qam.hpp"
#include "hf/transforms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

CMat tfds_equalize(const CplxVec& r, const CMat& h_tf, const NoiseModel& noise) {
    if (noise.sigma2 <= 0.0) throw std::invalid_argument("tfds_equalize: sigma2 must be positive");
    if (h_tf.rows() == 0 || r.size() != h_tf.rows() * h_tf.cols())
        throw std::invalid_argument("tfds_equalize: size mismatch");

    CMat R(h_tf.rows(), h_tf.cols());
    R.data() = r;
    for (std::size_t c = 0; c < R.cols(); ++c)
        unitary_dft_inplace(R.col(c), R.rows(), DftDirection::forward);  // F_M R

    CMat out(h_tf.rows(), h_tf.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const cplx h = h_tf.data()[i];
        out.data()[i] = std::conj(h) * R.data()[i] / (std::norm(h) + noise.sigma2);
    }
    return out;
}

namespace {

// Mask out the OFDM columns, transform to the DD domain and collapse the
// Doppler periodicity (bins [0, n_dd), rescaled by sqrt(r)). Returns the
// energy that was discarded with the OFDM columns.
CMat masked_dd_collapse(const CMat& tf_grid, const FrameGeometry& g, const OccupancyMask& mask,
                        double* discarded_energy) {
    if (tf_grid.rows() != g.M || tf_grid.cols() != g.N)
        throw std::invalid_argument("dd extraction: grid is not M x N");
    if (mask.n_dd_eff == 0) throw std::invalid_argument("dd extraction: mask has no DD columns");

    CMat masked = tf_grid;
    double discarded = 0.0;
    for (std::size_t c = 0; c < g.N; ++c) {
        if (!mask.is_otfs_column(c)) {
            cplx* col = masked.col(c);
            for (std::size_t i = 0; i < g.M; ++i) {
                discarded += std::norm(col[i]);
                col[i] = cplx{0.0, 0.0};
            }
        }
    }
    CMat dd = isfft(masked, IsfftDirection::tf_to_dd);

    CMat out(g.M, mask.n_dd_eff);
    const double scale = std::sqrt(static_cast<double>(mask.r_eff));
    for (std::size_t t = 0; t < mask.n_dd_eff; ++t)
        for (std::size_t m = 0; m < g.M; ++m) out(m, t) = scale * dd(m, t);
    if (discarded_energy) *discarded_energy = discarded;
    return out;
}

}  // namespace

DdEstimate tfds_extract_dd(const CMat& y_hat, const FrameGeometry& g, const OccupancyMask& mask,
                           const NoiseModel& noise) {
    DdEstimate est;
    est.method = OtfsMethod::tfds;
    est.y_dd = masked_dd_collapse(y_hat, g, mask, &est.diag.residual_interference_energy);
    est.noise_var_rows.assign(g.M, noise.sigma2);
    return est;
}

CplxVec tdic_cancel(const CplxVec& r, const SparseHt& H_t, const CMat& x_tf_hat,
                    const FrameGeometry& g, const OccupancyMask& mask) {
    if (r.size() != g.frame_len()) throw std::invalid_argument("tdic_cancel: frame length != M*N");
    if (x_tf_hat.rows() != g.M || x_tf_hat.cols() != g.N)
        throw std::invalid_argument("tdic_cancel: x_tf_hat is not M x N");
    CplxVec rebuilt = heisenberg_tf_to_time(x_tf_hat);
    CplxVec delta = H_t.multiply(rebuilt);
    CplxVec out(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i] - delta[i];
    return out;
}

CMat dd_transform(const CplxVec& frame, const FrameGeometry& g, const OccupancyMask& mask) {
    CMat tf = heisenberg_time_to_tf(frame, g);
    return masked_dd_collapse(tf, g, mask, nullptr);
}

CMat extract_otfs_columns(const CplxVec& frame, const FrameGeometry& g, const OccupancyMask& mask) {
    if (frame.size() != g.frame_len())
        throw std::invalid_argument("extract_otfs_columns: frame length != M*N");
    CMat out(g.M, mask.n_dd_eff);
    for (std::size_t t = 0; t < mask.otfs_columns.size(); ++t) {
        const auto [first, last] = mask.column_range(mask.otfs_columns[t], g);
        std::copy(frame.begin() + static_cast<std::ptrdiff_t>(first),
                  frame.begin() + static_cast<std::ptrdiff_t>(last), out.col(t));
    }
    return out;
}

// ---------------------------------------------------------------------------
// EffectiveChannel
// ---------------------------------------------------------------------------

EffectiveChannel::EffectiveChannel(const ChannelRealization& ch, const FrameGeometry& g,
                                   const OccupancyMask& mask)
    : geom_(g), mask_(mask), n_dd_(mask.n_dd_eff) {
    if (n_dd_ == 0) throw std::invalid_argument("EffectiveChannel: mask has no DD columns");
    cross_column_ = mask.r_eff == 1;
    cyclic_wrap_ = cross_column_ && ch.mode == EdgeMode::cyclic;

    for (const auto& t : ch.taps) {
        if (t.delay_samples >= g.M)
            throw std::invalid_argument("EffectiveChannel: tap delay >= M not supported");
        Tap tap;
        tap.gain = t.gain;
        tap.delay = t.delay_samples;
        tap.doppler_hz = t.doppler_hz;
        if (ch.phase_ref == PhaseRef::absolute) {
            // Fold the constant phase offset between receive-instant and
            // delayed referencing into the gain.
            const double a = kTwoPi * t.doppler_hz * static_cast<double>(t.delay_samples) * g.T_s;
            tap.gain *= cplx{std::cos(a), std::sin(a)};
        }
        tap.col_phase.resize(n_dd_);
        for (std::size_t tt = 0; tt < n_dd_; ++tt) {
            const double a = kTwoPi * t.doppler_hz *
                             static_cast<double>(mask.otfs_columns[tt] * g.M) * g.T_s;
            tap.col_phase[tt] = cplx{std::cos(a), std::sin(a)};
        }
        tap.row_phase.resize(g.M);
        for (std::size_t m = 0; m < g.M; ++m) {
            const double a = kTwoPi * t.doppler_hz * static_cast<double>(m) * g.T_s;
            tap.row_phase[m] = cplx{std::cos(a), std::sin(a)};
        }
        taps_.push_back(std::move(tap));
    }

    row_energy_.assign(g.M, 0.0);
    for (const auto& tap : taps_) {
        const double g2 = std::norm(tap.gain);
        for (std::size_t m = 0; m < g.M; ++m) {
            if (m + tap.delay < g.M || cross_column_) row_energy_[m] += g2;
        }
    }
}

CMat EffectiveChannel::dd_to_delay_time(const CMat& x_dd) const {
    CMat z(geom_.M, n_dd_);
    CplxVec row(n_dd_);
    for (std::size_t m = 0; m < geom_.M; ++m) {
        for (std::size_t t = 0; t < n_dd_; ++t) row[t] = x_dd(m, t);
        unitary_dft_inplace(row.data(), n_dd_, DftDirection::inverse);
        for (std::size_t t = 0; t < n_dd_; ++t) z(m, t) = row[t];
    }
    return z;
}

CMat EffectiveChannel::delay_time_to_dd(const CMat& z) const {
    CMat x(geom_.M, n_dd_);
    CplxVec row(n_dd_);
    for (std::size_t m = 0; m < geom_.M; ++m) {
        for (std::size_t t = 0; t < n_dd_; ++t) row[t] = z(m, t);
        unitary_dft_inplace(row.data(), n_dd_, DftDirection::forward);
        for (std::size_t t = 0; t < n_dd_; ++t) x(m, t) = row[t];
    }
    return x;
}

CMat EffectiveChannel::apply(const CMat& x_dd) const {
    if (x_dd.rows() != geom_.M || x_dd.cols() != n_dd_)
        throw std::invalid_argument("EffectiveChannel::apply: grid is not M x n_dd");
    const CMat z = dd_to_delay_time(x_dd);
    const std::size_t M = geom_.M;

    CMat y(M, n_dd_);
    for (const auto& tap : taps_) {
        const std::size_t l = tap.delay;
        // Phase correction when the spill of the last DD column wraps to the
        // first one (cyclic frame edge): the source position used by the
        // delayed reference stays unwrapped, so no correction is needed there.
        for (std::size_t t = 0; t < n_dd_; ++t) {
            const cplx gc = tap.gain * tap.col_phase[t];
            for (std::size_t m = 0; m < M; ++m) {
                const cplx v = gc * tap.row_phase[m] * z(m, t);
                const std::size_t obs = m + l;
                if (obs < M) {
                    y(obs, t) += v;
                } else if (cross_column_) {
                    if (t + 1 < n_dd_) {
                        y(obs - M, t + 1) += v;
                    } else if (cyclic_wrap_) {
                        y(obs - M, 0) += v;
                    }
                }
            }
        }
    }
    return y;
}

CMat EffectiveChannel::adjoint(const CMat& y) const {
    if (y.rows() != geom_.M || y.cols() != n_dd_)
        throw std::invalid_argument("EffectiveChannel::adjoint: grid is not M x n_dd");
    const std::size_t M = geom_.M;
    CMat w(M, n_dd_);
    for (const auto& tap : taps_) {
        const std::size_t l = tap.delay;
        for (std::size_t t = 0; t < n_dd_; ++t) {
            const cplx gc = std::conj(tap.gain * tap.col_phase[t]);
            for (std::size_t m = 0; m < M; ++m) {
                const std::size_t obs = m + l;
                cplx acc{0.0, 0.0};
                if (obs < M) {
                    acc = y(obs, t);
                } else if (cross_column_) {
                    if (t + 1 < n_dd_) acc = y(obs - M, t + 1);
                    else if (cyclic_wrap_) acc = y(obs - M, 0);
                }
                w(m, t) += gc * std::conj(tap.row_phase[m]) * acc;
            }
        }
    }
    return delay_time_to_dd(w);
}

// ---------------------------------------------------------------------------
// Detectors
// ---------------------------------------------------------------------------

namespace {

double dot_re(const CMat& a, const CMat& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (std::conj(a.data()[i]) * b.data()[i]).real();
    return s;
}

std::vector<double> rows_noise_var(const EffectiveChannel& eff, double sigma2) {
    std::vector<double> v(eff.geometry().M);
    const auto& e = eff.row_tap_energy();
    for (std::size_t m = 0; m < v.size(); ++m)
        v[m] = sigma2 / std::max(e[m], 1e-12);
    return v;
}

}  // namespace

DdEstimate detect_otfs_lmmse(const CplxVec& r_clean, const EffectiveChannel& eff,
                             const NoiseModel& noise, int max_iters, double tol) {
    if (noise.sigma2 <= 0.0) throw std::invalid_argument("detect_otfs_lmmse: sigma2 must be positive");
    const FrameGeometry& g = eff.geometry();
    const CMat y = extract_otfs_columns(r_clean, g, eff.mask());

    auto normal_op = [&](const CMat& x) {
        CMat out = eff.adjoint(eff.apply(x));
        for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] += noise.sigma2 * x.data()[i];
        return out;
    };

    const CMat b = eff.adjoint(y);
    const double b_norm2 = dot_re(b, b);

    DdEstimate est;
    est.method = OtfsMethod::tdic;
    est.y_dd = CMat(g.M, eff.n_dd());
    est.noise_var_rows = rows_noise_var(eff, noise.sigma2);
    if (b_norm2 == 0.0) return est;

    CMat x(g.M, eff.n_dd());
    CMat res = b;
    CMat p = b;
    double rs = b_norm2;
    int iters = 0;
    bool converged = false;
    for (; iters < max_iters; ++iters) {
        const CMat Ap = normal_op(p);
        const double alpha = rs / dot_re(p, Ap);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x.data()[i] += alpha * p.data()[i];
            res.data()[i] -= alpha * Ap.data()[i];
        }
        const double rs_new = dot_re(res, res);
        if (std::sqrt(rs_new / b_norm2) < tol) {
            converged = true;
            ++iters;
            break;
        }
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < p.size(); ++i)
            p.data()[i] = res.data()[i] + beta * p.data()[i];
    }

    est.y_dd = x;
    est.diag.iterations = iters;
    est.diag.converged = converged;
    CMat fit = eff.apply(x);
    double resid = 0.0;
    for (std::size_t i = 0; i < fit.size(); ++i) resid += std::norm(fit.data()[i] - y.data()[i]);
    est.diag.residual_interference_energy = resid;
    return est;
}

DdEstimate detect_otfs_mrc_dfe(const CplxVec& r_clean, const ChannelRealization& ch,
                               const FrameGeometry& g, const OccupancyMask& mask,
                               const NoiseModel& noise, unsigned order, int max_iters) {
    if (noise.sigma2 <= 0.0) throw std::invalid_argument("detect_otfs_mrc_dfe: sigma2 must be positive");
    const EffectiveChannel eff(ch, g, mask);
    const std::size_t M = g.M;
    const std::size_t n_dd = eff.n_dd();
    const CMat Y = extract_otfs_columns(r_clean, g, mask);

    // Per-row branch validity and MRC denominators.
    const auto& taps = eff.taps();
    std::vector<double> den_within(M, noise.sigma2);  // all branches within column
    std::vector<double> den_cross(M, noise.sigma2);   // cross-column branches allowed
    for (const auto& tap : taps) {
        const double g2 = std::norm(tap.gain);
        for (std::size_t m = 0; m < M; ++m) {
            if (m + tap.delay < M) {
                den_within[m] += g2;
                den_cross[m] += g2;
            } else if (eff.cross_column()) {
                den_cross[m] += g2;
            }
        }
    }

    CMat z(M, n_dd);    // current delay-time iterate (decision-fed)
    CMat pred(M, n_dd); // channel image of z
    CMat soft(M, n_dd); // last pre-decision DD estimate

    auto channel_image = [&](const CMat& zz) {
        // apply() without the leading DD->delay-time transform.
        CMat y(M, n_dd);
        for (const auto& tap : taps) {
            const std::size_t l = tap.delay;
            for (std::size_t t = 0; t < n_dd; ++t) {
                const cplx gc = tap.gain * tap.col_phase[t];
                for (std::size_t m = 0; m < M; ++m) {
                    const cplx v = gc * tap.row_phase[m] * zz(m, t);
                    const std::size_t obs = m + l;
                    if (obs < M) y(obs, t) += v;
                    else if (eff.cross_column()) {
                        if (t + 1 < n_dd) y(obs - M, t + 1) += v;
                        else if (eff.cyclic_wrap()) y(obs - M, 0) += v;
                    }
                }
            }
        }
        return y;
    };

    DdEstimate est;
    est.method = OtfsMethod::tdic;
    est.noise_var_rows = rows_noise_var(eff, noise.sigma2);

    int iters = 0;
    bool converged = false;
    CMat z_prev(M, n_dd);
    for (; iters < max_iters; ++iters) {
        // Gauss-Seidel MRC sweep over delay rows.
        for (std::size_t m = 0; m < M; ++m) {
            for (std::size_t t = 0; t < n_dd; ++t) {
                cplx num{0.0, 0.0};
                bool edge_cross_dropped = false;
                for (const auto& tap : taps) {
                    const cplx coef = tap.gain * tap.col_phase[t] * tap.row_phase[m];
                    const std::size_t obs = m + tap.delay;
                    std::size_t ot = t, orow = obs;
                    if (obs >= M) {
                        if (!eff.cross_column()) continue;
                        orow = obs - M;
                        if (t + 1 < n_dd) ot = t + 1;
                        else if (eff.cyclic_wrap()) ot = 0;
                        else { edge_cross_dropped = true; continue; }
                    }
                    num += std::conj(coef) * (Y(orow, ot) - pred(orow, ot) + coef * z(m, t));
                }
                double den = eff.cross_column() && !edge_cross_dropped ? den_cross[m] : den_within[m];
                const cplx z_new = num / den;
                const cplx delta = z_new - z(m, t);
                if (delta == cplx{0.0, 0.0}) continue;
                for (const auto& tap : taps) {
                    const cplx coef = tap.gain * tap.col_phase[t] * tap.row_phase[m];
                    const std::size_t obs = m + tap.delay;
                    if (obs < M) pred(obs, t) += coef * delta;
                    else if (eff.cross_column()) {
                        if (t + 1 < n_dd) pred(obs - M, t + 1) += coef * delta;
                        else if (eff.cyclic_wrap()) pred(obs - M, 0) += coef * delta;
                    }
                }
                z(m, t) = z_new;
            }
        }

        // Decision feedback: project onto the constellation in the DD domain.
        soft = eff.delay_time_to_dd(z);
        CMat hard = soft;
        for (std::size_t i = 0; i < hard.size(); ++i)
            hard.data()[i] = qam_slice(hard.data()[i], order);
        CMat z_fb = eff.dd_to_delay_time(hard);

        double diff = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < z_fb.size(); ++i) {
            diff += std::norm(z_fb.data()[i] - z_prev.data()[i]);
            norm += std::norm(z_fb.data()[i]);
        }
        z_prev = z_fb;
        z = z_fb;
        pred = channel_image(z);
        if (norm > 0.0 && std::sqrt(diff / norm) < 1e-4) {
            converged = true;
            ++iters;
            break;
        }
    }

    est.y_dd = soft;
    est.diag.iterations = iters;
    est.diag.converged = converged;
    double resid = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) resid += std::norm(pred.data()[i] - Y.data()[i]);
    est.diag.residual_interference_energy = resid;
    return est;
}

}  // namespace hf
