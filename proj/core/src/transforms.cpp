#include "hf/transforms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, non-unitary (no scaling), sign = -1 forward.
void fft_pow2(cplx* x, std::size_t n, int sign) {
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const cplx wlen{std::cos(ang), std::sin(ang)};
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = x[i + k];
                cplx v = x[i + k + len / 2] * w;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein's chirp-z algorithm for arbitrary n, non-unitary, sign = -1 forward.
void fft_bluestein(cplx* x, std::size_t n, int sign) {
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;

    // chirp[k] = exp(sign * i * pi * k^2 / n)
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small for large k.
        const double q = static_cast<double>((static_cast<unsigned long long>(k) * k) % (2 * n));
        const double ang = sign * std::numbers::pi * q / static_cast<double>(n);
        chirp[k] = cplx{std::cos(ang), std::sin(ang)};
    }

    std::vector<cplx> a(m, cplx{0.0, 0.0});
    std::vector<cplx> b(m, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);

    fft_pow2(a.data(), m, -1);
    fft_pow2(b.data(), m, -1);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a.data(), m, +1);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * inv_m * chirp[k];
}

void dft_raw(cplx* x, std::size_t n, int sign) {
    if (n == 1) return;
    if (is_pow2(n)) {
        fft_pow2(x, n, sign);
    } else {
        fft_bluestein(x, n, sign);
    }
}

}  // namespace

void unitary_dft_inplace(cplx* data, std::size_t len, DftDirection dir) {
    if (len == 0) throw std::invalid_argument("unitary_dft: length must be >= 1");
    dft_raw(data, len, dir == DftDirection::forward ? -1 : +1);
    const double s = 1.0 / std::sqrt(static_cast<double>(len));
    for (std::size_t i = 0; i < len; ++i) data[i] *= s;
}

CplxVec unitary_dft(const CplxVec& x, DftDirection dir) {
    CplxVec out = x;
    unitary_dft_inplace(out.data(), out.size(), dir);
    return out;
}

CMat replicate_doppler(const CMat& s_dd, std::size_t r) {
    if (r == 0) throw std::invalid_argument("replicate_doppler: r must be >= 1");
    const std::size_t M = s_dd.rows();
    const std::size_t n_dd = s_dd.cols();
    CMat out(M, n_dd * r);
    const double scale = 1.0 / std::sqrt(static_cast<double>(r));
    for (std::size_t j = 0; j < out.cols(); ++j) {
        const cplx* src = s_dd.col(j % n_dd);
        cplx* dst = out.col(j);
        for (std::size_t i = 0; i < M; ++i) dst[i] = scale * src[i];
    }
    return out;
}

CMat replicate_doppler(const CMat& s_dd, const FrameGeometry& g) {
    if (s_dd.rows() != g.M || s_dd.cols() != g.N_dd)
        throw std::invalid_argument("replicate_doppler: grid is not M x N_dd");
    return replicate_doppler(s_dd, g.r);
}

namespace {

// Row-wise DFT of an M x N matrix (each row transformed along the column axis).
void dft_rows_inplace(CMat& m, DftDirection dir) {
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    CplxVec row(cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) row[j] = m(i, j);
        unitary_dft_inplace(row.data(), cols, dir);
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = row[j];
    }
}

void dft_cols_inplace(CMat& m, DftDirection dir) {
    for (std::size_t j = 0; j < m.cols(); ++j) unitary_dft_inplace(m.col(j), m.rows(), dir);
}

}  // namespace

CMat isfft(const CMat& grid_in, IsfftDirection dir) {
    if (grid_in.rows() == 0 || grid_in.cols() == 0)
        throw std::invalid_argument("isfft: empty grid");
    CMat out = grid_in;
    if (dir == IsfftDirection::dd_to_tf) {
        // F_M * X * F_N^H: forward DFT down columns, inverse DFT along rows.
        dft_cols_inplace(out, DftDirection::forward);
        dft_rows_inplace(out, DftDirection::inverse);
    } else {
        dft_cols_inplace(out, DftDirection::inverse);
        dft_rows_inplace(out, DftDirection::forward);
    }
    return out;
}

CplxVec heisenberg_tf_to_time(const CMat& x_tf) {
    CMat t = x_tf;
    dft_cols_inplace(t, DftDirection::inverse);
    return t.data();  // column-major concatenation
}

CMat heisenberg_time_to_tf(const CplxVec& samples, const FrameGeometry& g) {
    if (samples.size() != g.frame_len())
        throw std::invalid_argument("heisenberg: sample count != M*N");
    CMat out(g.M, g.N);
    out.data() = samples;
    dft_cols_inplace(out, DftDirection::forward);
    return out;
}

CMat interpolate_time_zeros(const CMat& s_tf, const FrameGeometry& g, const OccupancyMask& mask) {
    if (s_tf.rows() != g.M || s_tf.cols() != mask.ofdm_columns.size())
        throw std::invalid_argument("interpolate_time_zeros: grid is not M x N_tf");
    CMat out(g.M, g.N);
    for (std::size_t j = 0; j < mask.ofdm_columns.size(); ++j) {
        const cplx* src = s_tf.col(j);
        cplx* dst = out.col(mask.ofdm_columns[j]);
        std::copy(src, src + g.M, dst);
    }
    return out;
}

CpPrecoder make_cp_precoder(const FrameGeometry& g) {
    return CpPrecoder{g.M, g.L_cp};
}

CplxVec cp_precode(const CplxVec& s_bar, const CpPrecoder& p) {
    const std::size_t P = p.payload_len();
    if (s_bar.size() != P) throw std::invalid_argument("cp_precode: input length != M - L_cp");
    CplxVec t = unitary_dft(s_bar, DftDirection::inverse);  // F_{M-L_cp}^H
    CplxVec with_cp(p.M);
    std::copy(t.end() - static_cast<std::ptrdiff_t>(p.L_cp), t.end(), with_cp.begin());  // B_cp
    std::copy(t.begin(), t.end(), with_cp.begin() + static_cast<std::ptrdiff_t>(p.L_cp));
    unitary_dft_inplace(with_cp.data(), p.M, DftDirection::forward);  // F_M
    return with_cp;
}

CplxVec cp_remove(const CplxVec& r_n, const CpPrecoder& p) {
    if (r_n.size() != p.M) throw std::invalid_argument("cp_remove: input length != M");
    return CplxVec(r_n.begin() + static_cast<std::ptrdiff_t>(p.L_cp), r_n.end());
}

}  // namespace hf
