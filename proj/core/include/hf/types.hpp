#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hf {

using cplx = std::complex<double>;
using CplxVec = std::vector<cplx>;

/// Propagation constant used for Doppler arithmetic (km/h -> Hz).
inline constexpr double kSpeedOfLight = 3.0e8;

/**
 * Dense complex matrix, column-major. Small helper used for every 2D grid
 * in the signal chain (delay-Doppler grids, time-frequency grids, channel
 * response tables). Column-major matches the per-OFDM-symbol layout of the
 * time frame: column n holds symbol n.
 */
class CMat {
public:
    CMat() = default;
    CMat(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

    cplx* col(std::size_t c) { return data_.data() + c * rows_; }
    const cplx* col(std::size_t c) const { return data_.data() + c * rows_; }

    CplxVec& data() { return data_; }
    const CplxVec& data() const { return data_; }

    void setZero() { std::fill(data_.begin(), data_.end(), cplx{0.0, 0.0}); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    CplxVec data_;
};

inline double energy(const CplxVec& v) {
    double e = 0.0;
    for (const auto& z : v) e += std::norm(z);
    return e;
}

inline double energy(const CMat& m) { return energy(m.data()); }

inline double max_abs_diff(const CplxVec& a, const CplxVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs_diff(const CMat& a, const CMat& b) {
    return max_abs_diff(a.data(), b.data());
}

}  // namespace hf
