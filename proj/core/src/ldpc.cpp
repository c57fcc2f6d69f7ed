#include "hf/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hf {

namespace {

std::vector<long> read_ints(std::istream& in, std::size_t count) {
    std::vector<long> v(count);
    for (auto& x : v) {
        if (!(in >> x)) throw std::runtime_error("alist: truncated file");
    }
    return v;
}

}  // namespace

CodeSpec load_alist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("alist: cannot open " + path);
    std::size_t n = 0, m = 0;
    if (!(in >> n >> m)) throw std::runtime_error("alist: missing dimensions");
    if (n == 0 || m == 0 || m >= n) throw std::runtime_error("alist: bad dimensions");
    std::size_t max_col = 0, max_row = 0;
    if (!(in >> max_col >> max_row)) throw std::runtime_error("alist: missing max weights");

    CodeSpec code;
    code.n = n;
    code.k = n - m;
    auto col_wts = read_ints(in, n);
    auto row_wts = read_ints(in, m);
    code.col_rows.resize(n);
    code.row_cols.resize(m);
    for (std::size_t j = 0; j < n; ++j) {
        auto entries = read_ints(in, max_col);
        long wt = col_wts[j];
        for (long e : entries) {
            if (e == 0) continue;  // padding
            if (e < 1 || static_cast<std::size_t>(e) > m) throw std::runtime_error("alist: row index out of range");
            code.col_rows[j].push_back(static_cast<std::uint32_t>(e - 1));
        }
        if (static_cast<long>(code.col_rows[j].size()) != wt)
            throw std::runtime_error("alist: column weight mismatch");
    }
    for (std::size_t i = 0; i < m; ++i) {
        auto entries = read_ints(in, max_row);
        long wt = row_wts[i];
        for (long e : entries) {
            if (e == 0) continue;
            if (e < 1 || static_cast<std::size_t>(e) > n) throw std::runtime_error("alist: col index out of range");
            code.row_cols[i].push_back(static_cast<std::uint32_t>(e - 1));
        }
        if (static_cast<long>(code.row_cols[i].size()) != wt)
            throw std::runtime_error("alist: row weight mismatch");
    }
    return code;
}

void save_alist(const CodeSpec& code, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("alist: cannot write " + path);
    const std::size_t m = code.num_checks();
    std::size_t max_col = 0, max_row = 0;
    for (const auto& c : code.col_rows) max_col = std::max(max_col, c.size());
    for (const auto& r : code.row_cols) max_row = std::max(max_row, r.size());
    out << code.n << " " << m << "\n" << max_col << " " << max_row << "\n";
    for (const auto& c : code.col_rows) out << c.size() << " ";
    out << "\n";
    for (const auto& r : code.row_cols) out << r.size() << " ";
    out << "\n";
    for (const auto& c : code.col_rows) {
        for (std::size_t i = 0; i < max_col; ++i) out << (i < c.size() ? c[i] + 1 : 0) << " ";
        out << "\n";
    }
    for (const auto& r : code.row_cols) {
        for (std::size_t i = 0; i < max_row; ++i) out << (i < r.size() ? r[i] + 1 : 0) << " ";
        out << "\n";
    }
}

bool ldpc_check(const CodeSpec& code, const BitVec& codeword) {
    if (codeword.size() != code.n) throw std::invalid_argument("ldpc_check: codeword length mismatch");
    for (const auto& row : code.row_cols) {
        unsigned s = 0;
        for (auto j : row) s ^= codeword[j];
        if (s) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kMaxGap = 4096;

std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

void xor_bit(std::vector<std::uint64_t>& v, std::size_t i) { v[i >> 6] ^= 1ull << (i & 63); }
bool get_bit(const std::vector<std::uint64_t>& v, std::size_t i) {
    return (v[i >> 6] >> (i & 63)) & 1ull;
}

}  // namespace

LdpcEncoder::LdpcEncoder(const CodeSpec& code) : code_(code) {
    m_ = code.num_checks();
    if (code.k + m_ != code.n) throw std::invalid_argument("ldpc: inconsistent (n, k, checks)");

    // Local adjacency restricted to parity columns (global col >= k).
    row_parity_cols_.resize(m_);
    std::vector<std::vector<std::uint32_t>> parity_col_rows(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        for (auto j : code.row_cols[i]) {
            if (j >= code.k) {
                const std::uint32_t local = static_cast<std::uint32_t>(j - code.k);
                row_parity_cols_[i].push_back(local);
                parity_col_rows[local].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }

    // Greedy diagonal extension: repeatedly take a row with exactly one
    // undetermined, non-gap parity column; when stuck, move the highest-degree
    // remaining column into the gap.
    std::vector<int> row_deg(m_);
    std::vector<char> row_done(m_, 0), col_done(m_, 0), col_gapped(m_, 0);
    std::vector<int> col_remaining_deg(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) row_deg[i] = static_cast<int>(row_parity_cols_[i].size());
    for (std::size_t c = 0; c < m_; ++c) col_remaining_deg[c] = static_cast<int>(parity_col_rows[c].size());

    std::deque<std::uint32_t> ready;
    auto push_if_ready = [&](std::size_t i) {
        if (!row_done[i] && row_deg[i] == 1) ready.push_back(static_cast<std::uint32_t>(i));
    };
    for (std::size_t i = 0; i < m_; ++i) push_if_ready(i);

    std::size_t determined = 0;
    while (determined + gap_cols_.size() < m_) {
        if (ready.empty()) {
            // Stuck: gap out the remaining column with the highest degree.
            std::size_t best = m_;
            int best_deg = -1;
            for (std::size_t c = 0; c < m_; ++c) {
                if (!col_done[c] && !col_gapped[c] && col_remaining_deg[c] > best_deg) {
                    best_deg = col_remaining_deg[c];
                    best = c;
                }
            }
            if (best == m_) break;
            col_gapped[best] = 1;
            gap_cols_.push_back(static_cast<std::uint32_t>(best));
            if (gap_cols_.size() > kMaxGap)
                throw std::runtime_error("ldpc: non-encodable parity structure (gap too large)");
            for (auto i : parity_col_rows[best]) {
                if (!row_done[i]) {
                    --row_deg[i];
                    push_if_ready(i);
                }
            }
            continue;
        }
        const std::uint32_t i = ready.front();
        ready.pop_front();
        if (row_done[i] || row_deg[i] != 1) continue;
        // The single undetermined non-gap column in this row becomes a pivot.
        std::uint32_t pc = 0;
        bool found = false;
        for (auto c : row_parity_cols_[i]) {
            if (!col_done[c] && !col_gapped[c]) { pc = c; found = true; break; }
        }
        if (!found) continue;
        pivot_rows_.push_back(i);
        pivot_cols_.push_back(pc);
        row_done[i] = 1;
        col_done[pc] = 1;
        ++determined;
        for (auto r : parity_col_rows[pc]) {
            if (!row_done[r]) {
                --row_deg[r];
                push_if_ready(r);
            }
        }
        --col_remaining_deg[pc];
    }

    t_ = pivot_rows_.size();
    gap_ = gap_cols_.size();
    if (t_ + gap_ != m_) throw std::runtime_error("ldpc: non-encodable parity structure");
    for (std::size_t i = 0; i < m_; ++i)
        if (!row_done[i]) gap_rows_.push_back(static_cast<std::uint32_t>(i));
    if (gap_rows_.size() != gap_) throw std::runtime_error("ldpc: non-encodable parity structure");

    if (gap_ > 0) {
        // phi = C - E * T^{-1} * A over GF(2), where A/C are the gap columns of
        // the pivot/gap rows. Build phi column by column via one triangular
        // solve per gap column, then invert it densely.
        std::vector<std::uint32_t> col_pos(m_, 0);  // parity col -> pivot order
        for (std::size_t idx = 0; idx < t_; ++idx) col_pos[pivot_cols_[idx]] = static_cast<std::uint32_t>(idx);
        std::vector<std::uint32_t> gap_pos(m_, 0);
        for (std::size_t idx = 0; idx < gap_; ++idx) gap_pos[gap_cols_[idx]] = static_cast<std::uint32_t>(idx);

        const std::size_t gw = words_for(gap_);
        std::vector<std::vector<std::uint64_t>> phi(gap_, std::vector<std::uint64_t>(gw, 0));

        std::vector<char> u(t_);  // T^{-1} a_j in pivot order
        for (std::size_t gj = 0; gj < gap_; ++gj) {
            const std::uint32_t gcol = gap_cols_[gj];
            std::vector<char> in_a(m_, 0);
            for (auto r : parity_col_rows[gcol]) in_a[r] = 1;
            // forward substitution through the pivots
            for (std::size_t idx = 0; idx < t_; ++idx) {
                const std::uint32_t row = pivot_rows_[idx];
                char acc = in_a[row];
                for (auto c : row_parity_cols_[row]) {
                    if (col_gapped[c] || c == pivot_cols_[idx]) continue;
                    if (col_done[c]) acc ^= u[col_pos[c]];
                }
                u[idx] = acc;
            }
            // phi rows: gap rows of (a_j - E u)
            for (std::size_t gi = 0; gi < gap_; ++gi) {
                const std::uint32_t row = gap_rows_[gi];
                char acc = in_a[row];
                for (auto c : row_parity_cols_[row]) {
                    if (!col_gapped[c]) acc ^= u[col_pos[c]];
                }
                if (acc) xor_bit(phi[gi], gj);
            }
        }

        // Dense GF(2) inversion of phi.
        phi_inv_.assign(gap_, std::vector<std::uint64_t>(gw, 0));
        for (std::size_t i = 0; i < gap_; ++i) xor_bit(phi_inv_[i], i);
        for (std::size_t col = 0; col < gap_; ++col) {
            std::size_t piv = gap_;
            for (std::size_t r = col; r < gap_; ++r) {
                if (get_bit(phi[r], col)) { piv = r; break; }
            }
            if (piv == gap_) throw std::runtime_error("ldpc: non-encodable parity structure (singular)");
            std::swap(phi[piv], phi[col]);
            std::swap(phi_inv_[piv], phi_inv_[col]);
            for (std::size_t r = 0; r < gap_; ++r) {
                if (r != col && get_bit(phi[r], col)) {
                    for (std::size_t w = 0; w < gw; ++w) {
                        phi[r][w] ^= phi[col][w];
                        phi_inv_[r][w] ^= phi_inv_[col][w];
                    }
                }
            }
        }
    }
}

BitVec LdpcEncoder::solve_parity(const BitVec& syndrome) const {
    // Solve H_p * p = syndrome with the precomputed structure.
    std::vector<char> col_gapped(m_, 0);
    for (auto c : gap_cols_) col_gapped[c] = 1;
    std::vector<std::uint32_t> col_pos(m_, 0);
    for (std::size_t idx = 0; idx < t_; ++idx) col_pos[pivot_cols_[idx]] = static_cast<std::uint32_t>(idx);

    auto forward = [&](const BitVec& rhs, std::vector<char>& u) {
        for (std::size_t idx = 0; idx < t_; ++idx) {
            const std::uint32_t row = pivot_rows_[idx];
            char acc = rhs[row];
            for (auto c : row_parity_cols_[row]) {
                if (col_gapped[c] || c == pivot_cols_[idx]) continue;
                acc ^= u[col_pos[c]];
            }
            u[idx] = acc;
        }
    };

    BitVec p(m_, 0);
    std::vector<char> u(t_, 0);
    if (gap_ > 0) {
        forward(syndrome, u);
        // v = gap rows of (syndrome - E u); p_gap = phi_inv * v
        std::vector<char> v(gap_, 0);
        for (std::size_t gi = 0; gi < gap_; ++gi) {
            const std::uint32_t row = gap_rows_[gi];
            char acc = syndrome[row];
            for (auto c : row_parity_cols_[row])
                if (!col_gapped[c]) acc ^= u[col_pos[c]];
            v[gi] = acc;
        }
        std::vector<char> pg(gap_, 0);
        for (std::size_t gi = 0; gi < gap_; ++gi) {
            char acc = 0;
            for (std::size_t gj = 0; gj < gap_; ++gj)
                if (v[gj] && get_bit(phi_inv_[gi], gj)) acc ^= 1;
            pg[gi] = acc;
        }
        for (std::size_t gj = 0; gj < gap_; ++gj) p[gap_cols_[gj]] = pg[gj];
        // rhs = syndrome - A * p_gap, then the final substitution
        BitVec rhs(m_, 0);
        for (std::size_t i = 0; i < m_; ++i) {
            char acc = syndrome[i];
            for (auto c : row_parity_cols_[i])
                if (col_gapped[c] && p[c]) acc ^= 1;
            rhs[i] = acc;
        }
        forward(rhs, u);
    } else {
        forward(syndrome, u);
    }
    for (std::size_t idx = 0; idx < t_; ++idx) p[pivot_cols_[idx]] = u[idx];
    return p;
}

BitVec LdpcEncoder::encode(const BitVec& message) const {
    if (message.size() != code_.k) throw std::invalid_argument("ldpc_encode: message length != k");
    BitVec syndrome(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
        unsigned s = 0;
        for (auto j : code_.row_cols[i])
            if (j < code_.k && message[j]) s ^= 1;
        syndrome[i] = static_cast<std::uint8_t>(s);
    }
    const BitVec p = solve_parity(syndrome);
    BitVec c(code_.n);
    std::copy(message.begin(), message.end(), c.begin());
    std::copy(p.begin(), p.end(), c.begin() + static_cast<std::ptrdiff_t>(code_.k));
    return c;
}

// ---------------------------------------------------------------------------
// Decoder
// ---------------------------------------------------------------------------

LdpcDecodeResult ldpc_decode(const std::vector<double>& llrs, const CodeSpec& code,
                             int max_iters) {
    if (llrs.size() != code.n) throw std::invalid_argument("ldpc_decode: LLR length != n");
    constexpr double kAlpha = 0.75;

    const std::size_t m = code.num_checks();
    std::size_t num_edges = 0;
    for (const auto& row : code.row_cols) num_edges += row.size();

    std::vector<std::uint32_t> edge_var;
    edge_var.reserve(num_edges);
    std::vector<std::size_t> row_start(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
        row_start[i] = edge_var.size();
        for (auto j : code.row_cols[i]) edge_var.push_back(j);
    }
    row_start[m] = edge_var.size();

    std::vector<double> msg(num_edges, 0.0);   // check -> variable messages
    std::vector<double> post(code.n);          // posterior LLRs

    LdpcDecodeResult res;
    res.codeword.assign(code.n, 0);

    auto harden = [&]() {
        for (std::size_t j = 0; j < code.n; ++j) res.codeword[j] = post[j] < 0.0 ? 1 : 0;
    };
    auto parity_ok = [&]() {
        for (std::size_t i = 0; i < m; ++i) {
            unsigned s = 0;
            for (std::size_t e = row_start[i]; e < row_start[i + 1]; ++e) s ^= res.codeword[edge_var[e]];
            if (s) return false;
        }
        return true;
    };

    post = llrs;
    for (int iter = 1; iter <= max_iters; ++iter) {
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t b = row_start[i], e = row_start[i + 1];
            // variable-to-check inputs: posterior minus previous check message
            double min1 = 1e300, min2 = 1e300;
            std::size_t argmin = b;
            unsigned sign_all = 0;
            for (std::size_t idx = b; idx < e; ++idx) {
                const double v = post[edge_var[idx]] - msg[idx];
                const double a = std::fabs(v);
                if (v < 0.0) sign_all ^= 1;
                if (a < min1) { min2 = min1; min1 = a; argmin = idx; }
                else if (a < min2) { min2 = a; }
                // stash v sign in msg temporarily via copy below
            }
            // second pass: new messages and posterior update
            for (std::size_t idx = b; idx < e; ++idx) {
                const std::uint32_t var = edge_var[idx];
                const double v = post[var] - msg[idx];
                unsigned sgn = sign_all ^ (v < 0.0 ? 1u : 0u);
                const double mag = kAlpha * (idx == argmin ? min2 : min1);
                const double nm = sgn ? -mag : mag;
                post[var] = v + nm;
                msg[idx] = nm;
            }
        }
        harden();
        res.iterations = iter;
        if (parity_ok()) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) harden();
    res.message.assign(res.codeword.begin(), res.codeword.begin() + static_cast<std::ptrdiff_t>(code.k));
    return res;
}

}  // namespace hf
