#pragma once

#include "hf/qam.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hf {

/**
 * Sparse parity-check code description. Row/column adjacency of H plus the
 * (n, k) frame; systematic encoding assumes the message occupies the first
 * k columns and the parity bits the last n-k.
 */
struct CodeSpec {
    std::size_t n = 0;  ///< codeword length (columns of H)
    std::size_t k = 0;  ///< message length (n - rows of H)
    std::vector<std::vector<std::uint32_t>> row_cols;  ///< per check: variable indices
    std::vector<std::vector<std::uint32_t>> col_rows;  ///< per variable: check indices

    std::size_t num_checks() const { return row_cols.size(); }
};

/// Reads the standard alist text format (1-based adjacency lists, zero padding
/// entries tolerated). Throws on malformed input.
CodeSpec load_alist(const std::string& path);

/// Writes the alist form of a CodeSpec (used by tooling and round-trip tests).
void save_alist(const CodeSpec& code, const std::string& path);

/// Syndrome check: true iff H * c = 0 over GF(2).
bool ldpc_check(const CodeSpec& code, const BitVec& codeword);

/**
 * Systematic encoder. Preprocessing permutes the parity part of H into an
 * approximate lower-triangular form (greedy diagonal extension plus a dense
 * GF(2) solve for the residual gap), so encoding itself is linear-time.
 * Throws "non-encodable parity structure" if the parity part is singular or
 * the gap exceeds the supported size.
 */
class LdpcEncoder {
public:
    explicit LdpcEncoder(const CodeSpec& code);

    /// message has length k; returns the length-n codeword [message, parity].
    BitVec encode(const BitVec& message) const;

    const CodeSpec& code() const { return code_; }

private:
    BitVec solve_parity(const BitVec& syndrome) const;

    CodeSpec code_;
    std::size_t m_ = 0;    // parity bits = checks
    std::size_t t_ = 0;    // triangular span
    std::size_t gap_ = 0;  // m - t
    std::vector<std::uint32_t> pivot_rows_;   // row order of the triangular part
    std::vector<std::uint32_t> pivot_cols_;   // parity-col order (local index)
    std::vector<std::uint32_t> gap_cols_;     // parity cols handled densely
    std::vector<std::uint32_t> gap_rows_;     // rows outside the triangular part
    std::vector<std::vector<std::uint32_t>> row_parity_cols_;  // local parity adjacency
    std::vector<std::vector<std::uint64_t>> phi_inv_;          // dense gap solver, bit rows
};

struct LdpcDecodeResult {
    BitVec codeword;   ///< hard decisions on all n bits
    BitVec message;    ///< first k bits of the codeword
    bool converged = false;
    int iterations = 0;
};

/**
 * Normalized min-sum belief propagation (normalization 0.75), early exit as
 * soon as every parity check is satisfied. LLR convention: positive = bit 0.
 * Always returns the best-effort result with the convergence flag.
 */
LdpcDecodeResult ldpc_decode(const std::vector<double>& llrs, const CodeSpec& code,
                             int max_iters = 50);

}  // namespace hf
