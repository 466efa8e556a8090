#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "spnnz/types.hpp"

namespace spnnz {

/// Sparse matrix in CSR format: rpt (row offsets), col (column indices),
/// val (optional values). Structure-only matrices leave val empty; every
/// algorithm in this toolkit reads only rpt and col.
///
/// Invariants (see validate()):
///   rpt[0] == 0, rpt non-decreasing, rpt[rows] == col.size();
///   column indices strictly increasing within each row, all in [0, cols);
///   val.size() == col.size() when values are present.
///
/// Immutable by convention after construction; safe to share across threads.
struct CsrMatrix {
    index_t rows = 0;
    index_t cols = 0;
    std::vector<offset_t> rpt{0};
    std::vector<index_t> col;
    std::vector<double> val;

    offset_t nnz() const { return rpt.empty() ? 0 : rpt.back(); }
    bool has_values() const { return !val.empty(); }

    std::span<const index_t> row_cols(index_t i) const {
        return {col.data() + rpt[i], static_cast<std::size_t>(rpt[i + 1] - rpt[i])};
    }
};

struct Triplet {
    index_t row = 0;
    index_t col = 0;
    double val = 1.0;
};

/// Assemble a CSR matrix from triplets. Duplicate (row, col) pairs collapse
/// to one stored entry (structure prediction cares about positions, not
/// values); when values are kept, the first occurrence wins.
inline CsrMatrix from_triplets(std::span<const Triplet> triplets, index_t rows,
                               index_t cols, bool keep_values = false) {
    if (rows < 0 || cols < 0) {
        throw assembly_error("from_triplets: negative dimensions");
    }
    for (std::size_t i = 0; i < triplets.size(); ++i) {
        const Triplet& t = triplets[i];
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw assembly_error("from_triplets: triplet " + std::to_string(i) + " = (" +
                                 std::to_string(t.row) + ", " + std::to_string(t.col) +
                                 ") out of bounds for " + std::to_string(rows) + "x" +
                                 std::to_string(cols));
        }
    }

    // Counting sort by row, then sort each row by column and drop duplicates.
    std::vector<offset_t> count(static_cast<std::size_t>(rows) + 1, 0);
    for (const Triplet& t : triplets) ++count[static_cast<std::size_t>(t.row) + 1];
    for (index_t r = 0; r < rows; ++r) count[r + 1] += count[r];

    std::vector<offset_t> order(triplets.size());
    {
        std::vector<offset_t> cursor(count.begin(), count.end() - 1);
        for (std::size_t i = 0; i < triplets.size(); ++i) {
            order[static_cast<std::size_t>(cursor[triplets[i].row]++)] =
                static_cast<offset_t>(i);
        }
    }

    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.rpt.assign(static_cast<std::size_t>(rows) + 1, 0);
    m.col.reserve(triplets.size());
    if (keep_values) m.val.reserve(triplets.size());

    for (index_t r = 0; r < rows; ++r) {
        const auto begin = order.begin() + count[r];
        const auto end = order.begin() + count[r + 1];
        std::sort(begin, end, [&](offset_t a, offset_t b) {
            if (triplets[a].col != triplets[b].col) return triplets[a].col < triplets[b].col;
            return a < b; // stable within a column so "first occurrence wins"
        });
        index_t last = -1;
        for (auto it = begin; it != end; ++it) {
            const Triplet& t = triplets[*it];
            if (t.col == last) continue;
            last = t.col;
            m.col.push_back(t.col);
            if (keep_values) m.val.push_back(t.val);
        }
        m.rpt[r + 1] = static_cast<offset_t>(m.col.size());
    }
    return m;
}

inline std::vector<Triplet> to_triplets(const CsrMatrix& m) {
    std::vector<Triplet> out;
    out.reserve(static_cast<std::size_t>(m.nnz()));
    for (index_t i = 0; i < m.rows; ++i) {
        for (offset_t k = m.rpt[i]; k < m.rpt[i + 1]; ++k) {
            out.push_back({i, m.col[k], m.has_values() ? m.val[k] : 1.0});
        }
    }
    return out;
}

/// Check every CsrMatrix invariant; returns one message per violation
/// (empty result means the matrix is valid). Each message names the row of
/// first offense.
inline std::vector<std::string> validate(const CsrMatrix& m) {
    std::vector<std::string> violations;
    if (m.rows < 0 || m.cols < 0) {
        violations.push_back("negative dimensions");
        return violations;
    }
    if (m.rpt.size() != static_cast<std::size_t>(m.rows) + 1) {
        violations.push_back("rpt length " + std::to_string(m.rpt.size()) + " != rows+1");
        return violations;
    }
    if (m.rpt[0] != 0) violations.push_back("rpt[0] != 0");
    for (index_t i = 0; i < m.rows; ++i) {
        if (m.rpt[i + 1] < m.rpt[i]) {
            violations.push_back("non-monotone rpt at row " + std::to_string(i));
            return violations; // offsets unusable beyond this point
        }
    }
    if (m.rpt[m.rows] != static_cast<offset_t>(m.col.size())) {
        violations.push_back("rpt[rows] != length(col)");
        return violations;
    }
    for (index_t i = 0; i < m.rows; ++i) {
        for (offset_t k = m.rpt[i]; k < m.rpt[i + 1]; ++k) {
            if (m.col[k] < 0 || m.col[k] >= m.cols) {
                violations.push_back("column index out of range at row " + std::to_string(i));
                break;
            }
            if (k > m.rpt[i] && m.col[k] <= m.col[k - 1]) {
                violations.push_back("columns not strictly increasing at row " +
                                     std::to_string(i));
                break;
            }
        }
    }
    if (m.has_values() && m.val.size() != m.col.size()) {
        violations.push_back("val length != col length");
    }
    return violations;
}

/// Keep only the entries with column index < new_cols (the "left" block).
inline CsrMatrix reshape_keep_left(const CsrMatrix& m, index_t new_cols) {
    if (new_cols > m.cols || new_cols < 0) {
        throw std::invalid_argument("reshape_keep_left: new_cols " + std::to_string(new_cols) +
                                    " out of range for cols " + std::to_string(m.cols));
    }
    CsrMatrix out;
    out.rows = m.rows;
    out.cols = new_cols;
    out.rpt.assign(static_cast<std::size_t>(m.rows) + 1, 0);
    out.col.reserve(static_cast<std::size_t>(m.nnz()));
    if (m.has_values()) out.val.reserve(static_cast<std::size_t>(m.nnz()));
    for (index_t i = 0; i < m.rows; ++i) {
        // Columns are sorted, so the kept entries are a prefix of the row.
        offset_t k = m.rpt[i];
        while (k < m.rpt[i + 1] && m.col[k] < new_cols) {
            out.col.push_back(m.col[k]);
            if (m.has_values()) out.val.push_back(m.val[k]);
            ++k;
        }
        out.rpt[i + 1] = static_cast<offset_t>(out.col.size());
    }
    return out;
}

/// Keep only the top new_rows rows.
inline CsrMatrix reshape_keep_top(const CsrMatrix& m, index_t new_rows) {
    if (new_rows > m.rows || new_rows < 0) {
        throw std::invalid_argument("reshape_keep_top: new_rows " + std::to_string(new_rows) +
                                    " out of range for rows " + std::to_string(m.rows));
    }
    CsrMatrix out;
    out.rows = new_rows;
    out.cols = m.cols;
    out.rpt.assign(m.rpt.begin(), m.rpt.begin() + new_rows + 1);
    out.col.assign(m.col.begin(), m.col.begin() + out.rpt[new_rows]);
    if (m.has_values()) {
        out.val.assign(m.val.begin(), m.val.begin() + out.rpt[new_rows]);
    }
    return out;
}

} // namespace spnnz
