#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "spnnz/csr.hpp"
#include "spnnz/flop.hpp"
#include "spnnz/parallel.hpp"
#include "spnnz/types.hpp"

namespace spnnz {

/// Multiplicative constant for the open-addressing hash. Any odd value gives
/// a correct set union; 107 is a conventional choice in hash-based SpGEMM
/// kernels.
inline constexpr offset_t kHashScale = 107;

/// Open-addressing hash table that computes the distinct-column count of one
/// output row. Thread-confined: allocate one per worker with capacity
/// max_flop_row, then reuse it row after row. Only the first tsize slots are
/// touched for a row with FLOP tsize, and tsize >= nnz of that row, so the
/// linear probe always terminates.
class HashAccumulator {
public:
    explicit HashAccumulator(offset_t capacity, offset_t hash_scale = kHashScale)
        : table_(static_cast<std::size_t>(capacity), -1), hash_scale_(hash_scale) {}

    offset_t capacity() const { return static_cast<offset_t>(table_.size()); }

    /// Exact nnz of output row `row` of C = AB. tsize must equal
    /// flop_per_row[row]; rows with tsize 0 return 0 without touching the
    /// table.
    offset_t row_nnz(const CsrMatrix& a, const CsrMatrix& b, index_t row, offset_t tsize) {
        if (tsize == 0) return 0;
        if (tsize > capacity()) {
            throw std::invalid_argument("HashAccumulator: tsize " + std::to_string(tsize) +
                                        " exceeds capacity " + std::to_string(capacity()));
        }
        std::fill(table_.begin(), table_.begin() + tsize, index_t{-1});
        offset_t local_nnz = 0;
        for (offset_t i = a.rpt[row]; i < a.rpt[row + 1]; ++i) {
            const index_t b_row = a.col[i];
            for (offset_t j = b.rpt[b_row]; j < b.rpt[b_row + 1]; ++j) {
                const index_t key = b.col[j];
                offset_t hash = (key * hash_scale_) % tsize;
                while (true) {
                    if (table_[hash] == key) break;
                    if (table_[hash] == -1) {
                        table_[hash] = key;
                        ++local_nnz;
                        break;
                    }
                    hash = (hash + 1) % tsize;
                }
            }
        }
        return local_nnz;
    }

private:
    std::vector<index_t> table_;
    offset_t hash_scale_;
};

inline offset_t row_nnz(const CsrMatrix& a, const CsrMatrix& b, index_t row,
                        HashAccumulator& accumulator, offset_t tsize) {
    return accumulator.row_nnz(a, b, row, tsize);
}

/// Exact nnz per output row (full mode) or per sampled row (sampled mode),
/// plus the total.
struct RowNnzResult {
    std::vector<offset_t> nnz_per_row;
    offset_t total_nnz = 0;
};

namespace detail {

inline void check_symbolic_args(const CsrMatrix& a, const CsrMatrix& b,
                                const FlopProfile& profile) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("symbolic: A.cols != B.rows");
    }
    if (profile.flop_per_row.size() != static_cast<std::size_t>(a.rows)) {
        throw std::invalid_argument("symbolic: profile does not match A");
    }
}

} // namespace detail

/// Ground-truth oracle: exact output structure of C = AB.
inline RowNnzResult exact_symbolic(const CsrMatrix& a, const CsrMatrix& b,
                                   const FlopProfile& profile, int threads = 0) {
    detail::check_symbolic_args(a, b, profile);
    RowNnzResult result;
    result.nnz_per_row.assign(static_cast<std::size_t>(a.rows), 0);

    const int workers = static_cast<int>(
        std::min<std::int64_t>(resolve_threads(threads), std::max<index_t>(a.rows, 1)));
    std::vector<offset_t> partial(workers, 0);

    parallel_blocks(a.rows, workers, [&](int tid, std::int64_t begin, std::int64_t end) {
        HashAccumulator accumulator(profile.max_flop_row);
        offset_t local_total = 0;
        for (std::int64_t i = begin; i < end; ++i) {
            const offset_t nnz = accumulator.row_nnz(a, b, static_cast<index_t>(i),
                                                     profile.flop_per_row[i]);
            result.nnz_per_row[i] = nnz;
            local_total += nnz;
        }
        partial[tid] = local_total;
    });

    for (offset_t p : partial) result.total_nnz += p;
    return result;
}

/// Symbolic pass over a sample list. Duplicated row ids are recomputed and
/// counted again, mirroring independent draws with replacement.
inline RowNnzResult sampled_symbolic(const CsrMatrix& a, const CsrMatrix& b,
                                     const FlopProfile& profile,
                                     std::span<const index_t> sample_rows, int threads = 0) {
    detail::check_symbolic_args(a, b, profile);
    for (index_t rid : sample_rows) {
        if (rid < 0 || rid >= a.rows) {
            throw std::invalid_argument("sampled_symbolic: row " + std::to_string(rid) +
                                        " out of range");
        }
    }
    RowNnzResult result;
    result.nnz_per_row.assign(sample_rows.size(), 0);

    const std::int64_t n = static_cast<std::int64_t>(sample_rows.size());
    const int workers =
        static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), std::max<std::int64_t>(n, 1)));
    std::vector<offset_t> partial(workers, 0);

    parallel_blocks(n, workers, [&](int tid, std::int64_t begin, std::int64_t end) {
        HashAccumulator accumulator(profile.max_flop_row);
        offset_t local_total = 0;
        for (std::int64_t s = begin; s < end; ++s) {
            const index_t rid = sample_rows[s];
            const offset_t nnz = accumulator.row_nnz(a, b, rid, profile.flop_per_row[rid]);
            result.nnz_per_row[s] = nnz;
            local_total += nnz;
        }
        partial[tid] = local_total;
    });

    for (offset_t p : partial) result.total_nnz += p;
    return result;
}

} // namespace spnnz
