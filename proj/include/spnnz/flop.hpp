#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "spnnz/csr.hpp"
#include "spnnz/parallel.hpp"
#include "spnnz/types.hpp"

namespace spnnz {

/// Number of intermediate products per output row of C = AB, plus the total.
/// flop_per_row[i] is the upper bound on the nonzero count of output row i.
struct FlopProfile {
    std::vector<offset_t> flop_per_row;
    offset_t total_flop = 0;
    offset_t max_flop_row = 0;
};

/// flop_per_row[i] = sum over j in A's row i of nnz(B row A.col[j]).
/// Touches only A.rpt, A.col and B.rpt. Rows are statically partitioned
/// across threads; per-thread totals are reduced afterwards, so the result
/// is identical for any thread count.
inline FlopProfile compute_flop(const CsrMatrix& a, const CsrMatrix& b, int threads = 0) {
    if (a.cols != b.rows) {
        throw std::invalid_argument("compute_flop: A.cols " + std::to_string(a.cols) +
                                    " != B.rows " + std::to_string(b.rows));
    }
    FlopProfile profile;
    profile.flop_per_row.assign(static_cast<std::size_t>(a.rows), 0);

    const int workers = static_cast<int>(
        std::min<std::int64_t>(resolve_threads(threads), std::max<index_t>(a.rows, 1)));
    std::vector<offset_t> partial_total(workers, 0);
    std::vector<offset_t> partial_max(workers, 0);

    parallel_blocks(a.rows, workers, [&](int tid, std::int64_t begin, std::int64_t end) {
        offset_t local_total = 0;
        offset_t local_max = 0;
        for (std::int64_t i = begin; i < end; ++i) {
            offset_t local_flop = 0;
            for (offset_t j = a.rpt[i]; j < a.rpt[i + 1]; ++j) {
                const index_t k = a.col[j];
                local_flop += b.rpt[k + 1] - b.rpt[k];
            }
            profile.flop_per_row[i] = local_flop;
            local_total += local_flop;
            if (local_flop > local_max) local_max = local_flop;
        }
        partial_total[tid] = local_total;
        partial_max[tid] = local_max;
    });

    for (int t = 0; t < workers; ++t) {
        profile.total_flop += partial_total[t];
        if (partial_max[t] > profile.max_flop_row) profile.max_flop_row = partial_max[t];
    }
    return profile;
}

/// Sum of flop_per_row over a sample list; duplicate row ids count once per
/// appearance.
inline offset_t sampled_flop(const FlopProfile& profile, std::span<const index_t> sample_rows) {
    offset_t sum = 0;
    for (index_t rid : sample_rows) {
        if (rid < 0 || static_cast<std::size_t>(rid) >= profile.flop_per_row.size()) {
            throw std::invalid_argument("sampled_flop: row " + std::to_string(rid) +
                                        " out of range");
        }
        sum += profile.flop_per_row[rid];
    }
    return sum;
}

} // namespace spnnz
