#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "spnnz/csr.hpp"
#include "spnnz/rng.hpp"
#include "spnnz/types.hpp"

namespace spnnz {

enum class SyntheticModel { uniform, banded, power_law };

/// Deterministic synthetic matrix description; the seed fully determines the
/// output. Stands in for real SuiteSparse matrices when working offline.
struct SyntheticSpec {
    index_t rows = 0;
    index_t cols = 0;
    SyntheticModel model = SyntheticModel::uniform;
    double target_nnz_per_row = 0.0;
    std::uint64_t seed = 0;
    index_t bandwidth = 0; // banded only; 0 picks a default from the target
    double skew = 1.0;     // power-law only
};

namespace detail {

// Poisson draw via Knuth's product-of-uniforms method, split into chunks so
// exp(-lambda) never underflows. Row counts need genuine variance: constant
// counts would make the sampled FLOP deterministic, which no real matrix
// exhibits.
inline offset_t poisson_count(double lambda, SplitMix64& rng) {
    offset_t total = 0;
    while (lambda > 0.0) {
        const double chunk = std::min(lambda, 30.0);
        lambda -= chunk;
        const double limit = std::exp(-chunk);
        double product = rng.next_double();
        while (product > limit) {
            ++total;
            product *= rng.next_double();
        }
    }
    return total;
}

// Floyd's algorithm: k distinct values from [lo, lo + range).
inline void sample_distinct(index_t lo, index_t range, index_t k, SplitMix64& rng,
                            std::vector<index_t>& out) {
    out.clear();
    std::unordered_set<index_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k) * 2);
    for (index_t j = range - k; j < range; ++j) {
        const index_t t = static_cast<index_t>(rng.next_below(static_cast<std::uint64_t>(j) + 1));
        if (chosen.insert(t).second) {
            out.push_back(lo + t);
        } else {
            chosen.insert(j);
            out.push_back(lo + j);
        }
    }
    std::sort(out.begin(), out.end());
}

inline std::string format_compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace detail

inline std::string to_string(SyntheticModel model) {
    switch (model) {
        case SyntheticModel::uniform: return "uniform";
        case SyntheticModel::banded: return "banded";
        case SyntheticModel::power_law: return "power-law";
    }
    return "?";
}

/// Generate the structure described by spec. Each row draws its nonzero
/// count from the model, then picks that many distinct columns; both draws
/// use a per-row substream of the seed, so the result does not depend on
/// evaluation order.
inline CsrMatrix generate_synthetic(const SyntheticSpec& spec) {
    if (spec.rows < 0 || spec.cols < 0) {
        throw std::invalid_argument("generate_synthetic: negative dimensions");
    }
    if (spec.target_nnz_per_row < 0 ||
        spec.target_nnz_per_row > static_cast<double>(spec.cols)) {
        throw std::invalid_argument("generate_synthetic: target_nnz_per_row " +
                                    std::to_string(spec.target_nnz_per_row) +
                                    " infeasible for cols " + std::to_string(spec.cols));
    }

    const index_t default_band = static_cast<index_t>(
        std::max(16.0, 4.0 * std::ceil(spec.target_nnz_per_row)));
    const index_t bandwidth = spec.bandwidth > 0 ? spec.bandwidth : default_band;

    // Power-law row weights: row i carries weight (i+1)^(-skew), scaled so the
    // mean row count matches the target.
    double weight_sum = 0.0;
    if (spec.model == SyntheticModel::power_law) {
        for (index_t i = 0; i < spec.rows; ++i) {
            weight_sum += std::pow(static_cast<double>(i) + 1.0, -spec.skew);
        }
    }

    CsrMatrix m;
    m.rows = spec.rows;
    m.cols = spec.cols;
    m.rpt.assign(static_cast<std::size_t>(spec.rows) + 1, 0);

    std::vector<index_t> row_cols;
    for (index_t i = 0; i < spec.rows; ++i) {
        SplitMix64 rng = SplitMix64::fork(spec.seed, static_cast<std::uint64_t>(i));

        double target = spec.target_nnz_per_row;
        if (spec.model == SyntheticModel::power_law && weight_sum > 0.0) {
            target = spec.target_nnz_per_row * static_cast<double>(spec.rows) *
                     std::pow(static_cast<double>(i) + 1.0, -spec.skew) / weight_sum;
        }
        offset_t count = detail::poisson_count(target, rng);

        index_t lo = 0;
        index_t range = spec.cols;
        if (spec.model == SyntheticModel::banded) {
            // Band centered on the scaled diagonal position.
            const index_t center = spec.rows > 0
                                       ? static_cast<index_t>(
                                             (static_cast<offset_t>(i) * spec.cols) / spec.rows)
                                       : 0;
            lo = std::max<index_t>(0, center - bandwidth);
            const index_t hi = std::min<index_t>(spec.cols, center + bandwidth + 1);
            range = hi - lo;
        }
        count = std::min<offset_t>(count, range);

        detail::sample_distinct(lo, range, static_cast<index_t>(count), rng, row_cols);
        m.col.insert(m.col.end(), row_cols.begin(), row_cols.end());
        m.rpt[i + 1] = static_cast<offset_t>(m.col.size());
    }
    return m;
}

/// Compact one-line form used by matrix list files and the CLI, e.g.
/// "synth:uniform:1000x1000:nnz=4:seed=7" or
/// "synth:banded:5000x5000:nnz=10:bw=64:seed=1" or
/// "synth:power-law:8000x8000:nnz=12:skew=0.8:seed=3".
inline SyntheticSpec parse_synthetic_spec(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t sep = text.find(':', start);
        if (sep == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, sep - start));
        start = sep + 1;
    }
    if (parts.size() < 3 || parts[0] != "synth") {
        throw std::invalid_argument("invalid synthetic spec '" + text + "'");
    }

    SyntheticSpec spec;
    if (parts[1] == "uniform") spec.model = SyntheticModel::uniform;
    else if (parts[1] == "banded") spec.model = SyntheticModel::banded;
    else if (parts[1] == "power-law") spec.model = SyntheticModel::power_law;
    else throw std::invalid_argument("unknown synthetic model '" + parts[1] + "'");

    const std::string& dims = parts[2];
    const std::size_t x = dims.find('x');
    if (x == std::string::npos) {
        throw std::invalid_argument("invalid dimensions '" + dims + "' (want RxC)");
    }
    spec.rows = static_cast<index_t>(std::stoll(dims.substr(0, x)));
    spec.cols = static_cast<index_t>(std::stoll(dims.substr(x + 1)));

    for (std::size_t i = 3; i < parts.size(); ++i) {
        const std::size_t eq = parts[i].find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("invalid synthetic option '" + parts[i] + "'");
        }
        const std::string key = parts[i].substr(0, eq);
        const std::string value = parts[i].substr(eq + 1);
        if (key == "nnz") spec.target_nnz_per_row = std::stod(value);
        else if (key == "seed") spec.seed = std::stoull(value);
        else if (key == "bw") spec.bandwidth = static_cast<index_t>(std::stoll(value));
        else if (key == "skew") spec.skew = std::stod(value);
        else throw std::invalid_argument("unknown synthetic option '" + key + "'");
    }
    return spec;
}

inline std::string synthetic_name(const SyntheticSpec& spec) {
    std::string name = "synth:" + to_string(spec.model) + ":" + std::to_string(spec.rows) +
                       "x" + std::to_string(spec.cols) +
                       ":nnz=" + detail::format_compact(spec.target_nnz_per_row);
    if (spec.model == SyntheticModel::banded && spec.bandwidth > 0) {
        name += ":bw=" + std::to_string(spec.bandwidth);
    }
    if (spec.model == SyntheticModel::power_law) {
        name += ":skew=" + detail::format_compact(spec.skew);
    }
    name += ":seed=" + std::to_string(spec.seed);
    return name;
}

} // namespace spnnz
