#pragma once

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "spnnz/csr.hpp"
#include "spnnz/flop.hpp"
#include "spnnz/rng.hpp"
#include "spnnz/symbolic.hpp"
#include "spnnz/types.hpp"

namespace spnnz {

/// Sampling policy: sample_num = clamp(ceil(fraction * M), 1, cap).
/// Defaults follow min(0.003 M, 300) with a floor of one row so tiny
/// matrices stay predictable.
struct SamplePolicy {
    double fraction = 0.003;
    offset_t cap = 300;
};

/// Row ids drawn uniformly with replacement; p counts duplicates
/// (p = sample_num / M). Fully reproducible from (M, seed).
struct SamplePlan {
    std::vector<index_t> sample_rows;
    offset_t sample_num = 0;
    double p = 0.0;
    std::uint64_t seed = 0;
};

inline SamplePlan make_sample_plan(index_t num_rows, std::uint64_t seed,
                                   SamplePolicy policy = {}) {
    if (num_rows < 1) {
        throw std::invalid_argument("make_sample_plan: M must be >= 1");
    }
    offset_t n = static_cast<offset_t>(std::ceil(policy.fraction * num_rows));
    n = std::min(n, policy.cap);
    n = std::max<offset_t>(n, 1);

    SamplePlan plan;
    plan.sample_num = n;
    plan.p = static_cast<double>(n) / static_cast<double>(num_rows);
    plan.seed = seed;
    plan.sample_rows.reserve(static_cast<std::size_t>(n));
    SplitMix64 rng(seed);
    for (offset_t r = 0; r < n; ++r) {
        const double u = rng.next_double();
        index_t rid = static_cast<index_t>(static_cast<double>(num_rows) * u);
        if (rid >= num_rows) rid = num_rows - 1; // u < 1, but guard the cast
        plan.sample_rows.push_back(rid);
    }
    return plan;
}

/// Every row exactly once, p = 1. Used to check that both estimators
/// collapse to the exact answer on an exhaustive sample.
inline SamplePlan exhaustive_plan(index_t num_rows) {
    if (num_rows < 1) {
        throw std::invalid_argument("exhaustive_plan: M must be >= 1");
    }
    SamplePlan plan;
    plan.sample_num = num_rows;
    plan.p = 1.0;
    plan.sample_rows.resize(static_cast<std::size_t>(num_rows));
    std::iota(plan.sample_rows.begin(), plan.sample_rows.end(), index_t{0});
    return plan;
}

/// Sampled FLOP f*, sampled NNZ z*, and their ratio r* = f*/z* (the sampled
/// compression ratio). Degenerate samples (all sampled rows empty) report
/// a ratio of 1, the lower bound of compression.
struct SampleStats {
    offset_t sampled_flop = 0;
    offset_t sampled_nnz = 0;
    double sampled_cr = 1.0;
};

inline SampleStats collect_sample_stats(const FlopProfile& profile, const SamplePlan& plan,
                                        const RowNnzResult& sampled) {
    SampleStats stats;
    stats.sampled_flop = sampled_flop(profile, plan.sample_rows);
    stats.sampled_nnz = sampled.total_nnz;
    stats.sampled_cr = (stats.sampled_flop > 0 && stats.sampled_nnz > 0)
                           ? static_cast<double>(stats.sampled_flop) /
                                 static_cast<double>(stats.sampled_nnz)
                           : 1.0;
    return stats;
}

/// Reference estimator: Z1* = z*/p.
inline double predict_reference(const SampleStats& stats, const SamplePlan& plan) {
    if (!(plan.p > 0.0)) {
        throw std::invalid_argument("predict_reference: p must be positive");
    }
    return static_cast<double>(stats.sampled_nnz) / plan.p;
}

struct ProposedPrediction {
    double z2_star = 0.0;
    double predicted_cr = 1.0;
};

/// Proposed estimator: predicted CR r* = f*/z*, Z2* = (F/f*) z*. When the
/// sample is degenerate (f* or z* zero) the CR falls back to 1, so Z2* = F,
/// the upper-bound estimate.
inline ProposedPrediction predict_proposed(const SampleStats& stats, offset_t total_flop) {
    ProposedPrediction out;
    if (stats.sampled_flop <= 0 || stats.sampled_nnz <= 0) {
        out.predicted_cr = 1.0;
        out.z2_star = static_cast<double>(total_flop);
        return out;
    }
    out.predicted_cr = static_cast<double>(stats.sampled_flop) /
                       static_cast<double>(stats.sampled_nnz);
    // (F*z*)/f* rather than F/r*: one rounding step, so an exhaustive sample
    // (f* = F, z* = Z) and a collision-free one (f* = z*) both come out exact.
    out.z2_star = static_cast<double>(total_flop) * static_cast<double>(stats.sampled_nnz) /
                  static_cast<double>(stats.sampled_flop);
    return out;
}

/// Predicted output structure: flop_per_row[i] / predicted_cr.
inline std::vector<double> predict_row_structure(const FlopProfile& profile,
                                                 double predicted_cr) {
    if (!(predicted_cr > 0.0)) {
        throw std::invalid_argument("predict_row_structure: predicted_cr must be positive");
    }
    std::vector<double> out(profile.flop_per_row.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<double>(profile.flop_per_row[i]) / predicted_cr;
    }
    return out;
}

/// Rounded-up view for allocation consumers, clamped so no row exceeds its
/// FLOP upper bound.
inline std::vector<offset_t> predict_row_structure_ceil(const FlopProfile& profile,
                                                        double predicted_cr) {
    if (!(predicted_cr > 0.0)) {
        throw std::invalid_argument("predict_row_structure_ceil: predicted_cr must be positive");
    }
    std::vector<offset_t> out(profile.flop_per_row.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double exact = static_cast<double>(profile.flop_per_row[i]) / predicted_cr;
        out[i] = std::min(profile.flop_per_row[i], static_cast<offset_t>(std::ceil(exact)));
    }
    return out;
}

/// Relative errors of both estimators plus the residual of the identity
/// eps2 = (eps1 - eps_f) / (1 + eps_f), which holds algebraically whenever
/// both estimators share the same sample.
struct ErrorReport {
    double eps1 = 0.0;
    double eps_f = 0.0;
    double eps2 = 0.0;
    double identity_residual = 0.0;
};

inline ErrorReport error_report(double z1_star, double z2_star, offset_t f_star,
                                offset_t exact_nnz, offset_t total_flop, double p) {
    if (exact_nnz <= 0 || total_flop <= 0) {
        throw std::invalid_argument("error_report: relative error undefined for Z = 0 or F = 0");
    }
    if (!(p > 0.0)) {
        throw std::invalid_argument("error_report: p must be positive");
    }
    ErrorReport report;
    const double z = static_cast<double>(exact_nnz);
    const double f = static_cast<double>(total_flop);
    const double f_star_scaled = static_cast<double>(f_star) / p;
    report.eps1 = (z1_star - z) / z;
    report.eps_f = (f_star_scaled - f) / f;
    report.eps2 = (z2_star - z) / z;
    if (f_star > 0) {
        report.identity_residual =
            std::abs(report.eps2 - (report.eps1 - report.eps_f) / (1.0 + report.eps_f));
    } else {
        // Empty sample: eps_f = -1 makes the identity 0/0, and the proposed
        // estimator took the CR-1 fallback instead of the ratio division, so
        // there is nothing to check.
        report.identity_residual = 0.0;
    }
    return report;
}

/// Everything the pipeline produces for one (A, B) pair: both estimates,
/// the predicted per-row structure, and the inputs they came from.
struct PredictionReport {
    double z1_star = 0.0;
    double z2_star = 0.0;
    double predicted_cr = 1.0;
    std::vector<double> predicted_row_nnz;
    SamplePlan plan;
    SampleStats stats;
    offset_t total_flop = 0;
};

inline PredictionReport run_prediction_with_plan(const CsrMatrix& a, const CsrMatrix& b,
                                                 const FlopProfile& profile,
                                                 SamplePlan plan, int threads = 0) {
    PredictionReport report;
    const RowNnzResult sampled = sampled_symbolic(a, b, profile, plan.sample_rows, threads);
    report.stats = collect_sample_stats(profile, plan, sampled);
    report.z1_star = predict_reference(report.stats, plan);
    const ProposedPrediction proposed = predict_proposed(report.stats, profile.total_flop);
    report.z2_star = proposed.z2_star;
    report.predicted_cr = proposed.predicted_cr;
    report.predicted_row_nnz = predict_row_structure(profile, report.predicted_cr);
    report.total_flop = profile.total_flop;
    report.plan = std::move(plan);
    return report;
}

/// End-to-end pipeline: FLOP profile, sample plan, sampled symbolic pass,
/// both estimators, predicted structure. Deterministic for a fixed seed.
inline PredictionReport run_prediction(const CsrMatrix& a, const CsrMatrix& b,
                                       std::uint64_t seed, SamplePolicy policy = {},
                                       int threads = 0) {
    const FlopProfile profile = compute_flop(a, b, threads);
    SamplePlan plan = make_sample_plan(a.rows, seed, policy);
    return run_prediction_with_plan(a, b, profile, std::move(plan), threads);
}

} // namespace spnnz
