#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spnnz/csr.hpp"
#include "spnnz/fetch.hpp"
#include "spnnz/flop.hpp"
#include "spnnz/matrix_market.hpp"
#include "spnnz/parallel.hpp"
#include "spnnz/predict.hpp"
#include "spnnz/rng.hpp"
#include "spnnz/symbolic.hpp"
#include "spnnz/synthetic.hpp"
#include "spnnz/types.hpp"

namespace spnnz {

struct NamedMatrix {
    std::string name;
    CsrMatrix matrix;
};

enum class ReshapeApplied { none, a_left_cols, b_top_rows };

/// One multiplication test case; inputs reshaped so A.cols == B.rows.
struct TestCase {
    std::string a_name;
    std::string b_name;
    CsrMatrix a;
    CsrMatrix b;
    ReshapeApplied reshape_applied = ReshapeApplied::none;
};

/// Make (A, B) multipliable: when A is too wide, keep its left B.rows
/// columns; when B is too tall, keep its top A.cols rows.
inline TestCase build_case(std::string a_name, CsrMatrix a, std::string b_name, CsrMatrix b) {
    TestCase tc;
    tc.reshape_applied = ReshapeApplied::none;
    if (a.cols > b.rows) {
        a = reshape_keep_left(a, b.rows);
        tc.reshape_applied = ReshapeApplied::a_left_cols;
    } else if (a.cols < b.rows) {
        b = reshape_keep_top(b, a.cols);
        tc.reshape_applied = ReshapeApplied::b_top_rows;
    }
    tc.a_name = std::move(a_name);
    tc.b_name = std::move(b_name);
    tc.a = std::move(a);
    tc.b = std::move(b);
    return tc;
}

struct CaseResult {
    std::string a_name;
    std::string b_name;
    offset_t sample_num = 0;
    offset_t exact_nnz = 0;  // Z
    offset_t total_flop = 0; // F
    double cr = std::numeric_limits<double>::quiet_NaN(); // F/Z
    double z1_star = 0.0;
    double z2_star = 0.0;
    double eps1 = std::numeric_limits<double>::quiet_NaN();
    double eps_f = std::numeric_limits<double>::quiet_NaN();
    double eps2 = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false; // Z == 0: excluded from error statistics
    double t_flop = std::numeric_limits<double>::quiet_NaN();
    double t_predict = std::numeric_limits<double>::quiet_NaN();
    double t_exact = std::numeric_limits<double>::quiet_NaN();
};

struct CaseFailure {
    std::string a_name;
    std::string b_name;
    std::string message;
};

struct CorpusSummary {
    std::size_t cases_total = 0;
    std::size_t cases_failed = 0;
    std::size_t cases_degenerate = 0;
    double mean_abs_eps1 = 0.0;
    double mean_abs_eps_f = 0.0;
    double mean_abs_eps2 = 0.0;
    double worst_abs_eps1 = 0.0;
    double worst_abs_eps_f = 0.0;
    double worst_abs_eps2 = 0.0;
    double win_rate = 0.0; // fraction of cases with |eps2| < |eps1|
    double pearson_eps1_epsf = std::numeric_limits<double>::quiet_NaN();
    double mean_flop_fraction = std::numeric_limits<double>::quiet_NaN();
    double mean_predict_fraction = std::numeric_limits<double>::quiet_NaN();
};

struct BenchOutput {
    std::vector<CaseResult> cases;
    std::vector<CaseFailure> failures;
    CorpusSummary summary;
};

struct RunConfig {
    std::uint64_t seed = 42;
    int repetitions = 10; // timed runs per task, after one warm-up
    int warmup = 1;
    bool collect_timings = true;
    bool parallel_cases = false; // opt-in; forces collect_timings off
    int threads = 0;
    SamplePolicy policy{};
};

namespace detail {

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mean_x;
        const double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

/// Wall-clock protocol: warm-up runs, then the mean of the timed runs.
template <typename Fn>
double time_task(Fn&& fn, int warmup, int repetitions) {
    using clock = std::chrono::steady_clock;
    for (int i = 0; i < warmup; ++i) fn();
    double total = 0.0;
    for (int i = 0; i < repetitions; ++i) {
        const auto start = clock::now();
        fn();
        total += std::chrono::duration<double>(clock::now() - start).count();
    }
    return total / std::max(repetitions, 1);
}

} // namespace detail

/// Run one prepared case: FLOP profile, exact oracle, both predictions,
/// error analytics, and the timing protocol when enabled.
inline CaseResult run_case(const TestCase& tc, std::uint64_t case_seed, const RunConfig& config) {
    CaseResult result;
    result.a_name = tc.a_name;
    result.b_name = tc.b_name;

    const bool timing = config.collect_timings && !config.parallel_cases;
    const int reps = std::max(config.repetitions, 1);

    FlopProfile profile;
    if (timing) {
        result.t_flop = detail::time_task(
            [&] { profile = compute_flop(tc.a, tc.b, config.threads); }, config.warmup, reps);
    } else {
        profile = compute_flop(tc.a, tc.b, config.threads);
    }

    RowNnzResult exact;
    if (timing) {
        result.t_exact = detail::time_task(
            [&] { exact = exact_symbolic(tc.a, tc.b, profile, config.threads); }, config.warmup,
            reps);
    } else {
        exact = exact_symbolic(tc.a, tc.b, profile, config.threads);
    }

    SamplePlan plan;
    SampleStats stats;
    double z1 = 0.0, z2 = 0.0;
    const auto predict_task = [&] {
        plan = make_sample_plan(tc.a.rows, case_seed, config.policy);
        const RowNnzResult sampled =
            sampled_symbolic(tc.a, tc.b, profile, plan.sample_rows, config.threads);
        stats = collect_sample_stats(profile, plan, sampled);
        z1 = predict_reference(stats, plan);
        const ProposedPrediction proposed = predict_proposed(stats, profile.total_flop);
        z2 = proposed.z2_star;
    };
    if (timing) {
        result.t_predict = detail::time_task(predict_task, config.warmup, reps);
    } else {
        predict_task();
    }

    result.sample_num = plan.sample_num;
    result.exact_nnz = exact.total_nnz;
    result.total_flop = profile.total_flop;
    result.z1_star = z1;
    result.z2_star = z2;
    if (exact.total_nnz > 0 && profile.total_flop > 0) {
        result.cr = static_cast<double>(profile.total_flop) /
                    static_cast<double>(exact.total_nnz);
        const ErrorReport errors = error_report(z1, z2, stats.sampled_flop, exact.total_nnz,
                                                profile.total_flop, plan.p);
        result.eps1 = errors.eps1;
        result.eps_f = errors.eps_f;
        result.eps2 = errors.eps2;
    } else {
        result.degenerate = true;
    }
    return result;
}

inline CorpusSummary summarize(std::span<const CaseResult> cases, std::size_t failed_count) {
    CorpusSummary summary;
    summary.cases_total = cases.size() + failed_count;
    summary.cases_failed = failed_count;

    std::vector<double> eps1s, epsfs;
    std::size_t wins = 0;
    std::size_t counted = 0;
    double t_flop_frac_sum = 0.0, t_predict_frac_sum = 0.0;
    std::size_t timing_count = 0;

    for (const CaseResult& c : cases) {
        if (c.degenerate) {
            ++summary.cases_degenerate;
            continue;
        }
        ++counted;
        summary.mean_abs_eps1 += std::abs(c.eps1);
        summary.mean_abs_eps_f += std::abs(c.eps_f);
        summary.mean_abs_eps2 += std::abs(c.eps2);
        summary.worst_abs_eps1 = std::max(summary.worst_abs_eps1, std::abs(c.eps1));
        summary.worst_abs_eps_f = std::max(summary.worst_abs_eps_f, std::abs(c.eps_f));
        summary.worst_abs_eps2 = std::max(summary.worst_abs_eps2, std::abs(c.eps2));
        if (std::abs(c.eps2) < std::abs(c.eps1)) ++wins;
        eps1s.push_back(c.eps1);
        epsfs.push_back(c.eps_f);
        if (std::isfinite(c.t_exact) && c.t_exact > 0.0 && std::isfinite(c.t_flop) &&
            std::isfinite(c.t_predict)) {
            t_flop_frac_sum += c.t_flop / c.t_exact;
            t_predict_frac_sum += c.t_predict / c.t_exact;
            ++timing_count;
        }
    }
    if (counted > 0) {
        summary.mean_abs_eps1 /= static_cast<double>(counted);
        summary.mean_abs_eps_f /= static_cast<double>(counted);
        summary.mean_abs_eps2 /= static_cast<double>(counted);
        summary.win_rate = static_cast<double>(wins) / static_cast<double>(counted);
    }
    summary.pearson_eps1_epsf = detail::pearson(eps1s, epsfs);
    if (timing_count > 0) {
        summary.mean_flop_fraction = t_flop_frac_sum / static_cast<double>(timing_count);
        summary.mean_predict_fraction = t_predict_frac_sum / static_cast<double>(timing_count);
    }
    return summary;
}

/// All ordered pairs (including self-pairs) of the input matrices. Each case
/// draws its seed from (config.seed, case index), so a fixed configuration
/// reproduces byte-identical results. Per-case failures are recorded, not
/// fatal.
inline BenchOutput run_corpus(const std::vector<NamedMatrix>& matrices, const RunConfig& config) {
    if (matrices.empty()) {
        throw std::invalid_argument("run_corpus: matrix list is empty");
    }
    BenchOutput output;
    const std::size_t n = matrices.size();
    const std::size_t total = n * n;
    output.cases.reserve(total);

    struct Slot {
        bool ok = false;
        bool present = false;
        CaseResult result;
        CaseFailure failure;
    };
    std::vector<Slot> slots(total);

    const auto run_one = [&](std::size_t idx) {
        const std::size_t i = idx / n;
        const std::size_t j = idx % n;
        Slot& slot = slots[idx];
        slot.present = true;
        const std::uint64_t case_seed = SplitMix64::fork(config.seed, idx).next_u64();
        try {
            TestCase tc = build_case(matrices[i].name, matrices[i].matrix, matrices[j].name,
                                     matrices[j].matrix);
            slot.result = run_case(tc, case_seed, config);
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.failure = {matrices[i].name, matrices[j].name, e.what()};
        }
    };

    if (config.parallel_cases) {
        parallel_blocks(static_cast<std::int64_t>(total), config.threads,
                        [&](int, std::int64_t begin, std::int64_t end) {
                            for (std::int64_t idx = begin; idx < end; ++idx) {
                                run_one(static_cast<std::size_t>(idx));
                            }
                        });
    } else {
        for (std::size_t idx = 0; idx < total; ++idx) run_one(idx);
    }

    for (Slot& slot : slots) {
        if (slot.ok) {
            output.cases.push_back(std::move(slot.result));
        } else {
            output.failures.push_back(std::move(slot.failure));
        }
    }
    output.summary = summarize(output.cases, output.failures.size());
    return output;
}

struct OverheadFractions {
    struct PerCase {
        std::string a_name;
        std::string b_name;
        double flop_fraction = std::numeric_limits<double>::quiet_NaN();
        double predict_fraction = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<PerCase> per_case;
    double mean_flop_fraction = std::numeric_limits<double>::quiet_NaN();
    double mean_predict_fraction = std::numeric_limits<double>::quiet_NaN();
};

/// t_flop/t_exact and t_predict/t_exact per case and averaged. The exact
/// symbolic pass stands in for a full SpGEMM baseline, so these fractions
/// are upper bounds on the overhead relative to a complete multiplication.
inline OverheadFractions overhead_fractions(std::span<const CaseResult> cases) {
    OverheadFractions out;
    double flop_sum = 0.0, predict_sum = 0.0;
    std::size_t counted = 0;
    for (const CaseResult& c : cases) {
        OverheadFractions::PerCase pc;
        pc.a_name = c.a_name;
        pc.b_name = c.b_name;
        if (std::isfinite(c.t_exact) && c.t_exact > 0.0 && std::isfinite(c.t_flop) &&
            std::isfinite(c.t_predict)) {
            pc.flop_fraction = c.t_flop / c.t_exact;
            pc.predict_fraction = c.t_predict / c.t_exact;
            flop_sum += pc.flop_fraction;
            predict_sum += pc.predict_fraction;
            ++counted;
        }
        out.per_case.push_back(std::move(pc));
    }
    if (counted > 0) {
        out.mean_flop_fraction = flop_sum / static_cast<double>(counted);
        out.mean_predict_fraction = predict_sum / static_cast<double>(counted);
    }
    return out;
}

namespace detail {

inline std::string format_field(double v) {
    if (!std::isfinite(v)) return "na";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace detail

inline std::string render_csv(const BenchOutput& output) {
    std::string csv = "a,b,sample_num,cr,nnz_c,eps1_pct,eps_f_pct,eps2_pct,"
                      "t_flop_s,t_predict_s,t_exact_s\n";
    for (const CaseResult& c : output.cases) {
        csv += c.a_name + "," + c.b_name + "," + std::to_string(c.sample_num) + ",";
        csv += detail::format_field(c.cr) + "," + std::to_string(c.exact_nnz) + ",";
        csv += detail::format_field(c.eps1 * 100.0) + ",";
        csv += detail::format_field(c.eps_f * 100.0) + ",";
        csv += detail::format_field(c.eps2 * 100.0) + ",";
        csv += detail::format_field(c.t_flop) + ",";
        csv += detail::format_field(c.t_predict) + ",";
        csv += detail::format_field(c.t_exact) + "\n";
    }
    return csv;
}

inline nlohmann::ordered_json summary_to_json(const CorpusSummary& s) {
    nlohmann::ordered_json j;
    j["cases_total"] = s.cases_total;
    j["cases_failed"] = s.cases_failed;
    j["cases_degenerate"] = s.cases_degenerate;
    j["mean_abs_eps1_pct"] = detail::format_field(s.mean_abs_eps1 * 100.0);
    j["mean_abs_eps_f_pct"] = detail::format_field(s.mean_abs_eps_f * 100.0);
    j["mean_abs_eps2_pct"] = detail::format_field(s.mean_abs_eps2 * 100.0);
    j["worst_abs_eps1_pct"] = detail::format_field(s.worst_abs_eps1 * 100.0);
    j["worst_abs_eps_f_pct"] = detail::format_field(s.worst_abs_eps_f * 100.0);
    j["worst_abs_eps2_pct"] = detail::format_field(s.worst_abs_eps2 * 100.0);
    j["win_rate"] = detail::format_field(s.win_rate);
    j["pearson_eps1_epsf"] = detail::format_field(s.pearson_eps1_epsf);
    j["mean_flop_fraction"] = detail::format_field(s.mean_flop_fraction);
    j["mean_predict_fraction"] = detail::format_field(s.mean_predict_fraction);
    return j;
}

inline std::string render_json(const BenchOutput& output) {
    nlohmann::ordered_json j;
    j["cases"] = nlohmann::ordered_json::array();
    for (const CaseResult& c : output.cases) {
        nlohmann::ordered_json jc;
        jc["a"] = c.a_name;
        jc["b"] = c.b_name;
        jc["sample_num"] = c.sample_num;
        jc["cr"] = detail::format_field(c.cr);
        jc["nnz_c"] = c.exact_nnz;
        jc["eps1_pct"] = detail::format_field(c.eps1 * 100.0);
        jc["eps_f_pct"] = detail::format_field(c.eps_f * 100.0);
        jc["eps2_pct"] = detail::format_field(c.eps2 * 100.0);
        jc["t_flop_s"] = detail::format_field(c.t_flop);
        jc["t_predict_s"] = detail::format_field(c.t_predict);
        jc["t_exact_s"] = detail::format_field(c.t_exact);
        j["cases"].push_back(std::move(jc));
    }
    j["failures"] = nlohmann::ordered_json::array();
    for (const CaseFailure& f : output.failures) {
        j["failures"].push_back({{"a", f.a_name}, {"b", f.b_name}, {"error", f.message}});
    }
    j["summary"] = summary_to_json(output.summary);
    return j.dump(2) + "\n";
}

enum class ReportFormat { csv, json };

inline void emit_report(const BenchOutput& output, ReportFormat format,
                        const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report to " + path.string());
    out << (format == ReportFormat::csv ? render_csv(output) : render_json(output));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

/// Matrix list file: one source per line; '#' starts a comment. A line is a
/// synthetic spec ("synth:..."), a Matrix Market path (ends in .mtx), or a
/// SuiteSparse collection entry ("group/name").
inline std::vector<std::string> parse_matrix_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix list " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const std::size_t last = line.find_last_not_of(" \t\r");
        lines.push_back(line.substr(first, last - first + 1));
    }
    return lines;
}

inline NamedMatrix resolve_matrix_source(const std::string& source,
                                         const std::filesystem::path& cache_dir) {
    if (source.rfind("synth:", 0) == 0) {
        const SyntheticSpec spec = parse_synthetic_spec(source);
        return {synthetic_name(spec), generate_synthetic(spec)};
    }
    if (source.size() > 4 && source.compare(source.size() - 4, 4, ".mtx") == 0) {
        return {std::filesystem::path(source).stem().string(), read_matrix_market(source)};
    }
    const std::size_t slash = source.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 >= source.size()) {
        throw std::runtime_error("unrecognized matrix source '" + source +
                                 "' (want synth:..., *.mtx, or group/name)");
    }
    const std::string group = source.substr(0, slash);
    const std::string name = source.substr(slash + 1);
    const std::filesystem::path path = fetch_suitesparse(group, name, cache_dir);
    return {name, read_matrix_market(path)};
}

/// Default synthetic corpus: 12 matrices whose self- and cross-products span
/// compression ratios from about 1 to about 20, with uniform, banded and
/// power-law structures. 12 x 12 = 144 ordered pairs. Narrow rectangular
/// matrices provide the high-CR end (dense rows colliding in few columns)
/// while keeping enough rows for a meaningful sample.
inline std::vector<NamedMatrix> default_corpus() {
    const std::vector<SyntheticSpec> specs = {
        {20000, 20000, SyntheticModel::uniform, 3.0, 101, 0, 1.0},
        {12000, 12000, SyntheticModel::uniform, 8.0, 102, 0, 1.0},
        {6000, 6000, SyntheticModel::uniform, 25.0, 103, 0, 1.0},
        {4000, 4000, SyntheticModel::uniform, 40.0, 104, 0, 1.0},
        {3000, 3000, SyntheticModel::uniform, 60.0, 105, 0, 1.0},
        {8000, 2000, SyntheticModel::uniform, 50.0, 106, 0, 1.0},
        {8000, 1000, SyntheticModel::uniform, 55.0, 107, 0, 1.0},
        {10000, 10000, SyntheticModel::banded, 10.0, 110, 50, 1.0},
        {12000, 12000, SyntheticModel::banded, 18.0, 113, 30, 1.0},
        {6000, 300, SyntheticModel::uniform, 77.0, 109, 0, 1.0},
        {15000, 15000, SyntheticModel::power_law, 6.0, 111, 0, 0.9},
        {9000, 9000, SyntheticModel::power_law, 15.0, 112, 0, 0.7},
    };
    std::vector<NamedMatrix> corpus;
    corpus.reserve(specs.size());
    for (const SyntheticSpec& spec : specs) {
        corpus.push_back({synthetic_name(spec), generate_synthetic(spec)});
    }
    return corpus;
}

} // namespace spnnz
