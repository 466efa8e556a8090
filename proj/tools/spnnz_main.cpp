// spnnz: predict the output structure of sparse matrix multiplication.
//
// Subcommands: flop, exact, predict, bench, fetch, gen. See README.md.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "spnnz/bench.hpp"
#include "spnnz/csr.hpp"
#include "spnnz/fetch.hpp"
#include "spnnz/flop.hpp"
#include "spnnz/matrix_market.hpp"
#include "spnnz/predict.hpp"
#include "spnnz/symbolic.hpp"
#include "spnnz/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fmt(double v) {
    if (!std::isfinite(v)) return "na";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

fs::path resolve_cache_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("SPGEMM_ORACLE_CACHE")) return env;
    if (const char* home = std::getenv("HOME")) return fs::path(home) / ".cache" / "spnnz";
    return fs::path(".spnnz-cache");
}

struct LoadedPair {
    spnnz::NamedMatrix a;
    spnnz::NamedMatrix b;
    bool squared = false; // B omitted: benchmark the matrix square A*A
};

LoadedPair load_pair(const std::string& a_source, const std::string& b_source,
                     const fs::path& cache_dir, bool reshape) {
    LoadedPair pair;
    pair.a = spnnz::resolve_matrix_source(a_source, cache_dir);
    if (b_source.empty()) {
        pair.b = pair.a;
        pair.squared = true;
    } else {
        pair.b = spnnz::resolve_matrix_source(b_source, cache_dir);
    }
    if (reshape) {
        spnnz::TestCase tc = spnnz::build_case(pair.a.name, std::move(pair.a.matrix),
                                               pair.b.name, std::move(pair.b.matrix));
        pair.a.matrix = std::move(tc.a);
        pair.b.matrix = std::move(tc.b);
    }
    return pair;
}

void print_flop_histogram(const spnnz::FlopProfile& profile, std::ostream& os) {
    // log2 buckets: [0], [1,2), [2,4), ...
    std::vector<long long> buckets(1, 0);
    for (spnnz::offset_t f : profile.flop_per_row) {
        if (f == 0) {
            ++buckets[0];
            continue;
        }
        std::size_t bucket = 1;
        spnnz::offset_t lo = 1;
        while (lo * 2 <= f) {
            lo *= 2;
            ++bucket;
        }
        if (buckets.size() <= bucket) buckets.resize(bucket + 1, 0);
        ++buckets[bucket];
    }
    os << "flop_histogram\n";
    if (buckets[0] > 0) os << "  [0] " << buckets[0] << "\n";
    spnnz::offset_t lo = 1;
    for (std::size_t b = 1; b < buckets.size(); ++b) {
        if (buckets[b] > 0) {
            os << "  [" << lo << "," << lo * 2 << ") " << buckets[b] << "\n";
        }
        lo *= 2;
    }
}

int cmd_flop(const std::string& a_source, const std::string& b_source,
             const fs::path& cache_dir, bool reshape, int threads, bool json) {
    const LoadedPair pair = load_pair(a_source, b_source, cache_dir, reshape);
    const spnnz::FlopProfile profile = spnnz::compute_flop(pair.a.matrix, pair.b.matrix, threads);
    if (json) {
        ordered_json j;
        j["a"] = pair.a.name;
        j["b"] = pair.b.name;
        j["rows"] = pair.a.matrix.rows;
        j["cols"] = pair.b.matrix.cols;
        j["total_flop"] = profile.total_flop;
        j["max_flop_row"] = profile.max_flop_row;
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "a " << pair.a.name << "\n";
    std::cout << "b " << pair.b.name << "\n";
    std::cout << "rows " << pair.a.matrix.rows << "\n";
    std::cout << "cols " << pair.b.matrix.cols << "\n";
    std::cout << "total_flop " << profile.total_flop << "\n";
    std::cout << "max_flop_row " << profile.max_flop_row << "\n";
    print_flop_histogram(profile, std::cout);
    return 0;
}

int cmd_exact(const std::string& a_source, const std::string& b_source,
              const fs::path& cache_dir, bool reshape, int threads, bool json) {
    const LoadedPair pair = load_pair(a_source, b_source, cache_dir, reshape);
    const spnnz::FlopProfile profile = spnnz::compute_flop(pair.a.matrix, pair.b.matrix, threads);
    const spnnz::RowNnzResult exact =
        spnnz::exact_symbolic(pair.a.matrix, pair.b.matrix, profile, threads);
    const double cr = exact.total_nnz > 0 ? static_cast<double>(profile.total_flop) /
                                                static_cast<double>(exact.total_nnz)
                                          : std::numeric_limits<double>::quiet_NaN();
    if (json) {
        ordered_json j;
        j["a"] = pair.a.name;
        j["b"] = pair.b.name;
        j["total_flop"] = profile.total_flop;
        j["total_nnz"] = exact.total_nnz;
        j["cr"] = fmt(cr);
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "a " << pair.a.name << "\n";
    std::cout << "b " << pair.b.name << "\n";
    std::cout << "total_flop " << profile.total_flop << "\n";
    std::cout << "total_nnz " << exact.total_nnz << "\n";
    std::cout << "cr " << fmt(cr) << "\n";
    return 0;
}

int cmd_predict(const std::string& a_source, const std::string& b_source,
                const fs::path& cache_dir, bool reshape, std::uint64_t seed,
                spnnz::SamplePolicy policy, bool with_exact, const std::string& structure_out,
                int threads, bool json) {
    const LoadedPair pair = load_pair(a_source, b_source, cache_dir, reshape);
    const spnnz::FlopProfile profile =
        spnnz::compute_flop(pair.a.matrix, pair.b.matrix, threads);
    const spnnz::PredictionReport report = spnnz::run_prediction_with_plan(
        pair.a.matrix, pair.b.matrix, profile,
        spnnz::make_sample_plan(pair.a.matrix.rows, seed, policy), threads);

    ordered_json j;
    j["a"] = pair.a.name;
    j["b"] = pair.b.name;
    j["rows"] = pair.a.matrix.rows;
    j["seed"] = seed;
    j["sample_num"] = report.plan.sample_num;
    j["p"] = fmt(report.plan.p);
    j["sampled_flop"] = report.stats.sampled_flop;
    j["sampled_nnz"] = report.stats.sampled_nnz;
    j["total_flop"] = report.total_flop;
    j["predicted_cr"] = fmt(report.predicted_cr);
    j["z1_star"] = fmt(report.z1_star);
    j["z2_star"] = fmt(report.z2_star);

    if (with_exact) {
        const spnnz::RowNnzResult exact =
            spnnz::exact_symbolic(pair.a.matrix, pair.b.matrix, profile, threads);
        j["exact_nnz"] = exact.total_nnz;
        if (exact.total_nnz > 0 && profile.total_flop > 0) {
            j["exact_cr"] = fmt(static_cast<double>(profile.total_flop) /
                                static_cast<double>(exact.total_nnz));
            const spnnz::ErrorReport errors =
                spnnz::error_report(report.z1_star, report.z2_star, report.stats.sampled_flop,
                                    exact.total_nnz, profile.total_flop, report.plan.p);
            j["eps1_pct"] = fmt(errors.eps1 * 100.0);
            j["eps_f_pct"] = fmt(errors.eps_f * 100.0);
            j["eps2_pct"] = fmt(errors.eps2 * 100.0);
        } else {
            j["exact_cr"] = "na";
            j["eps1_pct"] = "na";
            j["eps_f_pct"] = "na";
            j["eps2_pct"] = "na";
        }
    }

    if (!structure_out.empty()) {
        std::ofstream out(structure_out, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + structure_out);
        const std::vector<spnnz::offset_t> ceil_view =
            spnnz::predict_row_structure_ceil(profile, report.predicted_cr);
        out << "row,flop,predicted,predicted_ceil\n";
        for (std::size_t i = 0; i < report.predicted_row_nnz.size(); ++i) {
            out << i << "," << profile.flop_per_row[i] << "," << fmt(report.predicted_row_nnz[i])
                << "," << ceil_view[i] << "\n";
        }
    }

    if (json) {
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& [key, value] : j.items()) {
            std::cout << key << " "
                      << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
        }
    }
    return 0;
}

int cmd_bench(const std::string& list_path, const fs::path& cache_dir, std::uint64_t seed,
              int reps, const std::string& out_path, const std::string& format, bool no_timing,
              bool parallel_cases, spnnz::SamplePolicy policy, int threads, bool json) {
    std::vector<spnnz::NamedMatrix> matrices;
    std::vector<spnnz::CaseFailure> load_failures;
    if (list_path.empty()) {
        matrices = spnnz::default_corpus();
    } else {
        for (const std::string& line : spnnz::parse_matrix_list(list_path)) {
            try {
                matrices.push_back(spnnz::resolve_matrix_source(line, cache_dir));
            } catch (const std::exception& e) {
                load_failures.push_back({line, "", e.what()});
            }
        }
    }
    if (matrices.empty()) {
        std::cerr << "error: no matrices could be loaded";
        if (!load_failures.empty()) std::cerr << " (" << load_failures.size() << " failures)";
        std::cerr << "\n";
        for (const auto& f : load_failures) {
            std::cerr << "  " << f.a_name << ": " << f.message << "\n";
        }
        return 1;
    }

    spnnz::RunConfig config;
    config.seed = seed;
    config.repetitions = reps;
    config.collect_timings = !no_timing;
    config.parallel_cases = parallel_cases;
    config.threads = threads;
    config.policy = policy;

    spnnz::BenchOutput output = spnnz::run_corpus(matrices, config);
    for (auto& f : load_failures) output.failures.push_back(std::move(f));
    output.summary = spnnz::summarize(output.cases, output.failures.size());

    const spnnz::ReportFormat report_format =
        format == "json" ? spnnz::ReportFormat::json : spnnz::ReportFormat::csv;
    std::string report_path = out_path;
    if (report_path.empty()) {
        report_path = format == "json" ? "spnnz_bench.json" : "spnnz_bench.csv";
    }
    spnnz::emit_report(output, report_format, report_path);

    if (json) {
        ordered_json j = spnnz::summary_to_json(output.summary);
        j["report"] = report_path;
        std::cout << j.dump(2) << "\n";
    } else {
        const spnnz::CorpusSummary& s = output.summary;
        std::cout << "cases " << s.cases_total << " failed " << s.cases_failed << " degenerate "
                  << s.cases_degenerate << "\n";
        std::cout << "mean_abs_eps1_pct " << fmt(s.mean_abs_eps1 * 100.0) << " mean_abs_eps2_pct "
                  << fmt(s.mean_abs_eps2 * 100.0) << " win_rate " << fmt(s.win_rate)
                  << " pearson_eps1_epsf " << fmt(s.pearson_eps1_epsf) << "\n";
        std::cout << "mean_flop_fraction " << fmt(s.mean_flop_fraction)
                  << " mean_predict_fraction " << fmt(s.mean_predict_fraction) << "\n";
        if (!output.failures.empty()) {
            std::cout << "failures\n";
            for (const auto& f : output.failures) {
                std::cout << "  " << f.a_name << (f.b_name.empty() ? "" : " x " + f.b_name)
                          << ": " << f.message << "\n";
            }
        }
        std::cout << "report " << report_path << "\n";
    }
    return output.cases.empty() ? 1 : 0;
}

int cmd_fetch(const std::string& group, const std::string& name, const fs::path& cache_dir) {
    const fs::path path = spnnz::fetch_suitesparse(group, name, cache_dir);
    std::cout << path.string() << "\n";
    return 0;
}

int cmd_gen(const std::string& model, spnnz::index_t rows, spnnz::index_t cols,
            double nnz_per_row, std::uint64_t seed, spnnz::index_t bandwidth, double skew,
            const std::string& out_path) {
    spnnz::SyntheticSpec spec;
    if (model == "uniform") spec.model = spnnz::SyntheticModel::uniform;
    else if (model == "banded") spec.model = spnnz::SyntheticModel::banded;
    else if (model == "power-law") spec.model = spnnz::SyntheticModel::power_law;
    else throw std::invalid_argument("unknown model '" + model + "'");
    spec.rows = rows;
    spec.cols = cols;
    spec.target_nnz_per_row = nnz_per_row;
    spec.seed = seed;
    spec.bandwidth = bandwidth;
    spec.skew = skew;
    const spnnz::CsrMatrix m = spnnz::generate_synthetic(spec);
    spnnz::write_matrix_market(out_path, m);
    std::cout << "wrote " << out_path << " rows " << m.rows << " cols " << m.cols << " nnz "
              << m.nnz() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spnnz: SpGEMM output structure prediction via sampled compression ratio"};
    app.require_subcommand(1);

    bool json = false;
    int threads = 0;
    std::string cache_dir_flag;
    app.add_flag("--json", json, "machine-readable stdout");
    app.add_option("--threads", threads, "worker threads (0 = all hardware threads)");
    app.add_option("--cache-dir", cache_dir_flag,
                   "matrix cache directory (default: $SPGEMM_ORACLE_CACHE or ~/.cache/spnnz)");

    std::string a_source, b_source;
    bool reshape = false;
    std::uint64_t seed = 42;
    spnnz::SamplePolicy policy;
    bool with_exact = false;
    std::string structure_out;

    auto* flop = app.add_subcommand("flop", "FLOP per output row and total FLOP of C = AB");
    flop->add_option("a", a_source, "first matrix (.mtx path, group/name, or synth:...)")
        ->required();
    flop->add_option("b", b_source, "second matrix (defaults to A: the matrix square)");
    flop->add_flag("--reshape", reshape, "reshape inputs so A.cols == B.rows");

    auto* exact = app.add_subcommand("exact", "exact symbolic pass: NNZ(C), FLOP(C), CR");
    exact->add_option("a", a_source, "first matrix")->required();
    exact->add_option("b", b_source, "second matrix (defaults to A)");
    exact->add_flag("--reshape", reshape, "reshape inputs so A.cols == B.rows");

    auto* predict = app.add_subcommand("predict", "predict NNZ(C) and the output structure");
    predict->add_option("a", a_source, "first matrix")->required();
    predict->add_option("b", b_source, "second matrix (defaults to A)");
    predict->add_option("--seed", seed, "sampling seed");
    predict->add_option("--sample-frac", policy.fraction, "sampled row fraction");
    predict->add_option("--sample-cap", policy.cap, "sampled row cap");
    predict->add_flag("--reshape", reshape, "reshape inputs so A.cols == B.rows");
    predict->add_flag("--exact", with_exact, "also run the exact oracle and report errors");
    predict->add_option("--structure-out", structure_out,
                        "write per-row predicted structure CSV to this path");

    std::string list_path, out_path, format = "csv";
    int reps = 10;
    bool no_timing = false, parallel_cases = false;

    auto* bench = app.add_subcommand("bench", "run a corpus of pairwise test cases");
    bench->add_option("--list", list_path,
                      "matrix list file (one source per line; default: built-in corpus)");
    bench->add_option("--seed", seed, "corpus seed");
    bench->add_option("--reps", reps, "timed repetitions per task (after one warm-up)");
    bench->add_option("--out", out_path, "report path (default: spnnz_bench.<format>)");
    bench->add_option("--format", format, "report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    bench->add_option("--sample-frac", policy.fraction, "sampled row fraction");
    bench->add_option("--sample-cap", policy.cap, "sampled row cap");
    bench->add_flag("--no-timing", no_timing, "skip the timing protocol");
    bench->add_flag("--parallel-cases", parallel_cases,
                    "run cases in parallel (disables timing collection)");

    std::string group, name;
    auto* fetch = app.add_subcommand("fetch", "download a SuiteSparse matrix into the cache");
    fetch->add_option("group", group, "collection group")->required();
    fetch->add_option("name", name, "matrix name")->required();

    std::string gen_model;
    spnnz::index_t gen_rows = 0, gen_cols = 0, gen_bandwidth = 0;
    double gen_nnz = 0.0, gen_skew = 1.0;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "generate a synthetic matrix as a .mtx pattern file");
    gen->add_option("model", gen_model, "uniform | banded | power-law")->required();
    gen->add_option("rows", gen_rows, "rows")->required();
    gen->add_option("cols", gen_cols, "cols")->required();
    gen->add_option("nnz_per_row", gen_nnz, "target nonzeros per row")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--bandwidth", gen_bandwidth, "band half-width (banded model)");
    gen->add_option("--skew", gen_skew, "skew exponent (power-law model)");
    gen->add_option("--out", gen_out, "output path")->required();

    // Let global flags (--json, --threads, --cache-dir) appear after the
    // subcommand name as well.
    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const fs::path cache_dir = resolve_cache_dir(cache_dir_flag);
    try {
        if (flop->parsed()) return cmd_flop(a_source, b_source, cache_dir, reshape, threads, json);
        if (exact->parsed()) {
            return cmd_exact(a_source, b_source, cache_dir, reshape, threads, json);
        }
        if (predict->parsed()) {
            return cmd_predict(a_source, b_source, cache_dir, reshape, seed, policy, with_exact,
                               structure_out, threads, json);
        }
        if (bench->parsed()) {
            return cmd_bench(list_path, cache_dir, seed, reps, out_path, format, no_timing,
                             parallel_cases, policy, threads, json);
        }
        if (fetch->parsed()) return cmd_fetch(group, name, cache_dir);
        if (gen->parsed()) {
            return cmd_gen(gen_model, gen_rows, gen_cols, gen_nnz, seed, gen_bandwidth, gen_skew,
                           gen_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
