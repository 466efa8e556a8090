#include <catch2/catch_amalgamated.hpp>

#include "spnnz/csr.hpp"
#include "spnnz/flop.hpp"
#include "spnnz/rng.hpp"

#include "oracle.hpp"

using namespace spnnz;

namespace {

CsrMatrix identity(index_t n) {
    std::vector<Triplet> triplets;
    for (index_t i = 0; i < n; ++i) triplets.push_back({i, i, 1.0});
    return from_triplets(triplets, n, n);
}

// [[1,1],[0,1]]
CsrMatrix upper_2x2() {
    return from_triplets(std::vector<Triplet>{{0, 0}, {0, 1}, {1, 1}}, 2, 2);
}

} // namespace

TEST_CASE("compute_flop on the identity", "[flop]") {
    const CsrMatrix eye = identity(4);
    const FlopProfile profile = compute_flop(eye, eye);
    CHECK(profile.flop_per_row == std::vector<offset_t>{1, 1, 1, 1});
    CHECK(profile.total_flop == 4);
    CHECK(profile.max_flop_row == 1);
}

TEST_CASE("compute_flop expands row by row", "[flop]") {
    const CsrMatrix m = upper_2x2();
    const FlopProfile profile = compute_flop(m, m);
    CHECK(profile.flop_per_row == std::vector<offset_t>{3, 1});
    CHECK(profile.total_flop == 4);
    CHECK(profile.max_flop_row == 3);
}

TEST_CASE("compute_flop rejects mismatched dimensions", "[flop]") {
    REQUIRE_THROWS_AS(compute_flop(identity(3), identity(4)), std::invalid_argument);
}

TEST_CASE("compute_flop on an empty matrix", "[flop]") {
    CsrMatrix empty;
    empty.rows = 0;
    empty.cols = 0;
    const FlopProfile profile = compute_flop(empty, empty);
    CHECK(profile.total_flop == 0);
    CHECK(profile.max_flop_row == 0);
    CHECK(profile.flop_per_row.empty());
}

TEST_CASE("compute_flop matches the dense pair-count oracle", "[flop]") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = static_cast<index_t>(1 + rng.next_below(60));
        const auto k = static_cast<index_t>(1 + rng.next_below(60));
        const auto n = static_cast<index_t>(1 + rng.next_below(60));
        const double density = 0.02 + 0.3 * rng.next_double();
        const CsrMatrix a = oracle::random_pattern(m, k, density, rng);
        const CsrMatrix b = oracle::random_pattern(k, n, density, rng);
        CAPTURE(trial, m, k, n, density);
        REQUIRE(compute_flop(a, b).total_flop == oracle::dense_flop_count(a, b));
    }
}

TEST_CASE("profile only depends on B's row sizes", "[flop]") {
    SplitMix64 rng(5);
    const CsrMatrix a = oracle::random_pattern(20, 20, 0.2, rng);
    const CsrMatrix b = oracle::random_pattern(20, 30, 0.2, rng);

    // Same rpt, different column contents.
    CsrMatrix shifted = b;
    for (index_t i = 0; i < shifted.rows; ++i) {
        const offset_t len = shifted.rpt[i + 1] - shifted.rpt[i];
        for (offset_t k = 0; k < len; ++k) {
            shifted.col[shifted.rpt[i] + k] = static_cast<index_t>(k);
        }
    }
    REQUIRE(validate(shifted).empty());

    const FlopProfile p1 = compute_flop(a, b);
    const FlopProfile p2 = compute_flop(a, shifted);
    CHECK(p1.flop_per_row == p2.flop_per_row);
    CHECK(p1.total_flop == p2.total_flop);
}

TEST_CASE("compute_flop is thread-count invariant", "[flop]") {
    SplitMix64 rng(6);
    const CsrMatrix a = oracle::random_pattern(123, 77, 0.1, rng);
    const CsrMatrix b = oracle::random_pattern(77, 91, 0.1, rng);
    const FlopProfile p1 = compute_flop(a, b, 1);
    for (int threads : {2, 3, 8}) {
        const FlopProfile p = compute_flop(a, b, threads);
        CHECK(p.flop_per_row == p1.flop_per_row);
        CHECK(p.total_flop == p1.total_flop);
        CHECK(p.max_flop_row == p1.max_flop_row);
    }
}

TEST_CASE("sampled_flop sums over the sample list", "[flop]") {
    const CsrMatrix eye = identity(4);
    const FlopProfile eye_profile = compute_flop(eye, eye);
    const std::vector<index_t> all = {0, 1, 2, 3};
    CHECK(sampled_flop(eye_profile, all) == 4);

    CHECK(sampled_flop(eye_profile, std::vector<index_t>{}) == 0);

    const CsrMatrix m = upper_2x2();
    const FlopProfile profile = compute_flop(m, m);
    const std::vector<index_t> duplicated = {0, 0};
    CHECK(sampled_flop(profile, duplicated) == 6);
}

TEST_CASE("sampled_flop rejects out-of-range rows", "[flop]") {
    const CsrMatrix eye = identity(2);
    const FlopProfile profile = compute_flop(eye, eye);
    const std::vector<index_t> bad = {2};
    REQUIRE_THROWS_AS(sampled_flop(profile, bad), std::invalid_argument);
}
