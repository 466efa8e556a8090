#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spnnz/csr.hpp"
#include "spnnz/types.hpp"

namespace spnnz {

enum class MmField { real, integer, pattern, complex_ };
enum class MmSymmetry { general, symmetric, skew_symmetric, hermitian };

struct MatrixMarketHeader {
    MmField field = MmField::real;
    MmSymmetry symmetry = MmSymmetry::general;
    index_t rows = 0;
    index_t cols = 0;
    offset_t entries = 0;
};

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

struct MmCursor {
    const char* p;
    const char* end;
    long line = 1;

    bool at_end() const { return p >= end; }

    void skip_spaces() {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    }

    // Advance past newlines, counting lines; returns false at EOF.
    bool next_line() {
        while (p < end && *p != '\n') ++p;
        if (p < end) {
            ++p;
            ++line;
        }
        return p < end;
    }

    long parse_int(long long& out) {
        skip_spaces();
        char* next = nullptr;
        out = std::strtoll(p, &next, 10);
        if (next == p) throw parse_error("expected integer", line);
        p = next;
        return line;
    }

    double parse_real() {
        skip_spaces();
        char* next = nullptr;
        const double v = std::strtod(p, &next);
        if (next == p) throw parse_error("expected numeric value", line);
        p = next;
        return v;
    }

    void expect_line_end() {
        skip_spaces();
        if (p < end && *p != '\n') throw parse_error("trailing characters on line", line);
    }
};

} // namespace detail

/// Read a coordinate Matrix Market file into CSR form. Symmetric, skew and
/// hermitian inputs are expanded to general (mirrored off-diagonal entries;
/// skew keeps the mirrored positions with negated values). Values are
/// discarded unless keep_values is set; pattern and complex files always
/// yield structure-only matrices.
inline CsrMatrix read_matrix_market(const std::filesystem::path& path,
                                    bool keep_values = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open " + path.string(), 0);
    std::string buffer((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    detail::MmCursor cur{buffer.data(), buffer.data() + buffer.size()};

    // Header: %%MatrixMarket matrix coordinate <field> <symmetry>
    char object[64] = {0}, format[64] = {0}, field_s[64] = {0}, symmetry_s[64] = {0};
    if (std::sscanf(cur.p, "%%%%MatrixMarket %63s %63s %63s %63s", object, format, field_s,
                    symmetry_s) != 4) {
        throw parse_error("malformed MatrixMarket header", cur.line);
    }
    if (detail::lower(object) != "matrix") {
        throw parse_error("unsupported object '" + std::string(object) + "'", cur.line);
    }
    if (detail::lower(format) != "coordinate") {
        throw parse_error("unsupported format '" + std::string(format) + "'", cur.line);
    }
    MatrixMarketHeader header;
    const std::string field = detail::lower(field_s);
    if (field == "real") header.field = MmField::real;
    else if (field == "integer") header.field = MmField::integer;
    else if (field == "pattern") header.field = MmField::pattern;
    else if (field == "complex") header.field = MmField::complex_;
    else throw parse_error("unsupported field '" + field + "'", cur.line);

    const std::string symmetry = detail::lower(symmetry_s);
    if (symmetry == "general") header.symmetry = MmSymmetry::general;
    else if (symmetry == "symmetric") header.symmetry = MmSymmetry::symmetric;
    else if (symmetry == "skew-symmetric") header.symmetry = MmSymmetry::skew_symmetric;
    else if (symmetry == "hermitian") header.symmetry = MmSymmetry::hermitian;
    else throw parse_error("unsupported symmetry '" + symmetry + "'", cur.line);

    // Comment and blank lines are allowed anywhere before the size line.
    if (!cur.next_line()) throw parse_error("missing size line", cur.line);
    for (;;) {
        cur.skip_spaces();
        if (cur.at_end()) throw parse_error("missing size line", cur.line);
        if (*cur.p == '%' || *cur.p == '\n') {
            if (!cur.next_line()) throw parse_error("missing size line", cur.line);
            continue;
        }
        break;
    }

    long long rows_l = 0, cols_l = 0, entries_l = 0;
    cur.parse_int(rows_l);
    cur.parse_int(cols_l);
    cur.parse_int(entries_l);
    cur.expect_line_end();
    if (rows_l < 0 || cols_l < 0 || entries_l < 0) {
        throw parse_error("negative size declaration", cur.line);
    }
    header.rows = static_cast<index_t>(rows_l);
    header.cols = static_cast<index_t>(cols_l);
    header.entries = static_cast<offset_t>(entries_l);

    const bool has_value = header.field != MmField::pattern;
    const bool is_complex = header.field == MmField::complex_;
    const bool mirror = header.symmetry != MmSymmetry::general;
    const bool negate_mirror = header.symmetry == MmSymmetry::skew_symmetric;
    keep_values = keep_values && header.field != MmField::pattern && !is_complex;

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(mirror ? 2 * header.entries : header.entries));

    for (offset_t e = 0; e < header.entries; ++e) {
        // Skip blank/comment lines between entries.
        for (;;) {
            if (!cur.next_line()) throw parse_error("entry list truncated: expected " +
                                                        std::to_string(header.entries) +
                                                        " entries, got " + std::to_string(e),
                                                    cur.line);
            cur.skip_spaces();
            if (cur.at_end()) throw parse_error("entry list truncated: expected " +
                                                    std::to_string(header.entries) +
                                                    " entries, got " + std::to_string(e),
                                                cur.line);
            if (*cur.p == '%' || *cur.p == '\n') continue;
            break;
        }
        long long r1 = 0, c1 = 0;
        cur.parse_int(r1);
        cur.parse_int(c1);
        double value = 1.0;
        if (has_value) {
            value = cur.parse_real();
            if (is_complex) cur.parse_real(); // imaginary part; positions only
        }
        cur.expect_line_end();
        if (r1 < 1 || r1 > rows_l || c1 < 1 || c1 > cols_l) {
            throw parse_error("entry (" + std::to_string(r1) + ", " + std::to_string(c1) +
                                  ") outside declared " + std::to_string(rows_l) + "x" +
                                  std::to_string(cols_l),
                              cur.line);
        }
        const index_t r = static_cast<index_t>(r1 - 1);
        const index_t c = static_cast<index_t>(c1 - 1);
        triplets.push_back({r, c, value});
        if (mirror && r != c) {
            triplets.push_back({c, r, negate_mirror ? -value : value});
        }
    }

    return from_triplets(triplets, header.rows, header.cols, keep_values);
}

/// Write the sparsity pattern as a coordinate Matrix Market file
/// (1-based indices, pattern field, general symmetry).
inline void write_matrix_market(const std::filesystem::path& path, const CsrMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "%%MatrixMarket matrix coordinate pattern general\n";
    out << m.rows << " " << m.cols << " " << m.nnz() << "\n";
    for (index_t i = 0; i < m.rows; ++i) {
        for (offset_t k = m.rpt[i]; k < m.rpt[i + 1]; ++k) {
            out << (i + 1) << " " << (m.col[k] + 1) << "\n";
        }
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

} // namespace spnnz
