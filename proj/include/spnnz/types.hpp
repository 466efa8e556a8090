#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spnnz {

// Row/column indices are 32-bit; offsets and counters are 64-bit so that
// matrices with more than 2^31 stored entries (and FLOP totals beyond
// 2^31) are representable.
using index_t = std::int32_t;
using offset_t = std::int64_t;

class assembly_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, long line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

class fetch_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace spnnz
