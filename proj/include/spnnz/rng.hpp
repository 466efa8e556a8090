#pragma once

#include <cstdint>

namespace spnnz {

/// SplitMix64 generator (Steele, Lea, Flood 2014). Chosen over std::mt19937
/// because its output sequence is fixed by the algorithm itself, so seeds
/// reproduce bit-identically on every platform and standard library.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53 significant bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound) without floating point (Lemire's method).
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    /// Derive an independent stream for (seed, tag); used to give each row of
    /// a synthetic matrix and each benchmark case its own substream.
    static SplitMix64 fork(std::uint64_t seed, std::uint64_t tag) {
        SplitMix64 mixer(seed ^ (tag * 0xd1b54a32d192ed03ULL));
        return SplitMix64(mixer.next_u64());
    }

private:
    std::uint64_t state_;
};

} // namespace spnnz
