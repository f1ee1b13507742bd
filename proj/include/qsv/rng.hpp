#pragma once

#include <cstdint>
#include <random>

namespace qsv {

/// Identifier recorded in reports so resampling results can be reproduced by
/// any implementation of the same generator stack.
inline constexpr const char* kRngAlgorithm = "mt19937_64;substream=splitmix64(seed,index);uniform=rejection";

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic generator for one (seed, stream index) pair. The output of
/// std::mt19937_64 is fixed by the C++ standard; the index mapping below does
/// not rely on any library distribution.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : engine_(splitmix64(seed ^ splitmix64(stream))) {}

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t uniform_index(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t draw = engine_();
        while (draw >= limit) draw = engine_();
        return draw % bound;
    }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace qsv
