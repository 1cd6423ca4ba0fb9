#pragma once

#include <cstdint>
#include <random>

#include "rifs/error.hpp"

namespace rifs {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Per-stream seed derivation; distinct stream indices give statistically
/// independent generators.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t stream_index,
                                        std::uint64_t salt = 0) {
    std::uint64_t s = master_seed ^ (0xD1B54A32D192ED03ULL * (salt + 1));
    (void)splitmix64(s);
    s ^= 0x9E3779B97F4A7C15ULL * (stream_index + 1);
    return splitmix64(s);
}

inline std::mt19937_64 make_rng(std::uint64_t master_seed,
                                std::uint64_t stream_index,
                                std::uint64_t salt = 0) {
    return std::mt19937_64(derive_stream_seed(master_seed, stream_index, salt));
}

/// Uniform draw in [0, 1) from the raw 64-bit output (platform-stable
/// within an implementation; no library distributions involved).
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// A seeded Bernoulli symbol stream: (master_seed, stream_index, position)
/// fully determines the symbol sequence.
class SymbolStream {
public:
    SymbolStream(std::uint64_t master_seed, std::uint64_t stream_index, double p0)
        : master_(master_seed), index_(stream_index), p0_(p0),
          rng_(make_rng(master_seed, stream_index)) {
        if (!(p0 >= 0.0 && p0 <= 1.0))
            fail(ErrorCode::invalid_parameter, "p0 must lie in [0, 1]");
    }

    /// 0 with probability p0, else 1; advances the stream position.
    int next() {
        ++position_;
        return uniform01(rng_) < p0_ ? 0 : 1;
    }

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return index_; }
    std::uint64_t position() const { return position_; }
    double p0() const { return p0_; }

private:
    std::uint64_t master_ = 0;
    std::uint64_t index_ = 0;
    std::uint64_t position_ = 0;
    double p0_ = 0.5;
    std::mt19937_64 rng_;
};

} // namespace rifs
