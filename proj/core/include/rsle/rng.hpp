#pragma once

/// Counter-based random number generation for reproducible parallel Monte
/// Carlo. The generator is Philox4x32-10; the 128-bit counter is split as
/// (block index, sample_index) and the 64-bit key is the user seed, so the
/// stream for a given (seed, sample_index) is stateless and collision-free
/// across sample indices regardless of worker scheduling.
///
/// Gaussian variates use the Box-Muller transform on two 53-bit uniforms,
/// one pair per 128-bit block. This choice is part of the reproducibility
/// contract: a port that consumes blocks the same way reproduces the stream
/// bit for bit.

#include <cstdint>
#include <cmath>

namespace rsle {

namespace detail {

struct philox_block {
    uint32_t x[4];
};

inline void philox_round(uint32_t ctr[4], const uint32_t key[2]) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    const uint64_t p0 = static_cast<uint64_t>(M0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(M1) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
    uint32_t out[4];
    out[0] = hi1 ^ ctr[1] ^ key[0];
    out[1] = lo1;
    out[2] = hi0 ^ ctr[3] ^ key[1];
    out[3] = lo0;
    ctr[0] = out[0]; ctr[1] = out[1]; ctr[2] = out[2]; ctr[3] = out[3];
}

inline philox_block philox10(uint64_t block, uint64_t stream, uint64_t key64) {
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    uint32_t ctr[4] = {
        static_cast<uint32_t>(block), static_cast<uint32_t>(block >> 32),
        static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)};
    uint32_t key[2] = {static_cast<uint32_t>(key64), static_cast<uint32_t>(key64 >> 32)};
    for (int r = 0; r < 10; ++r) {
        philox_round(ctr, key);
        key[0] += W0;
        key[1] += W1;
    }
    return philox_block{{ctr[0], ctr[1], ctr[2], ctr[3]}};
}

} // namespace detail

/// One reproducible stream, identified by (seed, sample_index).
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t sample_index)
        : seed_(seed), stream_(sample_index) {}

    uint64_t seed() const { return seed_; }
    uint64_t sample_index() const { return stream_; }

    /// k-th 64-bit word of the stream, stateless.
    uint64_t word_at(uint64_t k) const {
        const detail::philox_block b = detail::philox10(k >> 1, stream_, seed_);
        const uint64_t lo = (static_cast<uint64_t>(b.x[1]) << 32) | b.x[0];
        const uint64_t hi = (static_cast<uint64_t>(b.x[3]) << 32) | b.x[2];
        return (k & 1) ? hi : lo;
    }

    uint64_t next_u64() { return word_at(pos_++); }

    /// Uniform in (0,1]: (w >> 11 is 53 bits) + 1 scaled by 2^-53.
    double next_uniform() {
        const uint64_t w = next_u64();
        return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes one block (two words) per pair.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // align to a block boundary so the pair always comes from one block
        if (pos_ & 1) ++pos_;
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Jump to an absolute word position (invalidates any cached normal).
    void seek(uint64_t word_pos) {
        pos_ = word_pos;
        have_spare_ = false;
    }

private:
    uint64_t seed_;
    uint64_t stream_;
    uint64_t pos_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Harness-facing stream factory: the (seed, sample_index) pair fully
/// determines the stream.
inline CounterRng rng_stream(uint64_t seed, uint64_t sample_index) {
    return CounterRng(seed, sample_index);
}

} // namespace rsle
