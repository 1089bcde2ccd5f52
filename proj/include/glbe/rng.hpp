#pragma once
// Counter-based random streams: Philox4x32-10 keyed from a 64-bit seed, with one
// independent stream per history index.

#include <array>
#include <cstdint>
#include <limits>

namespace glbe {

// SplitMix64 finalizer, used to spread a user seed over the Philox key.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// The Philox4x32 bijection with ten rounds (Salmon et al., SC'11).
constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

// A UniformRandomBitGenerator producing 64-bit words from the stream
// (seed, stream_id). Counter words 0-1 hold the draw index, words 2-3 the stream.
class PhiloxStream {
public:
    using result_type = std::uint64_t;

    PhiloxStream(std::uint64_t seed, std::uint64_t stream) : stream_(stream) {
        const std::uint64_t k = splitmix64(seed);
        key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (used_ == 2) refill();
        const std::uint64_t lo = block_[2 * used_], hi = block_[2 * used_ + 1];
        ++used_;
        return lo | (hi << 32);
    }

    std::uint64_t stream() const { return stream_; }
    std::uint64_t blocks_drawn() const { return counter_; }

private:
    void refill() {
        const PhiloxCounter ctr = {static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                                   static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        block_ = philox4x32_10(ctr, key_);
        ++counter_;
        used_ = 0;
    }

    PhiloxKey key_{};
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    PhiloxCounter block_{};
    int used_ = 2;
};

}  // namespace glbe
