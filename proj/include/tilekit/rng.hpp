#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "tilekit/common.hpp"

namespace tilekit {

// Philox4x32-10 counter-based generator. Streams are cheap: a generator is a
// pure function of (seed, stream, counter), so independent consumers (bootstrap
// replicates, sampler chains, per-parameter init) get their own stream and the
// results do not depend on scheduling or batching.
class Rng {
public:
    explicit Rng(uint64_t seed, uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    uint32_t next_u32() {
        if (block_pos_ == 4) {
            fill_block();
            block_pos_ = 0;
        }
        return block_[block_pos_++];
    }

    uint64_t next_u64() {
        uint64_t lo = next_u32();
        uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in (0,1], used where log() must stay finite.
    double uniform_open() { return 1.0 - uniform(); }

    // Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform_open();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Unbiased integer in [0, n) by rejection.
    uint64_t below(uint64_t n) {
        if (n == 0) throw_usage("Rng::below: n must be positive");
        uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // First k entries of a seeded Fisher-Yates permutation of [0, n):
    // a uniform draw of k distinct indices, in draw order.
    std::vector<int64_t> sample_without_replacement(int64_t n, int64_t k) {
        if (k < 0 || k > n) throw_usage("sample_without_replacement: k out of range");
        std::vector<int64_t> pool(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
        std::vector<int64_t> out(static_cast<size_t>(k));
        for (int64_t i = 0; i < k; ++i) {
            uint64_t j = i + below(static_cast<uint64_t>(n - i));
            std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
            out[static_cast<size_t>(i)] = pool[static_cast<size_t>(i)];
        }
        return out;
    }

private:
    static uint32_t mul_hi(uint32_t a, uint32_t b) {
        return static_cast<uint32_t>((static_cast<uint64_t>(a) * b) >> 32);
    }

    void fill_block() {
        constexpr uint32_t kM0 = 0xD2511F53u;
        constexpr uint32_t kM1 = 0xCD9E8D57u;
        constexpr uint32_t kW0 = 0x9E3779B9u;
        constexpr uint32_t kW1 = 0xBB67AE85u;

        uint32_t c0 = static_cast<uint32_t>(counter_);
        uint32_t c1 = static_cast<uint32_t>(counter_ >> 32);
        uint32_t c2 = static_cast<uint32_t>(stream_);
        uint32_t c3 = static_cast<uint32_t>(stream_ >> 32);
        uint32_t k0 = static_cast<uint32_t>(seed_);
        uint32_t k1 = static_cast<uint32_t>(seed_ >> 32);

        for (int round = 0; round < 10; ++round) {
            uint32_t lo0 = c0 * kM0;
            uint32_t hi0 = mul_hi(c0, kM0);
            uint32_t lo1 = c2 * kM1;
            uint32_t hi1 = mul_hi(c2, kM1);
            uint32_t n0 = hi1 ^ c1 ^ k0;
            uint32_t n1 = lo1;
            uint32_t n2 = hi0 ^ c3 ^ k1;
            uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += kW0;
            k1 += kW1;
        }
        block_[0] = c0;
        block_[1] = c1;
        block_[2] = c2;
        block_[3] = c3;
        ++counter_;
    }

    uint64_t seed_;
    uint64_t stream_;
    uint64_t counter_ = 0;
    uint32_t block_[4] = {};
    int block_pos_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Deterministic 64-bit string hash (FNV-1a), used to derive streams from
// group ids and similar labels.
inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace tilekit
