#pragma once

#include <cstdint>
#include <cmath>

#include "prbm/special.hpp"

namespace prbm {

// Counter-based random numbers (Philox 4x32-10 construction from Salmon et
// al.). The draw at (seed, stream_id, index) is a pure function, so paths
// are bit-reproducible no matter how the ensemble is scheduled across
// threads, and distinct stream_ids give statistically independent streams.
struct Philox4x32 {
    std::uint32_t c0, c1, c2, c3;

    static Philox4x32 block(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        std::uint32_t k0 = static_cast<std::uint32_t>(seed);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
        Philox4x32 s{static_cast<std::uint32_t>(index),
                     static_cast<std::uint32_t>(index >> 32),
                     static_cast<std::uint32_t>(stream),
                     static_cast<std::uint32_t>(stream >> 32)};
        for (int r = 0; r < 10; ++r) {
            s.round(k0, k1);
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return s;
    }

    void round(std::uint32_t k0, std::uint32_t k1) {
        std::uint64_t p0 = std::uint64_t(0xD2511F53u) * c0;
        std::uint64_t p1 = std::uint64_t(0xCD9E8D57u) * c2;
        std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        std::uint32_t n1 = static_cast<std::uint32_t>(p1);
        std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        std::uint32_t n3 = static_cast<std::uint32_t>(p0);
        c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    }

    std::uint64_t lo64() const { return (std::uint64_t(c0) << 32) | c1; }
    std::uint64_t hi64() const { return (std::uint64_t(c2) << 32) | c3; }
};

// Strictly inside (0,1): (k + 1/2) / 2^53 with k the top 53 bits.
inline double u53(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1p-53;
}

struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    // Two independent uniforms per counter value.
    void uniform_pair(std::uint64_t index, double& a, double& b) const {
        Philox4x32 blk = Philox4x32::block(seed, stream_id, index);
        a = u53(blk.lo64());
        b = u53(blk.hi64());
    }

    double uniform(std::uint64_t index) const {
        return u53(Philox4x32::block(seed, stream_id, index).lo64());
    }

    double normal(std::uint64_t index) const {
        return norm_ppf(uniform(index));
    }

    // Exp(1); scale by 1/rate at the call site.
    double exponential(std::uint64_t index) const {
        return -std::log(uniform(index));
    }

    RngStream substream(std::uint64_t offset) const {
        return RngStream{seed, stream_id + offset};
    }
};

// Stream-id layout for the simulators: path i of a given ensemble uses
// stream_id = ensemble_base + i. Samplers that need a second independent
// sequence within one path (e.g. Poisson flip levels on top of the driving
// normals) split the 64-bit counter space instead, via these offsets.
inline constexpr std::uint64_t kCounterSplit = std::uint64_t(1) << 62;
inline constexpr std::uint64_t kCounterRetry = std::uint64_t(2) << 62;

// Ziggurat normal (Marsaglia-Tsang, 128 layers) on top of the counter-based
// blocks; ~3x faster than the inverse-CDF draw in the hot simulation loops.
// The rare slow path consumes blocks from the retry counter region derived
// from `index`, so the value is still a pure function of
// (seed, stream_id, index).
double zig_normal(const RngStream& rng, std::uint64_t index);

// Two normals from one block; the pair is a pure function of the index.
void zig_normal_pair(const RngStream& rng, std::uint64_t index, double& a, double& b);

// Sequential consumer for the simulation loops: draw k is lane (k % 2) of
// pair block (k / 2). Keeps one spare value between calls.
struct NormalSource {
    RngStream rng;
    std::uint64_t next_index = 0;
    double spare = 0.0;
    bool has_spare = false;

    explicit NormalSource(const RngStream& r) : rng(r) {}

    double operator()() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        double a;
        zig_normal_pair(rng, next_index++, a, spare);
        has_spare = true;
        return a;
    }
};

}  // namespace prbm
