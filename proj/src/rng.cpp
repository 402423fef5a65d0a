#include "prbm/rng.hpp"

#include <cmath>
#include <cstdint>

namespace prbm {

namespace {

// Marsaglia-Tsang ziggurat tables for the standard normal, 128 layers.
struct ZigTables {
    std::uint32_t kn[128];
    double wn[128];
    double fn[128];

    ZigTables() {
        const double m1 = 2147483648.0;
        double dn = 3.442619855899, tn = dn;
        const double vn = 9.91256303526217e-3;
        double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
        kn[1] = 0;
        wn[0] = q / m1;
        wn[127] = dn / m1;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m1;
        }
    }
};

const ZigTables kZig;

// 32-bit words for the ziggurat slow path: the leftovers of the primary
// block first, then blocks from the retry counter region, so every value
// stays a pure function of (seed, stream_id, index).
struct WordSource {
    const RngStream* rng;
    std::uint64_t retry_base;
    std::uint32_t pending[4];
    int count = 0;
    std::uint64_t attempt = 0;

    std::uint32_t next32() {
        if (count == 0) {
            Philox4x32 b =
                Philox4x32::block(rng->seed, rng->stream_id, retry_base + (++attempt));
            pending[0] = b.c0;
            pending[1] = b.c1;
            pending[2] = b.c2;
            pending[3] = b.c3;
            count = 4;
        }
        return pending[--count];
    }
    double uni() { return (static_cast<double>(next32()) + 0.5) * 0x1p-32; }
};

double zig_slow(std::int32_t hz, WordSource& ws) {
    const double r = 3.442619855899;
    for (;;) {
        int iz = hz & 127;
        if (iz == 0) {
            double x, y;
            do {
                x = -std::log(ws.uni()) / r;
                y = -std::log(ws.uni());
            } while (y + y < x * x);
            return hz > 0 ? r + x : -(r + x);
        }
        const double x = hz * kZig.wn[iz];
        if (kZig.fn[iz] + ws.uni() * (kZig.fn[iz - 1] - kZig.fn[iz]) <
            std::exp(-0.5 * x * x))
            return x;
        hz = static_cast<std::int32_t>(ws.next32());
        iz = hz & 127;
        const std::uint32_t mag = static_cast<std::uint32_t>(
            hz < 0 ? -static_cast<std::int64_t>(hz) : hz);
        if (mag < kZig.kn[iz]) return hz * kZig.wn[iz];
    }
}

inline bool zig_fast(std::int32_t hz, double& out) {
    const int iz = hz & 127;
    const std::uint32_t mag =
        static_cast<std::uint32_t>(hz < 0 ? -static_cast<std::int64_t>(hz) : hz);
    if (mag < kZig.kn[iz]) {
        out = hz * kZig.wn[iz];
        return true;
    }
    return false;
}

}  // namespace

double zig_normal(const RngStream& rng, std::uint64_t index) {
    Philox4x32 blk = Philox4x32::block(rng.seed, rng.stream_id, index);
    double out;
    if (zig_fast(static_cast<std::int32_t>(blk.c0), out)) return out;
    WordSource ws{&rng, kCounterRetry + (index << 8), {blk.c1, blk.c2, blk.c3, 0}, 3, 0};
    return zig_slow(static_cast<std::int32_t>(blk.c0), ws);
}

void zig_normal_pair(const RngStream& rng, std::uint64_t index, double& a, double& b) {
    Philox4x32 blk = Philox4x32::block(rng.seed, rng.stream_id, index);
    const bool fast_a = zig_fast(static_cast<std::int32_t>(blk.c0), a);
    const bool fast_b = zig_fast(static_cast<std::int32_t>(blk.c1), b);
    if (fast_a && fast_b) return;
    WordSource ws{&rng, kCounterRetry + (index << 8), {blk.c2, blk.c3, 0, 0}, 2, 0};
    if (!fast_a) a = zig_slow(static_cast<std::int32_t>(blk.c0), ws);
    if (!fast_b) b = zig_slow(static_cast<std::int32_t>(blk.c1), ws);
}

}  // namespace prbm
