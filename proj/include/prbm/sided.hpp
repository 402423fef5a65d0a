#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace prbm {

// The doubled line: disjoint union (-inf, 0-] U [0+, +inf). The two origins
// 0+ and 0- are distinct states, so a point is a (magnitude, side) pair
// rather than a signed float.
enum class Side : std::uint8_t { minus = 0, plus = 1 };

inline double sign_of(Side s) { return s == Side::plus ? 1.0 : -1.0; }
inline Side opposite(Side s) { return s == Side::plus ? Side::minus : Side::plus; }

struct SidedReal {
    double magnitude = 0.0;
    Side side = Side::plus;

    SidedReal() = default;
    SidedReal(double mag, Side s) : magnitude(mag), side(s) {
        if (!(mag >= 0.0))
            throw std::invalid_argument("SidedReal: magnitude must be >= 0");
    }

    // Sign picks the side; the ambiguous x = 0 maps to 0+ by convention.
    static SidedReal from_projection(double x) {
        return x < 0.0 ? SidedReal(-x, Side::minus) : SidedReal(x, Side::plus);
    }

    double projection() const { return sign_of(side) * magnitude; }
    bool is_origin() const { return magnitude == 0.0; }

    bool operator==(const SidedReal& o) const {
        return magnitude == o.magnitude && side == o.side;
    }
};

inline SidedReal origin_plus() { return SidedReal(0.0, Side::plus); }
inline SidedReal origin_minus() { return SidedReal(0.0, Side::minus); }

// d(x,y) = |x - y| + 1{x, y on different half lines}. Points on the same
// half line (including its origin) are at plain euclidean distance; crossing
// the barrier costs an extra unit, so d(0+, 0-) = 1.
inline double dotted_distance(const SidedReal& a, const SidedReal& b) {
    double base = std::abs(a.projection() - b.projection());
    return a.side == b.side ? base : base + 1.0;
}

// Scale function r: R -> doubled line. Collapses the band [-1/(2 gamma),
// 1/(2 gamma)] onto the doubled origin and shifts each outer half line in.
inline SidedReal scale_r(double x, double gamma) {
    if (!(gamma > 0.0) || std::isinf(gamma))
        throw std::invalid_argument("scale_r: gamma must lie in (0, inf)");
    const double c = 1.0 / (2.0 * gamma);
    if (x > c) return SidedReal(x - c, Side::plus);
    if (x < -c) return SidedReal(-x - c, Side::minus);
    return x >= 0.0 ? origin_plus() : origin_minus();
}

// Right inverse of r: r(r_inv(x)) = x for every sided x.
inline double scale_r_inv(const SidedReal& x, double gamma) {
    if (!(gamma > 0.0) || std::isinf(gamma))
        throw std::invalid_argument("scale_r_inv: gamma must lie in (0, inf)");
    return x.projection() + sign_of(x.side) / (2.0 * gamma);
}

inline std::string to_string(const SidedReal& x) {
    if (x.is_origin()) return x.side == Side::plus ? "0+" : "0-";
    return std::to_string(x.projection());
}

}  // namespace prbm
