#include "prbm/io.hpp"

#include <cstdio>
#include <stdexcept>

namespace prbm {

SidedReal parse_sided(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("parse_sided: empty coordinate");
    if (text == "0+") return origin_plus();
    if (text == "0-") return origin_minus();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("parse_sided: cannot parse '" + text + "'");
    }
    if (used != text.size())
        throw std::invalid_argument("parse_sided: trailing characters in '" + text + "'");
    if (v == 0.0)
        throw std::invalid_argument("parse_sided: bare 0 is ambiguous, use 0+ or 0-");
    return SidedReal::from_projection(v);
}

std::string side_char(const SidedReal& x) {
    return x.side == Side::plus ? "+" : "-";
}

std::string sided_json(const SidedReal& x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "[%.17g, \"%s\"]", csv_projection(x),
                  x.side == Side::plus ? "+" : "-");
    return buf;
}

}  // namespace prbm
