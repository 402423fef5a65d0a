#pragma once

#include <string>

#include "prbm/sided.hpp"

namespace prbm {

// Command-line grammar for sided coordinates: "0+", "0-", or a plain
// decimal whose sign picks the side ("1.5", "-2"). A bare "0" is ambiguous
// and rejected.
SidedReal parse_sided(const std::string& text);

// CSV pair (value, side): the projected value and "+" or "-".
std::string side_char(const SidedReal& x);

// Projection with the signed zero of 0- normalized away for output.
inline double csv_projection(const SidedReal& x) { return x.projection() + 0.0; }

// JSON fragment [value, "+"|"-"].
std::string sided_json(const SidedReal& x);

}  // namespace prbm
