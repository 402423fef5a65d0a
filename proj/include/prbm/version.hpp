#pragma once

namespace prbm {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace prbm
