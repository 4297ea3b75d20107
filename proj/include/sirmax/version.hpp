#pragma once

namespace sirmax {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sirmax
