#pragma once

namespace sphreg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sphreg
