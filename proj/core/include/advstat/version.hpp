#pragma once

namespace advstat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace advstat
