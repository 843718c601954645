#pragma once

namespace jsonslots {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kBuildId = "jsonslots 0.1.0";

}  // namespace jsonslots
