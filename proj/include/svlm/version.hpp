#pragma once

namespace svlm {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace svlm
