#pragma once

namespace stereoscope {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stereoscope
