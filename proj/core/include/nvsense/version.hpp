#pragma once

namespace nvsense {

inline constexpr const char* version = "1.0.0";

}  // namespace nvsense
