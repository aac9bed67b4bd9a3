#pragma once

#include <string>

namespace ks2d {

inline constexpr const char* version_string = "0.1.0";

inline std::string tool_version() { return std::string("ks2d ") + version_string; }

}  // namespace ks2d
