#pragma once

namespace stablab {
inline constexpr const char* version_string = "stablab 0.1.0";
}
