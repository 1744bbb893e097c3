#pragma once

namespace mfd {
inline constexpr const char* kVersion = "0.1.0";
}
