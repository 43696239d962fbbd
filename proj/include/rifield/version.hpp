#pragma once

namespace rifield {
inline constexpr const char* kVersion = "0.1.0";
}
