#pragma once

namespace firm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace firm
