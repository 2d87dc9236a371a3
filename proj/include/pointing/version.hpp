#pragma once

namespace pointing {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pointing
