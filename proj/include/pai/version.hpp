#pragma once

namespace pai {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace pai
